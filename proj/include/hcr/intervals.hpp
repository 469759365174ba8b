#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "hcr/exact_dist.hpp"
#include "hcr/generate.hpp"
#include "hcr/parallel.hpp"
#include "hcr/roots.hpp"
#include "hcr/sample.hpp"
#include "hcr/special.hpp"
#include "hcr/types.hpp"

namespace hcr {

enum class IntervalMethod { Exact, Asymptotic, Bootstrap, BayesSymmetric, BayesHPD };

inline const char* to_string(IntervalMethod m) {
    switch (m) {
    case IntervalMethod::Exact: return "exact";
    case IntervalMethod::Asymptotic: return "asymptotic";
    case IntervalMethod::Bootstrap: return "bootstrap";
    case IntervalMethod::BayesSymmetric: return "bayes_symmetric";
    case IntervalMethod::BayesHPD: return "bayes_hpd";
    }
    return "unknown";
}

struct IntervalEstimate {
    double lower = 0.0;
    double upper = 0.0;
    double level = 0.95;
    IntervalMethod method = IntervalMethod::Exact;
    /// Set when a negative lower endpoint was replaced by zero on request.
    bool clamped = false;

    double length() const { return upper - lower; }
    bool contains(double v) const { return lower <= v && v <= upper; }
};

inline void check_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
}

/// Wald interval lambda_hat -/+ z_{alpha/2} sqrt(D) / W.
inline IntervalEstimate asymptotic_ci(const SufficientStats& stats, double alpha, Cause cause,
                                      bool clamp_at_zero = false) {
    check_alpha(alpha);
    const int d = stats.count(cause);
    if (d == 0)
        throw NoAsymptoticInterval("asymptotic interval for cause " + std::to_string(to_int(cause)) +
                                   " does not exist: no failures from that cause");
    const double center = point_estimates(stats).of(cause);
    const double half = normal_quantile(1.0 - alpha / 2.0) * std::sqrt(static_cast<double>(d)) / stats.W;
    IntervalEstimate ci{center - half, center + half, 1.0 - alpha, IntervalMethod::Asymptotic};
    if (clamp_at_zero && ci.lower < 0.0) {
        ci.lower = 0.0;
        ci.clamped = true;
    }
    return ci;
}

struct ExactCiOptions {
    double rel_tol = 1e-8;
    int max_expansions = 60;
    int max_iterations = 200;
};

namespace detail {

// Solves estimator_cdf(observed; rate_self = lambda) = target for lambda.
// The cdf decreases in lambda.
inline double invert_cdf_in_rate(double observed, double other_rate, const Design& design, Cause cause, double target,
                                 const ExactCiOptions& opt) {
    auto g = [&](double lambda) {
        const RateParams r = cause == Cause::One ? RateParams{lambda, other_rate} : RateParams{other_rate, lambda};
        return estimator_cdf(observed, r, design, cause) - target;
    };
    const auto br = bracket_positive(g, observed, /*increasing=*/false, 2.0, opt.max_expansions);
    if (!br)
        throw RootFindingError("exact interval: no bracket for target " + std::to_string(target) + " within " +
                               std::to_string(opt.max_expansions) + " doublings from " + std::to_string(observed));
    const auto res = brent_root(g, *br, opt.rel_tol, opt.max_iterations);
    if (!res.converged)
        throw RootFindingError("exact interval: root search did not converge after " + std::to_string(res.evaluations) +
                               " evaluations");
    return res.root;
}

} // namespace detail

/// Interval from inverting the exact distribution of the estimator, with
/// the other rate held at its estimate. Requires both counts positive.
inline IntervalEstimate exact_ci(const SufficientStats& stats, const Design& design, double alpha, Cause cause,
                                 const ExactCiOptions& opt = {}) {
    check_alpha(alpha);
    if (stats.D1 == 0 || stats.D2 == 0)
        throw DegenerateCount("exact interval needs D1 > 0 and D2 > 0 (got D1 = " + std::to_string(stats.D1) +
                              ", D2 = " + std::to_string(stats.D2) + "); use zero_count_region");
    const Estimates est = point_estimates(stats);
    const double obs = est.of(cause);
    const double other = est.of(hcr::other(cause));
    const double lo = detail::invert_cdf_in_rate(obs, other, design, cause, 1.0 - alpha / 2.0, opt);
    const double hi = detail::invert_cdf_in_rate(obs, other, design, cause, alpha / 2.0, opt);
    return {lo, hi, 1.0 - alpha, IntervalMethod::Exact};
}

namespace detail {

// Solves P(D_cause = 0) = target for the rate of `cause`; P decreases in it.
inline double solve_zero_count_rate(double lambda_other, const Design& design, Cause cause, double target) {
    if (!(lambda_other > 0.0))
        throw std::invalid_argument("zero-count boundary needs a positive rate for the other cause");
    auto g = [&](double lambda) {
        const RateParams r = cause == Cause::One ? RateParams{lambda, lambda_other} : RateParams{lambda_other, lambda};
        return prob_zero_count(r, design, cause) - target;
    };
    const auto br = bracket_positive(g, lambda_other, /*increasing=*/false, 2.0, 200);
    if (!br) throw RootFindingError("zero-count boundary: no bracket found");
    return bisect_root(g, *br, 1e-13, 400).root;
}

} // namespace detail

/// Confidence set {rates : P(D_cause = 0) > 1 - alpha}, the fallback when the
/// observed count of `cause` is zero.
class ZeroCountRegion {
  public:
    ZeroCountRegion(const Design& design, double alpha, Cause cause) : design_(design), alpha_(alpha), cause_(cause) {
        design.validate();
        check_alpha(alpha);
    }

    Cause which_cause() const { return cause_; }
    double level() const { return 1.0 - alpha_; }
    const Design& design() const { return design_; }

    bool contains(const RateParams& rates) const { return prob_zero_count(rates, design_, cause_) > 1.0 - alpha_; }

    /// Supremum of the rate of `cause` inside the region when the other rate
    /// is `lambda_other`. Zero when the other rate is zero.
    double boundary_at(double lambda_other) const {
        if (!(lambda_other > 0.0)) return 0.0;
        return detail::solve_zero_count_rate(lambda_other, design_, cause_, 1.0 - alpha_);
    }

    std::vector<std::pair<double, double>> boundary(const std::vector<double>& other_grid) const {
        std::vector<std::pair<double, double>> out;
        out.reserve(other_grid.size());
        for (double g : other_grid) out.emplace_back(g, boundary_at(g));
        return out;
    }

  private:
    Design design_;
    double alpha_;
    Cause cause_;
};

inline ZeroCountRegion zero_count_region(const Design& design, double alpha, Cause cause) {
    return ZeroCountRegion(design, alpha, cause);
}

/// Rate of `cause` at which its count is zero with probability one half,
/// given the other rate.
inline double solve_median_zero_rate(double lambda_other, const Design& design, Cause cause) {
    return detail::solve_zero_count_rate(lambda_other, design, cause, 0.5);
}

/// Rate used to drive the bootstrap: the MLE when the count is positive,
/// otherwise the median-zero-count rate.
inline RateParams bootstrap_fit(const SufficientStats& stats, const Design& design) {
    const Estimates est = point_estimates(stats);
    RateParams fit{est.lambda1_hat, est.lambda2_hat};
    if (stats.D1 == 0) fit.lambda1 = solve_median_zero_rate(est.lambda2_hat, design, Cause::One);
    if (stats.D2 == 0) fit.lambda2 = solve_median_zero_rate(est.lambda1_hat, design, Cause::Two);
    return fit;
}

struct BootstrapResult {
    IntervalEstimate lambda1;
    IntervalEstimate lambda2;
    RateParams fitted;
    std::vector<double> replicates1; // sorted
    std::vector<double> replicates2; // sorted
    int degenerate1 = 0;             // replicates with D1* = 0
    int degenerate2 = 0;
};

namespace detail {

// x_(ceil(m p)) with 1-based ranks: the generalized inverse of the empirical cdf.
inline double empirical_quantile(const std::vector<double>& sorted, double p) {
    const auto m = static_cast<double>(sorted.size());
    auto rank = static_cast<std::size_t>(std::ceil(m * p - 1e-9));
    rank = std::clamp<std::size_t>(rank, 1, sorted.size());
    return sorted[rank - 1];
}

} // namespace detail

/// Parametric percentile bootstrap. Each replicate re-runs the whole
/// censored experiment under the fitted rates; replicate b draws from the
/// stream (rng_seed, b), so output does not depend on `threads`.
inline BootstrapResult bootstrap_ci(const SufficientStats& stats, const Design& design, double alpha, int n_boot,
                                    std::uint64_t rng_seed, int threads = 1) {
    check_alpha(alpha);
    if (n_boot < 100) throw std::invalid_argument("bootstrap: n_boot must be at least 100");
    BootstrapResult out;
    out.fitted = bootstrap_fit(stats, design);

    const auto B = static_cast<std::size_t>(n_boot);
    std::vector<SufficientStats> reps(B);
    parallel_for(B, threads, [&](std::size_t b) {
        Rng rng(rng_seed, {static_cast<std::uint64_t>(b)});
        reps[b] = generate_stats(out.fitted, design, rng);
    });

    out.replicates1.resize(B);
    out.replicates2.resize(B);
    for (std::size_t b = 0; b < B; ++b) {
        const RateParams fit = bootstrap_fit(reps[b], design);
        out.replicates1[b] = fit.lambda1;
        out.replicates2[b] = fit.lambda2;
        out.degenerate1 += reps[b].D1 == 0;
        out.degenerate2 += reps[b].D2 == 0;
    }
    if (out.degenerate1 == n_boot || out.degenerate2 == n_boot)
        throw DegenerateCount("bootstrap: every replicate has a zero count for one cause");

    std::sort(out.replicates1.begin(), out.replicates1.end());
    std::sort(out.replicates2.begin(), out.replicates2.end());
    auto percentile = [&](const std::vector<double>& v) {
        return IntervalEstimate{detail::empirical_quantile(v, alpha / 2.0), detail::empirical_quantile(v, 1.0 - alpha / 2.0),
                                1.0 - alpha, IntervalMethod::Bootstrap};
    };
    out.lambda1 = percentile(out.replicates1);
    out.lambda2 = percentile(out.replicates2);
    return out;
}

inline BootstrapResult bootstrap_ci(const HybridSample& sample, double alpha, int n_boot, std::uint64_t rng_seed,
                                    int threads = 1) {
    return bootstrap_ci(sufficient_stats(sample), sample.design, alpha, n_boot, rng_seed, threads);
}

} // namespace hcr
