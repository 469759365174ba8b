#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "hcr/intervals.hpp"
#include "hcr/rng.hpp"
#include "hcr/types.hpp"

namespace hcr {

/// Beta-Gamma law BG(b0, a0, a1, a2): lambda1 + lambda2 ~ Gamma(a0, rate b0)
/// independent of lambda1 / (lambda1 + lambda2) ~ Beta(a1, a2).
struct BetaGammaParams {
    double b0 = 0.0;
    double a0 = 0.0;
    double a1 = 0.0;
    double a2 = 0.0;

    void validate() const {
        if (!(b0 > 0.0) || !(a0 > 0.0) || !(a1 > 0.0) || !(a2 > 0.0) || !std::isfinite(b0) || !std::isfinite(a0) ||
            !std::isfinite(a1) || !std::isfinite(a2))
            throw std::invalid_argument("Beta-Gamma parameters must be finite and strictly positive");
    }

    double shape(Cause c) const { return c == Cause::One ? a1 : a2; }

    bool operator==(const BetaGammaParams&) const = default;
};

/// Vague prior under which the Bayes estimates coincide with the modified estimators.
inline BetaGammaParams noninformative_prior() { return {0.001, 0.001, 0.001, 0.001}; }

/// Prior whose means equal the given rates: a_i = lambda_i, b0 = a0 / (lambda1 + lambda2).
inline BetaGammaParams mean_matched_prior(const RateParams& rates, double a0 = 1.0) {
    rates.validate();
    return {a0 / rates.total(), a0, rates.lambda1, rates.lambda2};
}

struct MeanVar {
    double mean = 0.0;
    double variance = 0.0;
};

inline MeanVar bg_mean_var(const BetaGammaParams& p, Cause which) {
    p.validate();
    const double ai = p.shape(which);
    const double s = p.a1 + p.a2;
    const double mean = p.a0 * ai / (p.b0 * s);
    const double var = p.a0 * ai / (p.b0 * p.b0 * s) * ((ai + 1.0) * (p.a0 + 1.0) / (s + 1.0) - p.a0 * ai / s);
    return {mean, var};
}

inline RateParams bg_sample(const BetaGammaParams& p, Rng& rng) {
    const double u = rng.gamma(p.a0, p.b0);
    const double v = rng.beta(p.a1, p.a2);
    return {u * v, u * (1.0 - v)};
}

/// Conjugate update: BG(b0 + W, a0 + J, a1 + D1, a2 + D2).
inline BetaGammaParams posterior(const BetaGammaParams& prior, const SufficientStats& stats) {
    prior.validate();
    if (stats.W < 0.0 || stats.D1 < 0 || stats.D2 < 0 || stats.D1 + stats.D2 != stats.J)
        throw std::invalid_argument("posterior: inconsistent sufficient statistics");
    return {prior.b0 + stats.W, prior.a0 + stats.J, prior.a1 + stats.D1, prior.a2 + stats.D2};
}

struct BayesPointEstimates {
    double est1 = 0.0, var1 = 0.0;
    double est2 = 0.0, var2 = 0.0;
};

/// Posterior means and variances under squared error loss.
inline BayesPointEstimates bayes_point_estimates(const BetaGammaParams& post) {
    const MeanVar m1 = bg_mean_var(post, Cause::One);
    const MeanVar m2 = bg_mean_var(post, Cause::Two);
    return {m1.mean, m1.variance, m2.mean, m2.variance};
}

struct PosteriorSummary {
    double estimate = 0.0;
    double posterior_variance = 0.0;
    IntervalEstimate symmetric;
    IntervalEstimate hpd;
};

namespace detail {

struct Window {
    std::size_t offset = 0; // k = floor(M(1 - alpha))
    std::size_t count = 0;  // j = 1..floor(M alpha)
};

inline Window window_family(std::size_t M, double alpha) {
    const double m = static_cast<double>(M);
    Window w;
    w.offset = static_cast<std::size_t>(std::floor(m * (1.0 - alpha) + 1e-9));
    w.count = static_cast<std::size_t>(std::floor(m * alpha + 1e-9));
    w.count = std::min(w.count, M - w.offset);
    if (w.count < 1 || w.offset < 1) throw std::invalid_argument("credible window: M * alpha must be at least 1");
    return w;
}

// 0-based start index j* of the shortest window under `width`, smallest j on ties.
template <class Width>
std::size_t shortest_window(const std::vector<double>& sorted, const Window& w, Width&& width) {
    std::size_t best = 0;
    double best_width = width(sorted[0], sorted[w.offset]);
    for (std::size_t j = 1; j < w.count; ++j) {
        const double wd = width(sorted[j], sorted[j + w.offset]);
        if (wd < best_width) {
            best_width = wd;
            best = j;
        }
    }
    return best;
}

} // namespace detail

/// Sample mean and variance of the draws, the equal-tail interval and the
/// shortest interval from the family (g_(j), g_(j + floor(M(1-alpha)))).
inline PosteriorSummary summarize_draws(std::vector<double> values, double alpha) {
    check_alpha(alpha);
    const std::size_t M = values.size();
    if (M < 2) throw std::invalid_argument("summarize_draws: need at least two draws");
    for (double v : values)
        if (!std::isfinite(v)) throw std::invalid_argument("summarize_draws: non-finite functional value");

    CompensatedSum<double> sum;
    for (double v : values) sum += v;
    const double mean = sum.value() / static_cast<double>(M);
    CompensatedSum<double> ss;
    for (double v : values) ss += (v - mean) * (v - mean);

    std::sort(values.begin(), values.end());
    const auto w = detail::window_family(M, alpha);
    const auto hpd = detail::shortest_window(values, w, [](double lo, double hi) { return hi - lo; });
    // equal tails: j = floor(M alpha / 2), 1-based
    auto sym = static_cast<std::size_t>(std::floor(static_cast<double>(M) * alpha / 2.0 + 1e-9));
    sym = std::clamp<std::size_t>(sym, 1, w.count) - 1;

    PosteriorSummary out;
    out.estimate = mean;
    out.posterior_variance = ss.value() / static_cast<double>(M);
    out.symmetric = {values[sym], values[sym + w.offset], 1.0 - alpha, IntervalMethod::BayesSymmetric};
    out.hpd = {values[hpd], values[hpd + w.offset], 1.0 - alpha, IntervalMethod::BayesHPD};
    return out;
}

using RateFunctional = std::function<double(double, double)>;

/// Monte Carlo Bayes estimate of g(lambda1, lambda2) with credible intervals.
inline PosteriorSummary mc_estimate_g(const BetaGammaParams& post, const RateFunctional& g, int M, double alpha,
                                      Rng& rng) {
    post.validate();
    check_alpha(alpha);
    if (M < 2 || static_cast<double>(M) * alpha < 1.0) throw std::invalid_argument("mc_estimate_g: need M * alpha >= 1");
    std::vector<double> values(static_cast<std::size_t>(M));
    for (auto& v : values) {
        const RateParams d = bg_sample(post, rng);
        v = g(d.lambda1, d.lambda2);
    }
    return summarize_draws(std::move(values), alpha);
}

struct AlphaSplit {
    double alpha1 = 0.0; // total rate
    double alpha2 = 0.0; // cause-1 proportion

    /// alpha1 = alpha2 = 1 - sqrt(1 - alpha).
    static AlphaSplit even(double alpha) {
        const double a = 1.0 - std::sqrt(1.0 - alpha);
        return {a, a};
    }
};

/// Trapezoid {A <= lambda1 + lambda2 <= B, C <= lambda1 / (lambda1 + lambda2) <= D}.
struct CredibleSet {
    double A = 0.0, B = 0.0, C = 0.0, D = 0.0;
    double level = 0.0;
    double area = 0.0;

    bool contains(const RateParams& r) const {
        const double u = r.total();
        if (!(u > 0.0)) return false;
        const double v = r.lambda1 / u;
        return A <= u && u <= B && C <= v && v <= D;
    }
};

inline double trapezoid_area(double A, double B, double C, double D) { return (B * B - A * A) * (D - C) / 2.0; }

inline CredibleSet credible_set(const BetaGammaParams& post, double alpha, AlphaSplit split, int M, Rng& rng) {
    post.validate();
    check_alpha(alpha);
    if (!(split.alpha1 > 0.0 && split.alpha1 < 1.0 && split.alpha2 > 0.0 && split.alpha2 < 1.0))
        throw std::invalid_argument("credible_set: alpha1 and alpha2 must lie in (0, 1)");
    if (std::fabs((1.0 - alpha) - (1.0 - split.alpha1) * (1.0 - split.alpha2)) > 1e-12)
        throw std::invalid_argument("credible_set: (1 - alpha) must equal (1 - alpha1)(1 - alpha2)");
    if (M < 2 || static_cast<double>(M) * std::min(split.alpha1, split.alpha2) < 1.0)
        throw std::invalid_argument("credible_set: need M * alpha_k >= 1 for both components");

    const auto m = static_cast<std::size_t>(M);
    std::vector<double> u(m), v(m);
    for (std::size_t i = 0; i < m; ++i) {
        const RateParams d = bg_sample(post, rng);
        u[i] = d.lambda1 + d.lambda2;
        v[i] = d.lambda1 / u[i];
        if (!std::isfinite(u[i]) || !std::isfinite(v[i]) || !(u[i] > 0.0))
            throw std::runtime_error("credible_set: degenerate posterior draw");
    }
    std::sort(u.begin(), u.end());
    std::sort(v.begin(), v.end());
    if (u.front() == u.back() || v.front() == v.back()) throw std::runtime_error("credible_set: degenerate draw set");

    const auto wu = detail::window_family(m, split.alpha1);
    const auto wv = detail::window_family(m, split.alpha2);
    const auto ju = detail::shortest_window(u, wu, [](double lo, double hi) { return hi * hi - lo * lo; });
    const auto jv = detail::shortest_window(v, wv, [](double lo, double hi) { return hi - lo; });

    CredibleSet cs;
    cs.A = u[ju];
    cs.B = u[ju + wu.offset];
    cs.C = v[jv];
    cs.D = v[jv + wv.offset];
    cs.level = (1.0 - split.alpha1) * (1.0 - split.alpha2);
    cs.area = trapezoid_area(cs.A, cs.B, cs.C, cs.D);
    return cs;
}

} // namespace hcr
