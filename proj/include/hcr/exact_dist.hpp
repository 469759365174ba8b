#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iostream>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "hcr/special.hpp"
#include "hcr/types.hpp"

namespace hcr {

/// Gamma(shape, rate) translated to start at mu.
struct ShiftedGammaParams {
    double mu = 0.0;
    double shape = 1.0;
    double rate = 1.0;

    void validate() const {
        if (!(shape > 0.0) || !(rate > 0.0))
            throw std::invalid_argument("shifted gamma: shape and rate must be positive");
    }
};

inline double shifted_gamma_pdf(double x, const ShiftedGammaParams& p) {
    p.validate();
    if (!(x > p.mu)) return 0.0;
    const double t = x - p.mu;
    return std::exp(p.shape * std::log(p.rate) - std::lgamma(p.shape) + (p.shape - 1) * std::log(t) - p.rate * t);
}

inline double shifted_gamma_sf(double x, const ShiftedGammaParams& p) {
    p.validate();
    if (!(x > p.mu)) return 1.0;
    return regularized_gamma_q<double>(p.shape, p.rate * (x - p.mu));
}

/// Largest n for which the closed forms are evaluated. Binomial coefficients
/// stay exact in long double up to this size.
inline constexpr int kMaxExactN = 66;
/// Above this n the alternating sums start losing digits; a warning is printed once.
inline constexpr int kExactWarnN = 60;

namespace detail {

inline const BinomialTable& binomials() {
    static const BinomialTable table(kMaxExactN);
    return table;
}

inline void check_exact_design(const Design& design) {
    design.validate();
    if (design.n > kMaxExactN)
        throw std::invalid_argument("exact distribution: n = " + std::to_string(design.n) + " exceeds the supported maximum " +
                                    std::to_string(kMaxExactN));
    if (design.n > kExactWarnN) {
        static std::atomic<bool> warned{false};
        if (!warned.exchange(true))
            std::clog << "hcr: warning: exact distribution with n > " << kExactWarnN
                      << " may lose accuracy to cancellation in the alternating sums\n";
    }
}

inline void check_rates(const RateParams& rates) {
    if (!(rates.lambda1 >= 0.0) || !(rates.lambda2 >= 0.0) || !std::isfinite(rates.lambda1) ||
        !std::isfinite(rates.lambda2))
        throw std::invalid_argument("exact distribution: rates must be finite and nonnegative");
    if (!(rates.total() > 0.0)) throw std::invalid_argument("exact distribution: both rates are zero");
}

// sum_{m=0}^{k-1} z^m / m!
inline long double poisson_head(int k, long double z) {
    long double r = 1.0L;
    for (int m = k - 1; m >= 1; --m) r = 1.0L + r * z / m;
    return r;
}

// Beyond this exponent e^{-z} underflows in long double and every
// continuous-part term is negligible.
inline constexpr long double kExpCutoff = 11000.0L;

/// Evaluates the point mass at zero and the absolutely continuous part of the
/// law of the estimator of the cause whose rate is rates.lambda1.
///
/// Every shifted gamma survival term has integer shape k and argument
/// z = lambda*i*y - T*lambda*m, so e^{-T lambda m} Q(k, z) = e^{-lambda i y} sum_{r<k} z^r/r!.
/// The common exponential is computed once per i.
class MixtureEvaluator {
  public:
    MixtureEvaluator(const RateParams& rates, const Design& design) : design_(design) {
        check_exact_design(design);
        check_rates(rates);
        lambda_ = static_cast<long double>(rates.lambda1) + rates.lambda2;
        p_ = rates.lambda1 / lambda_;
        q_ = rates.lambda2 / lambda_;
        u_ = static_cast<long double>(design.T) * lambda_;
        const int n = design.n;
        exp_neg_u_.resize(static_cast<std::size_t>(2 * n + 2));
        for (std::size_t m = 0; m < exp_neg_u_.size(); ++m) exp_neg_u_[m] = std::exp(-u_ * static_cast<long double>(m));
        pow_p_.resize(static_cast<std::size_t>(n + 1));
        pow_q_.resize(static_cast<std::size_t>(n + 1));
        for (int k = 0; k <= n; ++k) {
            pow_p_[static_cast<std::size_t>(k)] = std::pow(p_, static_cast<long double>(k));
            pow_q_[static_cast<std::size_t>(k)] = std::pow(q_, static_cast<long double>(k));
        }
        point_mass_ = compute_point_mass();
    }

    long double point_mass() const { return point_mass_; }

    /// P(0 < estimator <= x), unconditional.
    long double continuous_cdf(double x) const { return accumulate(x, false); }

    /// Density of the continuous part, unconditional (integrates to 1 - point mass).
    long double continuous_density(double x) const { return accumulate(x, true); }

  private:
    long double compute_point_mass() const {
        const auto& C = binomials();
        const int n = design_.n;
        const int R = design_.R;
        const long double fail = -std::expm1(-u_);
        CompensatedSum<long double> sum;
        for (int i = 0; i <= n; ++i) {
            const long double w = C(n, i) * std::pow(fail, static_cast<long double>(i)) *
                                  exp_neg_u_[static_cast<std::size_t>(n - i)];
            sum += w * pow_q_[static_cast<std::size_t>(i < R ? R : i)];
        }
        return sum.value();
    }

    long double accumulate(double x, bool density) const {
        if (!(x > 0.0)) return 0.0L;
        if (p_ == 0.0L) return 0.0L;
        const auto& C = binomials();
        const int n = design_.n;
        const int R = design_.R;
        const long double y = 1.0L / static_cast<long double>(x);

        CompensatedSum<long double> total;
        for (int i = 1; i <= n; ++i) {
            const long double zi = lambda_ * i * y;
            const bool negligible = zi > kExpCutoff;
            const long double common = negligible ? 0.0L : std::exp(-zi);
            // d/dx of F_bar(1/x) brings (1/x^2) * rate_i * density kernel.
            const long double jac = density ? lambda_ * i * y * y : 0.0L;

            // Case I, requires i <= R.
            if (i <= R) {
                CompensatedSum<long double> inner;
                for (int s = 0; s <= R - 1; ++s) {
                    const int m = n - R + 1 + s;
                    const long double z = zi - u_ * m;
                    const long double coef = C(R - 1, s) * ((s % 2) ? -1.0L : 1.0L) / m;
                    inner += coef * kernel(R, z, common, m, density, negligible);
                }
                const long double w = n * C(n - 1, R - 1) * C(R, i) * pow_p_[static_cast<std::size_t>(i)] *
                                      pow_q_[static_cast<std::size_t>(R - i)];
                total += w * inner.value() * (density ? jac : 1.0L);
            }

            // Case II with J = j >= max(R, i).
            for (int j = std::max(R, i); j <= n; ++j) {
                CompensatedSum<long double> inner;
                for (int s = 0; s <= j; ++s) {
                    const int m = n - j + s;
                    const long double z = zi - u_ * m;
                    const long double coef = C(j, s) * ((s % 2) ? -1.0L : 1.0L);
                    inner += coef * kernel(j, z, common, m, density, negligible);
                }
                const long double w = C(n, j) * C(j, i) * pow_p_[static_cast<std::size_t>(i)] *
                                      pow_q_[static_cast<std::size_t>(j - i)];
                total += w * inner.value() * (density ? jac : 1.0L);
            }
        }
        return total.value();
    }

    // e^{-u m} * F_bar for the cdf, or e^{-u m} * kernel of f_G (without the
    // Jacobian) for the density.
    long double kernel(int shape, long double z, long double common, int m, bool density, bool negligible) const {
        if (density) {
            if (z <= 0.0L || negligible) return 0.0L;
            // z^{k-1}/(k-1)! * e^{-z} * e^{-u m} = common * z^{k-1}/(k-1)!
            return common * std::exp((shape - 1) * std::log(z) - std::lgamma(static_cast<long double>(shape)));
        }
        if (z <= 0.0L) return exp_neg_u_[static_cast<std::size_t>(m)];
        if (negligible) return 0.0L;
        return common * poisson_head(shape, z);
    }

    Design design_;
    long double lambda_ = 0, p_ = 0, q_ = 0, u_ = 0;
    long double point_mass_ = 0;
    std::vector<long double> exp_neg_u_, pow_p_, pow_q_;
};

// Individual terms in the form they are written down in the derivation of
// the distribution. Slow; used to cross-check MixtureEvaluator.

inline double c_term(int i, const RateParams& rates, const Design& design) {
    const auto& C = binomials();
    const double lam = rates.total();
    const double q = rates.lambda2 / lam;
    const int n = design.n;
    const double base = static_cast<double>(C(n, i)) * std::pow(1 - std::exp(-design.T * lam), i) *
                        std::exp(-(n - i) * design.T * lam);
    return base * std::pow(q, i < design.R ? design.R : i);
}

inline double cs_term(int i, int s, double x, const RateParams& rates, const Design& design) {
    const auto& C = binomials();
    const double lam = rates.total();
    const double p = rates.lambda1 / lam;
    const double q = rates.lambda2 / lam;
    const int n = design.n;
    const int R = design.R;
    const double coef = n * static_cast<double>(C(n - 1, R - 1) * C(R - 1, s) * C(R, i)) * std::pow(p, i) *
                        std::pow(q, R - i) * ((s % 2) ? -1.0 : 1.0) / (n - R + s + 1) *
                        std::exp(-design.T * lam * (n - R + 1 + s));
    if (!(x > 0.0)) return 0.0;
    return coef * shifted_gamma_sf(1.0 / x, {design.T / i * (n - R + s + 1), static_cast<double>(R), i * lam});
}

inline double d_term(int j, int i, int s, double x, const RateParams& rates, const Design& design) {
    const auto& C = binomials();
    const double lam = rates.total();
    const double p = rates.lambda1 / lam;
    const double q = rates.lambda2 / lam;
    const int n = design.n;
    const double coef = static_cast<double>(C(n, j) * C(j, i) * C(j, s)) * std::pow(p, i) * std::pow(q, j - i) *
                        ((s % 2) ? -1.0 : 1.0) * std::exp(-design.T * lam * (n - j + s));
    if (!(x > 0.0)) return 0.0;
    return coef * shifted_gamma_sf(1.0 / x, {design.T / i * (n - j + s), static_cast<double>(j), i * lam});
}

} // namespace detail

/// P(D = 0) for the count of cause `cause`.
inline double prob_zero_count(const RateParams& rates, const Design& design, Cause cause) {
    detail::check_exact_design(design);
    detail::check_rates(rates);
    const RateParams r = rates.oriented(cause);
    if (r.lambda1 == 0.0) return 1.0;
    return static_cast<double>(detail::MixtureEvaluator(r, design).point_mass());
}

inline double prob_no_cause1(const RateParams& rates, const Design& design) {
    return prob_zero_count(rates, design, Cause::One);
}

/// P(estimator of `cause` <= x): point mass at zero plus a signed mixture
/// of shifted gamma survival functions evaluated at 1/x.
inline double estimator_cdf(double x, const RateParams& rates, const Design& design, Cause cause = Cause::One) {
    if (!(x >= 0.0)) throw std::invalid_argument("estimator_cdf: x must be nonnegative");
    detail::check_rates(rates);
    detail::check_exact_design(design);
    const RateParams r = rates.oriented(cause);
    if (r.lambda1 == 0.0) return 1.0;
    const detail::MixtureEvaluator ev(r, design);
    if (x == 0.0) return static_cast<double>(ev.point_mass());
    if (std::isinf(x)) return 1.0;
    const long double v = ev.point_mass() + ev.continuous_cdf(x);
    return static_cast<double>(std::clamp(v, 0.0L, 1.0L));
}

/// Density of the estimator of `cause` given that its count is positive.
inline double estimator_conditional_pdf(double x, const RateParams& rates, const Design& design,
                                        Cause cause = Cause::One) {
    if (!(x > 0.0)) throw std::invalid_argument("estimator_conditional_pdf: x must be positive");
    detail::check_rates(rates);
    detail::check_exact_design(design);
    const RateParams r = rates.oriented(cause);
    if (r.lambda1 == 0.0) throw std::invalid_argument("estimator_conditional_pdf: count is zero with probability one");
    const detail::MixtureEvaluator ev(r, design);
    if (std::isinf(x)) return 0.0;
    const long double positive = 1.0L - ev.point_mass();
    const long double f = ev.continuous_density(x) / positive;
    return f < 0.0L ? 0.0 : static_cast<double>(f);
}

} // namespace hcr
