#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace hcr {

/// Neumaier's variant of Kahan summation. Order-insensitive enough that
/// callers do not have to sort terms by magnitude first.
template <typename Real>
class CompensatedSum {
  public:
    void add(Real x) {
        const Real t = sum_ + x;
        if (std::fabs(sum_) >= std::fabs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    CompensatedSum& operator+=(Real x) {
        add(x);
        return *this;
    }
    Real value() const { return sum_ + comp_; }

  private:
    Real sum_ = 0;
    Real comp_ = 0;
};

/// Rows 0..max_n of Pascal's triangle. Entries are exact in long double up to n = 66.
class BinomialTable {
  public:
    explicit BinomialTable(int max_n) : max_n_(max_n), rows_(static_cast<std::size_t>(max_n + 1)) {
        for (int m = 0; m <= max_n; ++m) {
            auto& row = rows_[static_cast<std::size_t>(m)];
            row.assign(static_cast<std::size_t>(m + 1), 1.0L);
            for (int k = 1; k < m; ++k) {
                const auto& prev = rows_[static_cast<std::size_t>(m - 1)];
                row[static_cast<std::size_t>(k)] = prev[static_cast<std::size_t>(k - 1)] + prev[static_cast<std::size_t>(k)];
            }
        }
    }

    long double operator()(int m, int k) const {
        if (k < 0 || k > m) return 0.0L;
        return rows_[static_cast<std::size_t>(m)][static_cast<std::size_t>(k)];
    }

    int max_n() const { return max_n_; }

  private:
    int max_n_;
    std::vector<std::vector<long double>> rows_;
};

namespace detail {

template <typename Real>
Real gamma_series_p(Real a, Real x) {
    // P(a, x) = x^a e^{-x} / Gamma(a+1) * sum_k x^k / ((a+1)...(a+k))
    Real term = 1 / a;
    Real sum = term;
    for (int k = 1; k < 100000; ++k) {
        term *= x / (a + k);
        sum += term;
        if (std::fabs(term) < std::fabs(sum) * std::numeric_limits<Real>::epsilon()) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

template <typename Real>
Real gamma_cf_q(Real a, Real x) {
    // Modified Lentz evaluation of the Legendre continued fraction.
    const Real tiny = std::numeric_limits<Real>::min() / std::numeric_limits<Real>::epsilon();
    const Real eps = std::numeric_limits<Real>::epsilon();
    Real b = x + 1 - a;
    Real c = 1 / tiny;
    Real d = 1 / b;
    Real h = d;
    for (int i = 1; i < 100000; ++i) {
        const Real an = -i * (i - a);
        b += 2;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1 / d;
        const Real delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1) < eps) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

} // namespace detail

/// Upper regularized incomplete gamma Q(a, x) = Gamma(a, x) / Gamma(a).
/// Series below x = a + 1, continued fraction above.
template <typename Real = double>
Real regularized_gamma_q(Real a, Real x) {
    if (!(a > 0)) throw std::invalid_argument("regularized_gamma_q: shape must be positive");
    if (x <= 0) return 1;
    if (x < a + 1) return 1 - detail::gamma_series_p(a, x);
    return detail::gamma_cf_q(a, x);
}

template <typename Real = double>
Real regularized_gamma_p(Real a, Real x) {
    if (!(a > 0)) throw std::invalid_argument("regularized_gamma_p: shape must be positive");
    if (x <= 0) return 0;
    if (x < a + 1) return detail::gamma_series_p(a, x);
    return 1 - detail::gamma_cf_q(a, x);
}

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

/// Standard normal quantile. Acklam's rational approximation followed by one
/// Halley step against erfc, which brings it to full double precision.
inline double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("normal_quantile: p must lie in (0, 1)");
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                                   1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                                   6.680131188771972e+01,  -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                                   -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                                   3.754408661907416e+00};
    constexpr double p_low = 0.02425;

    double x;
    if (p < p_low) {
        const double q = std::sqrt(-2 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
    } else if (p <= 1 - p_low) {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
    } else {
        const double q = std::sqrt(-2 * std::log1p(-p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
    }

    const double e = normal_cdf(x) - p;
    const double u = e * std::sqrt(2 * std::numbers::pi) * std::exp(x * x / 2);
    return x - u / (1 + x * u / 2);
}

} // namespace hcr
