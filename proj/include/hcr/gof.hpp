#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace hcr {

struct KsResult {
    double statistic = 0.0;
    double p_value = 1.0;
    int n_points = 0;
    double fitted_rate = 0.0;
};

/// k / sum(times): the exponential MLE treating the times as a complete sample.
inline double fit_exponential_rate(const std::vector<double>& times) {
    if (times.empty()) throw std::invalid_argument("fit_exponential_rate: empty input");
    double sum = 0.0;
    for (double t : times) {
        if (!(t > 0.0) || !std::isfinite(t)) throw std::invalid_argument("fit_exponential_rate: times must be positive");
        sum += t;
    }
    return static_cast<double>(times.size()) / sum;
}

namespace detail {

class KsMatrix {
  public:
    explicit KsMatrix(int m) : m_(m), a_(static_cast<std::size_t>(m * m), 0.0) {}
    double& at(int i, int j) { return a_[static_cast<std::size_t>(i * m_ + j)]; }
    double at(int i, int j) const { return a_[static_cast<std::size_t>(i * m_ + j)]; }
    int size() const { return m_; }

    KsMatrix operator*(const KsMatrix& o) const {
        KsMatrix r(m_);
        for (int i = 0; i < m_; ++i)
            for (int k = 0; k < m_; ++k) {
                const double x = at(i, k);
                if (x == 0.0) continue;
                for (int j = 0; j < m_; ++j) r.at(i, j) += x * o.at(k, j);
            }
        return r;
    }

  private:
    int m_;
    std::vector<double> a_;
};

// Matrix power with a running base-10 exponent to avoid overflow.
inline void ks_power(const KsMatrix& h, int n, KsMatrix& out, int& exponent) {
    if (n == 1) {
        out = h;
        exponent = 0;
        return;
    }
    int e = 0;
    KsMatrix half(h.size());
    ks_power(h, n / 2, half, e);
    out = half * half;
    exponent = 2 * e;
    if (n % 2 == 1) out = h * out;
    const int k = h.size() / 2;
    if (out.at(k, k) > 1e140) {
        for (int i = 0; i < out.size(); ++i)
            for (int j = 0; j < out.size(); ++j) out.at(i, j) *= 1e-140;
        exponent += 140;
    }
}

} // namespace detail

/// P(D_n < d) for the two-sided one-sample statistic, by the method of
/// Marsaglia, Tsang and Wang (2003).
inline double ks_cdf(int n, double d) {
    if (n < 1) throw std::invalid_argument("ks_cdf: n must be positive");
    // D_n >= 1/(2n) always
    if (d <= 0.5 / n) return 0.0;
    if (d >= 1.0) return 1.0;
    const int k = static_cast<int>(n * d) + 1;
    const int m = 2 * k - 1;
    const double h = k - n * d;
    detail::KsMatrix H(m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) H.at(i, j) = i - j + 1 < 0 ? 0.0 : 1.0;
    for (int i = 0; i < m; ++i) {
        H.at(i, 0) -= std::pow(h, i + 1);
        H.at(m - 1, i) -= std::pow(h, m - i);
    }
    if (2.0 * h - 1.0 > 0.0) H.at(m - 1, 0) += std::pow(2.0 * h - 1.0, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            if (i - j + 1 > 0)
                for (int g = 1; g <= i - j + 1; ++g) H.at(i, j) /= g;

    detail::KsMatrix Q(m);
    int e = 0;
    detail::ks_power(H, n, Q, e);
    double s = Q.at(k - 1, k - 1);
    for (int i = 1; i <= n; ++i) {
        s = s * i / n;
        if (s < 1e-140) {
            s *= 1e140;
            e -= 140;
        }
    }
    return std::clamp(s * std::pow(10.0, e), 0.0, 1.0);
}

/// Two-sided K-S test of the times against Exponential(rate), with the exact
/// finite-sample p-value.
inline KsResult ks_test(std::vector<double> times, double rate) {
    if (!(rate > 0.0) || !std::isfinite(rate)) throw std::invalid_argument("ks_test: rate must be positive");
    if (times.empty()) throw std::invalid_argument("ks_test: empty input");
    for (double t : times)
        if (!(t > 0.0) || !std::isfinite(t)) throw std::invalid_argument("ks_test: times must be positive");
    std::sort(times.begin(), times.end());
    const auto n = static_cast<double>(times.size());
    double d = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        const double F = -std::expm1(-rate * times[i]);
        d = std::max({d, (i + 1) / n - F, F - i / n});
    }
    KsResult r;
    r.statistic = std::clamp(d, 0.0, 1.0);
    r.n_points = static_cast<int>(times.size());
    r.fitted_rate = rate;
    r.p_value = std::clamp(1.0 - ks_cdf(r.n_points, r.statistic), 0.0, 1.0);
    return r;
}

} // namespace hcr
