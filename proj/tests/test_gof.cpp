#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "hcr/gof.hpp"
#include "hcr/rng.hpp"

using namespace hcr;

namespace {

const std::vector<double> kMouseTimes = {0.10353, 0.11682, 0.18889, 0.30630, 3.15113, 3.35099, 4.22495, 4.83342,
                                         4.96100, 5.42323, 5.55983, 5.98183, 6.05396, 7.03899, 7.19843, 7.68960};

} // namespace

TEST(FitRate, SingleTime) { EXPECT_DOUBLE_EQ(fit_exponential_rate({2.0}), 0.5); }

TEST(FitRate, MouseTimes) { EXPECT_NEAR(fit_exponential_rate(kMouseTimes), 16 / 66.1829, 1e-9); }

TEST(FitRate, ScaleEquivariant) {
    std::vector<double> scaled = kMouseTimes;
    for (auto& t : scaled) t *= 3.5;
    EXPECT_NEAR(fit_exponential_rate(scaled), fit_exponential_rate(kMouseTimes) / 3.5, 1e-15);
}

TEST(FitRate, RejectsEmpty) { EXPECT_THROW(fit_exponential_rate({}), std::invalid_argument); }

TEST(KsTest, MouseDataCensoredRate) {
    // rate J / W from the censored likelihood
    const auto r = ks_test(kMouseTimes, 16 / 96.9413);
    EXPECT_NEAR(r.statistic, 0.28107, 1e-4);
    EXPECT_NEAR(r.p_value, 0.1306, 5e-4);
    EXPECT_EQ(r.n_points, 16);
}

TEST(KsTest, MouseDataCompleteSampleRate) {
    const auto r = ks_test(kMouseTimes, fit_exponential_rate(kMouseTimes));
    EXPECT_NEAR(r.statistic, 0.281, 0.01);
    EXPECT_NEAR(r.p_value, 0.13, 0.05);
}

TEST(KsTest, QuantilePointsGiveHalfStep) {
    const int n = 25;
    const double rate = 0.7;
    std::vector<double> t;
    for (int i = 1; i <= n; ++i) t.push_back(-std::log(1 - (i - 0.5) / n) / rate);
    EXPECT_NEAR(ks_test(t, rate).statistic, 0.5 / n, 1e-12);
}

TEST(KsTest, ScaleInvariant) {
    std::vector<double> scaled = kMouseTimes;
    for (auto& t : scaled) t *= 7.0;
    EXPECT_NEAR(ks_test(scaled, 0.2 / 7.0).statistic, ks_test(kMouseTimes, 0.2).statistic, 1e-14);
}

TEST(KsTest, RejectsBadInput) {
    EXPECT_THROW(ks_test(kMouseTimes, 0.0), std::invalid_argument);
    EXPECT_THROW(ks_test({}, 1.0), std::invalid_argument);
    EXPECT_THROW(ks_test({1.0, -2.0}, 1.0), std::invalid_argument);
}

TEST(KsCdf, KnownValues) {
    // n = 1: P(D < d) = 2d - 1 on [1/2, 1]
    EXPECT_NEAR(ks_cdf(1, 0.75), 0.5, 1e-12);
    EXPECT_EQ(ks_cdf(5, 0.05), 0.0);
    EXPECT_EQ(ks_cdf(5, 1.0), 1.0);
    // Marsaglia, Tsang and Wang's example: n = 10, d = 0.274 gives 0.6284796154565043
    EXPECT_NEAR(ks_cdf(10, 0.274), 0.6284796154565043, 1e-12);
}

TEST(KsCdf, PValueDecreasesInStatistic) {
    double prev = 1.0;
    for (int i = 1; i <= 60; ++i) {
        const double d = 0.035 + 0.015 * i;
        const double p = 1.0 - ks_cdf(16, d);
        EXPECT_LE(p, prev + 1e-15);
        prev = p;
    }
}

TEST(KsCdf, MatchesMonteCarloNullDistribution) {
    const int n = 16, N = 100000;
    Rng rng(12);
    std::vector<double> stats(N);
    std::vector<double> t(n);
    for (auto& s : stats) {
        for (auto& x : t) x = rng.exponential(1.0);
        s = ks_test(t, 1.0).statistic;
    }
    std::sort(stats.begin(), stats.end());
    for (double d : {0.15, 0.2, 0.28107, 0.35}) {
        const auto above = stats.end() - std::lower_bound(stats.begin(), stats.end(), d);
        EXPECT_NEAR(static_cast<double>(above) / N, 1.0 - ks_cdf(n, d), 0.01) << "d=" << d;
    }
}
