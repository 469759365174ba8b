#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "hcr/intervals.hpp"
#include "hcr/roots.hpp"

using namespace hcr;

namespace {

SufficientStats mouse_stats() {
    SufficientStats s;
    s.censoring = CensoringCase::CaseI;
    s.J = 16;
    s.D1 = 7;
    s.D2 = 9;
    s.W = 96.9413;
    return s;
}

const Design kMouseDesign{20, 16, 5.6};

} // namespace

TEST(Roots, BrentAndBisectionFindTheSameRoot) {
    auto f = [](double x) { return std::exp(-x) - 0.3; };
    const auto br = bracket_positive(f, 0.1, /*increasing=*/false);
    ASSERT_TRUE(br.has_value());
    const auto b = brent_root(f, *br, 1e-12);
    const auto s = bisect_root(f, *br, 1e-12);
    EXPECT_TRUE(b.converged);
    EXPECT_NEAR(b.root, -std::log(0.3), 1e-10);
    EXPECT_NEAR(s.root, -std::log(0.3), 1e-10);
    EXPECT_LT(b.evaluations, s.evaluations);
}

TEST(Roots, BracketFailsWithoutSignChange) {
    auto f = [](double) { return 1.0; };
    EXPECT_FALSE(bracket_positive(f, 1.0, true, 2.0, 10).has_value());
}

TEST(AsymptoticCi, MouseData) {
    const auto s = mouse_stats();
    const auto c1 = asymptotic_ci(s, 0.05, Cause::One);
    const auto c2 = asymptotic_ci(s, 0.05, Cause::Two);
    // lambda_hat -/+ 1.959964 sqrt(D) / W
    EXPECT_NEAR(c1.lower, 7 / 96.9413 - 1.959963985 * std::sqrt(7.0) / 96.9413, 1e-9);
    EXPECT_NEAR(c1.upper, 7 / 96.9413 + 1.959963985 * std::sqrt(7.0) / 96.9413, 1e-9);
    EXPECT_NEAR(c2.lower, 9 / 96.9413 - 1.959963985 * 3.0 / 96.9413, 1e-9);
    EXPECT_EQ(c1.method, IntervalMethod::Asymptotic);
}

TEST(AsymptoticCi, ClampsOnRequest) {
    SufficientStats s;
    s.J = 3;
    s.D1 = 1;
    s.D2 = 2;
    s.W = 2.0;
    const auto raw = asymptotic_ci(s, 0.05, Cause::One);
    EXPECT_LT(raw.lower, 0.0);
    EXPECT_FALSE(raw.clamped);
    const auto cl = asymptotic_ci(s, 0.05, Cause::One, true);
    EXPECT_EQ(cl.lower, 0.0);
    EXPECT_TRUE(cl.clamped);
}

TEST(AsymptoticCi, ZeroCountHasNoInterval) {
    SufficientStats s;
    s.J = 3;
    s.D1 = 0;
    s.D2 = 3;
    s.W = 2.0;
    EXPECT_THROW(asymptotic_ci(s, 0.05, Cause::One), NoAsymptoticInterval);
}

TEST(ExactCi, MouseData) {
    const auto s = mouse_stats();
    const auto c1 = exact_ci(s, kMouseDesign, 0.05, Cause::One);
    const auto c2 = exact_ci(s, kMouseDesign, 0.05, Cause::Two);
    EXPECT_NEAR(c1.lower, 0.03027, 0.002);
    EXPECT_NEAR(c1.upper, 0.14048, 0.002);
    EXPECT_NEAR(c2.lower, 0.04344, 0.002);
    EXPECT_NEAR(c2.upper, 0.16699, 0.002);
    // roots of the high-precision closed form
    EXPECT_NEAR(c1.lower, 0.030287, 2e-6);
    EXPECT_NEAR(c1.upper, 0.140461, 2e-6);
    EXPECT_NEAR(c2.lower, 0.043439, 2e-6);
    EXPECT_NEAR(c2.upper, 0.167039, 2e-6);
}

TEST(ExactCi, EndpointsSolveTheDefiningEquations) {
    const auto s = mouse_stats();
    const auto c = exact_ci(s, kMouseDesign, 0.1, Cause::One);
    const double obs = 7 / 96.9413;
    const double other = 9 / 96.9413;
    EXPECT_NEAR(estimator_cdf(obs, {c.lower, other}, kMouseDesign), 0.95, 1e-6);
    EXPECT_NEAR(estimator_cdf(obs, {c.upper, other}, kMouseDesign), 0.05, 1e-6);
}

TEST(ExactCi, NarrowsAsLevelDrops) {
    const auto s = mouse_stats();
    const auto w95 = exact_ci(s, kMouseDesign, 0.05, Cause::Two);
    const auto w80 = exact_ci(s, kMouseDesign, 0.20, Cause::Two);
    EXPECT_LT(w95.lower, w80.lower);
    EXPECT_GT(w95.upper, w80.upper);
}

TEST(ExactCi, DegenerateCountThrows) {
    SufficientStats s;
    s.J = 8;
    s.D1 = 0;
    s.D2 = 8;
    s.W = 5.0;
    EXPECT_THROW(exact_ci(s, {10, 8, 1.2}, 0.05, Cause::Two), DegenerateCount);
    EXPECT_THROW(exact_ci(s, {10, 8, 1.2}, 1.5, Cause::Two), std::invalid_argument);
}

TEST(ZeroCountRegion, BoundaryHasTheRequiredProbability) {
    const Design d{10, 8, 1.2};
    const auto region = zero_count_region(d, 0.05, Cause::One);
    const double b = region.boundary_at(1.3);
    EXPECT_NEAR(prob_no_cause1({b, 1.3}, d), 0.95, 1e-10);
    EXPECT_TRUE(region.contains({0.5 * b, 1.3}));
    EXPECT_FALSE(region.contains({2.0 * b, 1.3}));
    EXPECT_EQ(region.boundary_at(0.0), 0.0);
    const auto curve = region.boundary({0.5, 1.0, 2.0});
    ASSERT_EQ(curve.size(), 3u);
    // with more competing failures the region admits larger rates
    EXPECT_LT(curve[0].second, curve[2].second);
}

TEST(ZeroCountRegion, MedianZeroRate) {
    const Design d{10, 8, 1.2};
    const double m = solve_median_zero_rate(1.3, d, Cause::One);
    EXPECT_NEAR(prob_no_cause1({m, 1.3}, d), 0.5, 1e-10);
    EXPECT_THROW(solve_median_zero_rate(0.0, d, Cause::One), std::invalid_argument);
}

TEST(Bootstrap, FitReplacesZeroCountRate) {
    SufficientStats s;
    s.J = 8;
    s.D1 = 0;
    s.D2 = 8;
    s.W = 6.0;
    const Design d{10, 8, 1.2};
    const auto fit = bootstrap_fit(s, d);
    EXPECT_DOUBLE_EQ(fit.lambda2, 8 / 6.0);
    EXPECT_GT(fit.lambda1, 0.0);
    EXPECT_NEAR(prob_no_cause1(fit, d), 0.5, 1e-10);
}

TEST(Bootstrap, MouseData) {
    const auto b = bootstrap_ci(mouse_stats(), kMouseDesign, 0.05, 5000, 11);
    EXPECT_NEAR(b.lambda1.lower, 0.0308, 0.01);
    EXPECT_NEAR(b.lambda1.upper, 0.1476, 0.01);
    EXPECT_NEAR(b.lambda2.lower, 0.0458, 0.01);
    EXPECT_NEAR(b.lambda2.upper, 0.1791, 0.01);
    EXPECT_TRUE(std::is_sorted(b.replicates1.begin(), b.replicates1.end()));
    EXPECT_EQ(b.replicates1.size(), 5000u);
}

TEST(Bootstrap, IndependentOfThreadCount) {
    const auto a = bootstrap_ci(mouse_stats(), kMouseDesign, 0.05, 400, 5, 1);
    const auto b = bootstrap_ci(mouse_stats(), kMouseDesign, 0.05, 400, 5, 4);
    EXPECT_EQ(a.replicates1, b.replicates1);
    EXPECT_EQ(a.replicates2, b.replicates2);
    EXPECT_EQ(a.lambda1.lower, b.lambda1.lower);
}

TEST(Bootstrap, RejectsTooFewResamples) {
    EXPECT_THROW(bootstrap_ci(mouse_stats(), kMouseDesign, 0.05, 50, 1), std::invalid_argument);
}

TEST(Bootstrap, EmpiricalQuantileUsesCeilingRank) {
    const std::vector<double> v = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    EXPECT_EQ(detail::empirical_quantile(v, 0.25), 3.0);
    EXPECT_EQ(detail::empirical_quantile(v, 0.3), 3.0);
    EXPECT_EQ(detail::empirical_quantile(v, 0.0), 1.0);
    EXPECT_EQ(detail::empirical_quantile(v, 1.0), 10.0);
}
