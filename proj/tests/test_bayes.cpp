#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "hcr/bayes.hpp"
#include "hcr/gof.hpp"

using namespace hcr;

namespace {

SufficientStats mouse_stats() {
    SufficientStats s;
    s.censoring = CensoringCase::CaseI;
    s.J = 16;
    s.D1 = 7;
    s.D2 = 9;
    s.W = 96.94137;
    return s;
}

struct Moments {
    double mean1 = 0, var1 = 0, mean2 = 0, var2 = 0, cov = 0;
    double se_var1 = 0, se_var2 = 0; // standard errors of var1, var2
};

Moments sample_moments(const BetaGammaParams& p, int N, std::uint64_t seed) {
    Rng rng(seed);
    double s1 = 0, s2 = 0, s11 = 0, s22 = 0, s12 = 0;
    for (int i = 0; i < N; ++i) {
        const auto d = bg_sample(p, rng);
        s1 += d.lambda1;
        s2 += d.lambda2;
        s11 += d.lambda1 * d.lambda1;
        s22 += d.lambda2 * d.lambda2;
        s12 += d.lambda1 * d.lambda2;
    }
    Moments m;
    m.mean1 = s1 / N;
    m.mean2 = s2 / N;
    m.var1 = s11 / N - m.mean1 * m.mean1;
    m.var2 = s22 / N - m.mean2 * m.mean2;
    m.cov = s12 / N - m.mean1 * m.mean2;
    // second pass for the fourth central moments
    Rng again(seed);
    double q1 = 0, q2 = 0;
    for (int i = 0; i < N; ++i) {
        const auto d = bg_sample(p, again);
        q1 += std::pow(d.lambda1 - m.mean1, 4);
        q2 += std::pow(d.lambda2 - m.mean2, 4);
    }
    m.se_var1 = std::sqrt((q1 / N - m.var1 * m.var1) / N);
    m.se_var2 = std::sqrt((q2 / N - m.var2 * m.var2) / N);
    return m;
}

} // namespace

TEST(BetaGamma, IndependenceCaseMoments) {
    // a0 = a1 + a2 makes lambda1, lambda2 independent Gamma(a_i, b0)
    const BetaGammaParams p{2.0, 3.0, 1.0, 2.0};
    const auto m = bg_mean_var(p, Cause::One);
    EXPECT_DOUBLE_EQ(m.mean, 0.5);
    EXPECT_NEAR(m.variance, 0.25, 1e-15);
    const auto m2 = bg_mean_var(p, Cause::Two);
    EXPECT_DOUBLE_EQ(m2.mean, 1.0);
    EXPECT_NEAR(m2.variance, 0.5, 1e-15);
}

TEST(BetaGamma, SymmetricShapesGiveEqualMeans) {
    const BetaGammaParams p{1.5, 4.0, 2.5, 2.5};
    EXPECT_DOUBLE_EQ(bg_mean_var(p, Cause::One).mean, bg_mean_var(p, Cause::Two).mean);
}

TEST(BetaGamma, RejectsNonpositiveParameters) {
    EXPECT_THROW(bg_mean_var({0.0, 1, 1, 1}, Cause::One), std::invalid_argument);
    EXPECT_THROW(bg_mean_var({1, 1, -1, 1}, Cause::One), std::invalid_argument);
}

TEST(BetaGamma, SamplerMomentsMatchClosedForm) {
    const int N = 1000000;
    for (const BetaGammaParams& p : {BetaGammaParams{1.7, 5.0, 1.2, 3.4}, BetaGammaParams{0.5, 0.8, 2.0, 0.6}}) {
        const auto m = sample_moments(p, N, 3);
        const auto c1 = bg_mean_var(p, Cause::One);
        const auto c2 = bg_mean_var(p, Cause::Two);
        EXPECT_NEAR(m.mean1, c1.mean, 4 * std::sqrt(c1.variance / N));
        EXPECT_NEAR(m.mean2, c2.mean, 4 * std::sqrt(c2.variance / N));
        EXPECT_NEAR(m.var1, c1.variance, 4 * m.se_var1);
        EXPECT_NEAR(m.var2, c2.variance, 4 * m.se_var2);
    }
}

TEST(BetaGamma, TotalRateHasGammaMean) {
    const BetaGammaParams p{2.5, 6.0, 1.0, 1.0};
    const int N = 1000000;
    Rng rng(17);
    double s = 0;
    for (int i = 0; i < N; ++i) s += bg_sample(p, rng).total();
    // Gamma(6, 2.5): mean 2.4, variance 0.96
    EXPECT_NEAR(s / N, 2.4, 4 * std::sqrt(0.96 / N));
}

TEST(BetaGamma, ProportionIsBetaDistributed) {
    const BetaGammaParams p{1.0, 2.0, 2.0, 3.0};
    Rng rng(23);
    std::vector<double> v(5000);
    for (auto& x : v) {
        const auto d = bg_sample(p, rng);
        x = d.lambda1 / d.total();
    }
    // Beta(2, 3) cdf: 1 - (1-x)^3 (1 + 3x)
    std::sort(v.begin(), v.end());
    double D = 0;
    const double n = static_cast<double>(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double F = 1 - std::pow(1 - v[i], 3) * (1 + 3 * v[i]);
        D = std::max({D, (i + 1) / n - F, F - i / n});
    }
    EXPECT_GT(1.0 - ks_cdf(static_cast<int>(v.size()), D), 0.01);
}

TEST(BetaGamma, TotalAndProportionUncorrelated) {
    const BetaGammaParams p{1.0, 3.0, 2.0, 1.5};
    const int M = 200000;
    Rng rng(5);
    double su = 0, sv = 0, suu = 0, svv = 0, suv = 0;
    for (int i = 0; i < M; ++i) {
        const auto d = bg_sample(p, rng);
        const double u = d.total(), v = d.lambda1 / u;
        EXPECT_GT(d.lambda1, 0.0);
        EXPECT_GT(d.lambda2, 0.0);
        su += u;
        sv += v;
        suu += u * u;
        svv += v * v;
        suv += u * v;
    }
    const double cov = suv / M - su / M * sv / M;
    const double r = cov / std::sqrt((suu / M - su * su / M / M) * (svv / M - sv * sv / M / M));
    EXPECT_LT(std::fabs(r), 4 / std::sqrt(static_cast<double>(M)));
}

TEST(BetaGamma, CorrelationSignDependsOnShapes) {
    // sign of cov is the sign of (1 + 1/a0)(a1 + a2)/(a1 + a2 + 1) - 1
    const auto pos = sample_moments({1.0, 0.5, 5.0, 5.0}, 200000, 8);
    const auto neg = sample_moments({1.0, 20.0, 1.0, 1.0}, 200000, 9);
    EXPECT_GT(pos.cov, 0.0);
    EXPECT_LT(neg.cov, 0.0);
}

TEST(Posterior, NoDataReturnsPrior) {
    const BetaGammaParams prior{2.3, 1.0, 1.0, 1.3};
    EXPECT_EQ(posterior(prior, SufficientStats{}), prior);
}

TEST(Posterior, MouseDataNoninformative) {
    const auto post = posterior(noninformative_prior(), mouse_stats());
    EXPECT_NEAR(post.b0, 96.94237, 1e-9);
    EXPECT_DOUBLE_EQ(post.a0, 16.001);
    EXPECT_DOUBLE_EQ(post.a1, 7.001);
    EXPECT_DOUBLE_EQ(post.a2, 9.001);
    const auto est = bayes_point_estimates(post);
    EXPECT_NEAR(est.est1, 0.07221, 1e-4);
    EXPECT_NEAR(est.est2, 0.09284, 1e-4);
    EXPECT_NEAR(est.est1, 7 / 96.94137, 1e-3 * est.est1);
}

TEST(Posterior, MouseDataWithPrintedInformativeHyperparameters) {
    const auto est = bayes_point_estimates(posterior({2.3, 1.0, 1.0, 1.3}, mouse_stats()));
    EXPECT_NEAR(est.est1, 136.0 / (99.24137 * 18.3), 1e-12);
}

TEST(Posterior, ComposesAcrossBatches) {
    const BetaGammaParams prior{0.7, 1.5, 0.9, 2.2};
    SufficientStats a, b, both;
    a.J = 5;
    a.D1 = 2;
    a.D2 = 3;
    a.W = 4.25;
    b.J = 7;
    b.D1 = 4;
    b.D2 = 3;
    b.W = 2.5;
    both.J = 12;
    both.D1 = 6;
    both.D2 = 6;
    both.W = 6.75;
    EXPECT_EQ(posterior(posterior(prior, a), b), posterior(prior, both));
}

TEST(Posterior, NoDataEstimatesArePriorMeans) {
    const BetaGammaParams prior{2.0, 3.0, 1.0, 2.0};
    const auto est = bayes_point_estimates(posterior(prior, SufficientStats{}));
    EXPECT_DOUBLE_EQ(est.est1, bg_mean_var(prior, Cause::One).mean);
    EXPECT_DOUBLE_EQ(est.var2, bg_mean_var(prior, Cause::Two).variance);
}

TEST(Posterior, MeanMatchesQuadrature) {
    // density of BG(b0, a0, a1, a2) up to a constant:
    // (l1 + l2)^{a0 - a1 - a2} l1^{a1 - 1} l2^{a2 - 1} e^{-b0 (l1 + l2)}
    const BetaGammaParams p{3.0, 6.0, 2.5, 3.5};
    const int m = 800;
    const double L = 12.0, h = L / m;
    auto w = [&](int i) { return (i == 0 || i == m) ? 1.0 : (i % 2 ? 4.0 : 2.0); };
    double z = 0, m1 = 0, m2 = 0;
    for (int i = 0; i <= m; ++i)
        for (int j = 0; j <= m; ++j) {
            const double l1 = i * h, l2 = j * h;
            if (l1 == 0 || l2 == 0) continue;
            const double f = std::pow(l1 + l2, p.a0 - p.a1 - p.a2) * std::pow(l1, p.a1 - 1) * std::pow(l2, p.a2 - 1) *
                             std::exp(-p.b0 * (l1 + l2)) * w(i) * w(j);
            z += f;
            m1 += l1 * f;
            m2 += l2 * f;
        }
    EXPECT_NEAR(m1 / z, bg_mean_var(p, Cause::One).mean, 1e-4);
    EXPECT_NEAR(m2 / z, bg_mean_var(p, Cause::Two).mean, 1e-4);
}

TEST(MonteCarlo, RateFunctionalMatchesClosedForm) {
    const auto post = posterior(noninformative_prior(), mouse_stats());
    Rng rng(31);
    const int M = 20000;
    const auto s = mc_estimate_g(post, [](double l1, double) { return l1; }, M, 0.05, rng);
    const auto c = bg_mean_var(post, Cause::One);
    EXPECT_NEAR(s.estimate, c.mean, 4 * std::sqrt(c.variance / M));
}

TEST(MonteCarlo, ProportionMeanIsBetaMean) {
    const auto post = posterior(noninformative_prior(), mouse_stats());
    Rng rng(32);
    const int M = 20000;
    const auto s = mc_estimate_g(post, [](double l1, double l2) { return l1 / (l1 + l2); }, M, 0.05, rng);
    const double a = 7.001, b = 9.001;
    const double var = a * b / ((a + b) * (a + b) * (a + b + 1));
    EXPECT_NEAR(s.estimate, a / (a + b), 4 * std::sqrt(var / M));
}

TEST(MonteCarlo, HpdNeverLongerThanSymmetric) {
    Rng rng(41);
    for (const BetaGammaParams& p : {BetaGammaParams{1, 2, 1, 1}, BetaGammaParams{50, 16, 7, 9}, BetaGammaParams{2, 0.8, 0.5, 3}}) {
        for (double alpha : {0.05, 0.1, 0.3}) {
            const auto s = mc_estimate_g(p, [](double l1, double) { return l1; }, 3000, alpha, rng);
            EXPECT_LE(s.hpd.length(), s.symmetric.length());
            EXPECT_LE(s.hpd.lower, s.hpd.upper);
        }
    }
}

TEST(MonteCarlo, WindowFamilyIndexing) {
    // values 1..10, alpha = 0.2: offset 8, starts j = 1, 2
    std::vector<double> v = {1, 2, 3, 4, 5, 6, 7, 8, 9, 30};
    const auto s = summarize_draws(v, 0.2);
    EXPECT_EQ(s.hpd.lower, 1.0);
    EXPECT_EQ(s.hpd.upper, 9.0);
    EXPECT_EQ(s.symmetric.lower, 1.0);
    EXPECT_EQ(s.symmetric.upper, 9.0);
    // ties resolve to the smallest start
    const auto t = summarize_draws({1, 2, 3, 4, 5, 6, 7, 8, 9, 10}, 0.2);
    EXPECT_EQ(t.hpd.lower, 1.0);
}

TEST(MonteCarlo, RejectsBadInput) {
    Rng rng(1);
    const BetaGammaParams p{1, 1, 1, 1};
    EXPECT_THROW(mc_estimate_g(p, [](double, double) { return 1.0; }, 10, 0.05, rng), std::invalid_argument);
    EXPECT_THROW(mc_estimate_g(p, [](double, double) { return std::nan(""); }, 100, 0.05, rng), std::invalid_argument);
}

TEST(CredibleSet, AreaFormula) {
    EXPECT_DOUBLE_EQ(trapezoid_area(1.0, 2.0, 0.25, 0.75), 0.75);
}

TEST(CredibleSet, DefaultSplitSatisfiesIdentity) {
    for (double alpha : {0.01, 0.05, 0.1, 0.5}) {
        const auto s = AlphaSplit::even(alpha);
        EXPECT_NEAR((1 - s.alpha1) * (1 - s.alpha2), 1 - alpha, 1e-15);
    }
}

TEST(CredibleSet, InvariantsAndCoverageOfFreshDraws) {
    const auto post = posterior(noninformative_prior(), mouse_stats());
    Rng rng(77);
    const auto split = AlphaSplit::even(0.1);
    const auto cs = credible_set(post, 0.1, split, 20000, rng);
    EXPECT_GT(cs.A, 0.0);
    EXPECT_LE(cs.A, cs.B);
    EXPECT_GE(cs.C, 0.0);
    EXPECT_LE(cs.C, cs.D);
    EXPECT_LE(cs.D, 1.0);
    EXPECT_DOUBLE_EQ(cs.area, (cs.B * cs.B - cs.A * cs.A) * (cs.D - cs.C) / 2);
    EXPECT_NEAR(cs.level, 0.9, 1e-12);

    const int N = 20000;
    int inside = 0;
    for (int i = 0; i < N; ++i) inside += cs.contains(bg_sample(post, rng));
    EXPECT_NEAR(static_cast<double>(inside) / N, 0.9, 3 * std::sqrt(0.09 / N) + 0.01);
}

TEST(CredibleSet, RejectsInconsistentSplit) {
    Rng rng(1);
    const BetaGammaParams p{1, 2, 1, 1};
    EXPECT_THROW(credible_set(p, 0.05, {0.05, 0.05}, 1000, rng), std::invalid_argument);
    EXPECT_THROW(credible_set(p, 0.05, AlphaSplit::even(0.05), 10, rng), std::invalid_argument);
}
