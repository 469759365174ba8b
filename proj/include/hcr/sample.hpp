#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "hcr/types.hpp"

namespace hcr {

/// Checks the observations against the design and classifies the censoring case.
///
/// Case I: exactly R failures were observed and the last one is past T.
/// Case II: every failure is at or before T and R <= J <= n. A sample with
/// exactly R failures all at or before T is Case II with J = R.
inline HybridSample validate_sample(const Design& design, std::span<const Observation> obs) {
    design.validate();
    if (obs.empty()) throw InvalidSample("sample has no observations");

    for (std::size_t i = 0; i < obs.size(); ++i) {
        if (!(obs[i].time > 0.0) || !std::isfinite(obs[i].time))
            throw InvalidSample("observation " + std::to_string(i + 1) + " has nonpositive or non-finite time");
        if (i > 0 && !(obs[i].time > obs[i - 1].time)) {
            throw InvalidSample(obs[i].time == obs[i - 1].time
                                    ? "tied failure times at observation " + std::to_string(i + 1)
                                    : "failure times are not sorted at observation " + std::to_string(i + 1));
        }
    }

    const auto count = static_cast<int>(obs.size());
    if (count < design.R)
        throw InvalidSample("sample has " + std::to_string(count) + " failures, fewer than R = " +
                            std::to_string(design.R));
    if (count > design.n)
        throw InvalidSample("sample has " + std::to_string(count) + " failures, more than n = " +
                            std::to_string(design.n));

    HybridSample out{design, {obs.begin(), obs.end()}, CensoringCase::CaseII};
    if (obs.back().time > design.T) {
        if (count != design.R)
            throw InvalidSample("case mismatch: failures observed after T but count " + std::to_string(count) +
                                " differs from R = " + std::to_string(design.R));
        out.censoring = CensoringCase::CaseI;
    }
    return out;
}

inline HybridSample validate_sample(const Design& design, const std::vector<Observation>& obs) {
    return validate_sample(design, std::span<const Observation>(obs));
}

inline SufficientStats sufficient_stats(const HybridSample& sample) {
    SufficientStats s;
    s.censoring = sample.censoring;
    s.J = static_cast<int>(sample.observations.size());
    double sum = 0.0;
    for (const auto& o : sample.observations) {
        sum += o.time;
        (o.cause == Cause::One ? s.D1 : s.D2) += 1;
    }
    const double stop = sample.censoring == CensoringCase::CaseI ? sample.observations.back().time : sample.design.T;
    s.W = sum + (sample.design.n - s.J) * stop;
    return s;
}

/// D1 ln(l1) + D2 ln(l2) - W (l1 + l2).
inline double log_likelihood(const RateParams& rates, const SufficientStats& stats) {
    if ((stats.D1 > 0 && !(rates.lambda1 > 0.0)) || (stats.D2 > 0 && !(rates.lambda2 > 0.0)))
        throw std::invalid_argument("log_likelihood: zero rate with a positive cause count");
    double ll = -stats.W * rates.total();
    if (stats.D1 > 0) ll += stats.D1 * std::log(rates.lambda1);
    if (stats.D2 > 0) ll += stats.D2 * std::log(rates.lambda2);
    return ll;
}

struct Gradient2 {
    double d_lambda1 = 0.0;
    double d_lambda2 = 0.0;
};

inline Gradient2 log_likelihood_gradient(const RateParams& rates, const SufficientStats& stats) {
    if (!(rates.lambda1 > 0.0) || !(rates.lambda2 > 0.0))
        throw std::invalid_argument("log_likelihood_gradient: rates must be positive");
    return {stats.D1 / rates.lambda1 - stats.W, stats.D2 / rates.lambda2 - stats.W};
}

inline Estimates point_estimates(const SufficientStats& stats) {
    if (!(stats.W > 0.0)) throw std::invalid_argument("point_estimates: total time on test W must be positive");
    Estimates e;
    e.mle1_exists = stats.D1 > 0;
    e.mle2_exists = stats.D2 > 0;
    e.lambda1_hat = e.mle1_exists ? stats.D1 / stats.W : 0.0;
    e.lambda2_hat = e.mle2_exists ? stats.D2 / stats.W : 0.0;
    return e;
}

} // namespace hcr
