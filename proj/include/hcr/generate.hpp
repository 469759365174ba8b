#pragma once

#include <algorithm>
#include <limits>
#include <vector>

#include "hcr/rng.hpp"
#include "hcr/sample.hpp"
#include "hcr/types.hpp"

namespace hcr {

namespace detail {

inline std::vector<Observation> draw_latent(const RateParams& rates, const Design& design, Rng& rng) {
    std::vector<Observation> units(static_cast<std::size_t>(design.n));
    for (auto& u : units) {
        // an exponential with zero rate never fires
        const double t1 = rates.lambda1 > 0.0 ? rng.exponential(rates.lambda1) : std::numeric_limits<double>::infinity();
        const double t2 = rates.lambda2 > 0.0 ? rng.exponential(rates.lambda2) : std::numeric_limits<double>::infinity();
        u = t1 < t2 ? Observation{t1, Cause::One} : Observation{t2, Cause::Two};
    }
    return units;
}

} // namespace detail

/// Simulates one Type-II hybrid censored experiment: n units with independent
/// exponential latent lifetimes per cause, observed until max(Z_{R:n}, T).
inline HybridSample generate_sample(const RateParams& rates, const Design& design, Rng& rng) {
    rates.validate();
    design.validate();
    auto units = detail::draw_latent(rates, design, rng);
    std::sort(units.begin(), units.end(), [](const Observation& a, const Observation& b) { return a.time < b.time; });
    const auto R = static_cast<std::size_t>(design.R);
    std::size_t keep = R;
    if (!(units[R - 1].time > design.T)) {
        keep = static_cast<std::size_t>(std::upper_bound(units.begin(), units.end(), design.T,
                                                         [](double t, const Observation& o) { return t < o.time; }) -
                                        units.begin());
    }
    units.resize(keep);
    return validate_sample(design, units);
}

/// Same experiment as generate_sample (and the same draws from `rng`) but
/// only the sufficient statistics are formed.
inline SufficientStats generate_stats(const RateParams& rates, const Design& design, Rng& rng) {
    rates.validate();
    design.validate();
    auto units = detail::draw_latent(rates, design, rng);
    const auto R = static_cast<std::size_t>(design.R);
    auto by_time = [](const Observation& a, const Observation& b) { return a.time < b.time; };
    std::nth_element(units.begin(), units.begin() + static_cast<std::ptrdiff_t>(R - 1), units.end(), by_time);
    const double zR = units[R - 1].time;

    SufficientStats s;
    double sum = 0.0;
    if (zR > design.T) {
        s.censoring = CensoringCase::CaseI;
        for (std::size_t k = 0; k < R; ++k) {
            sum += units[k].time;
            (units[k].cause == Cause::One ? s.D1 : s.D2) += 1;
        }
        s.J = design.R;
        s.W = sum + (design.n - design.R) * zR;
    } else {
        s.censoring = CensoringCase::CaseII;
        for (const auto& u : units) {
            if (u.time <= design.T) {
                sum += u.time;
                ++s.J;
                (u.cause == Cause::One ? s.D1 : s.D2) += 1;
            }
        }
        s.W = sum + (design.n - s.J) * design.T;
    }
    return s;
}

} // namespace hcr
