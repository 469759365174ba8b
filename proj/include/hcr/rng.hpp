#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <stdexcept>

namespace hcr {

/// SplitMix64 finalizer; used to derive independent stream seeds.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Seed for the stream identified by (seed, k1, k2, ...). The same key always
/// gives the same stream, so replicates can be simulated in any order.
inline std::uint64_t stream_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> keys) {
    std::uint64_t h = mix64(seed);
    for (auto k : keys) h = mix64(h ^ mix64(k + 0x632be59bd9b4e019ULL));
    return h;
}

/// Random stream with the variate generators the library needs. The
/// generators are written out here rather than taken from <random> so that
/// output is identical across standard library implementations.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    Rng(std::uint64_t seed, std::initializer_list<std::uint64_t> keys) : engine_(stream_seed(seed, keys)) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on the open interval (0, 1).
    double uniform() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }

    double exponential(double rate) { return -std::log(uniform()) / rate; }

    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double m = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * m;
        has_spare_ = true;
        return u * m;
    }

    /// Gamma(shape, rate) by Marsaglia and Tsang.
    double gamma(double shape, double rate) {
        if (!(shape > 0.0) || !(rate > 0.0)) throw std::invalid_argument("gamma variate: shape and rate must be positive");
        if (shape < 1.0) return std::exp(log_gamma_unit(shape)) / rate;
        return marsaglia_tsang(shape) / rate;
    }

    double beta(double a, double b) {
        if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("beta variate: shapes must be positive");
        if (a >= 1.0 && b >= 1.0) {
            const double x = marsaglia_tsang(a);
            const double y = marsaglia_tsang(b);
            return x / (x + y);
        }
        // tiny shapes: X/(X+Y) = 1/(1 + e^{log Y - log X}) without underflow
        const double lx = log_gamma_unit(a);
        const double ly = log_gamma_unit(b);
        return 1.0 / (1.0 + std::exp(ly - lx));
    }

  private:
    // Marsaglia and Tsang, shape >= 1, unit rate.
    double marsaglia_tsang(double shape) {
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x, v;
            do {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = uniform();
            if (u < 1.0 - 0.0331 * (x * x) * (x * x)) return d * v;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
        }
    }

    // log of a unit-rate gamma draw; shapes below one use the U^{1/shape} boost.
    double log_gamma_unit(double shape) {
        if (shape >= 1.0) return std::log(marsaglia_tsang(shape));
        return std::log(marsaglia_tsang(shape + 1.0)) + std::log(uniform()) / shape;
    }

    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace hcr
