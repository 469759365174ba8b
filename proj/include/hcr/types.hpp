#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace hcr {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Observations inconsistent with the censoring design.
class InvalidSample : public Error {
  public:
    using Error::Error;
};

/// A cause count is zero where the requested procedure needs it positive.
class DegenerateCount : public Error {
  public:
    using Error::Error;
};

/// The Wald interval does not exist when the corresponding count is zero.
class NoAsymptoticInterval : public Error {
  public:
    using Error::Error;
};

/// A root search failed to bracket or converge.
class RootFindingError : public Error {
  public:
    using Error::Error;
};

enum class Cause : int { One = 1, Two = 2 };

inline Cause other(Cause c) { return c == Cause::One ? Cause::Two : Cause::One; }

inline int to_int(Cause c) { return static_cast<int>(c); }

inline Cause cause_from_int(int v) {
    if (v == 1) return Cause::One;
    if (v == 2) return Cause::Two;
    throw InvalidSample("cause label must be 1 or 2, got " + std::to_string(v));
}

enum class CensoringCase { CaseI, CaseII };

inline const char* to_string(CensoringCase c) { return c == CensoringCase::CaseI ? "I" : "II"; }

/// Type-II hybrid censoring design: n units on test, at least R failures,
/// experiment runs until max(Z_{R:n}, T).
struct Design {
    int n = 0;
    int R = 0;
    double T = 0.0;

    void validate() const {
        if (n < 1) throw std::invalid_argument("design: n must be positive");
        if (R < 1 || R >= n) throw std::invalid_argument("design: R must satisfy 1 <= R < n");
        if (!(T > 0.0)) throw std::invalid_argument("design: T must be positive");
    }
};

struct Observation {
    double time = 0.0;
    Cause cause = Cause::One;
};

/// Validated, time-ordered observations together with the design that
/// produced them. Construct through validate_sample().
struct HybridSample {
    Design design;
    std::vector<Observation> observations;
    CensoringCase censoring = CensoringCase::CaseII;
};

/// Everything the likelihood depends on.
struct SufficientStats {
    CensoringCase censoring = CensoringCase::CaseII;
    int J = 0;
    int D1 = 0;
    int D2 = 0;
    double W = 0.0;

    int count(Cause c) const { return c == Cause::One ? D1 : D2; }
};

/// Latent exponential rates of the two causes.
struct RateParams {
    double lambda1 = 0.0;
    double lambda2 = 0.0;

    double total() const { return lambda1 + lambda2; }
    double of(Cause c) const { return c == Cause::One ? lambda1 : lambda2; }

    /// Rates seen from the side of `c`: the returned lambda1 is the rate of `c`.
    RateParams oriented(Cause c) const {
        return c == Cause::One ? *this : RateParams{lambda2, lambda1};
    }

    void validate() const {
        if (!(lambda1 >= 0.0) || !(lambda2 >= 0.0))
            throw std::invalid_argument("rates must be nonnegative");
        if (!(lambda1 + lambda2 > 0.0)) throw std::invalid_argument("rates: lambda1 + lambda2 must be positive");
    }
};

/// The modified estimators: MLE when the cause count is positive, zero otherwise.
struct Estimates {
    double lambda1_hat = 0.0;
    double lambda2_hat = 0.0;
    bool mle1_exists = false;
    bool mle2_exists = false;

    double of(Cause c) const { return c == Cause::One ? lambda1_hat : lambda2_hat; }
};

} // namespace hcr
