#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <utility>

#include "hcr/types.hpp"

namespace hcr {

struct RootResult {
    double root = 0.0;
    int evaluations = 0;
    bool converged = false;
};

struct Bracket {
    double lo = 0.0, hi = 0.0;
    double f_lo = 0.0, f_hi = 0.0;
    int evaluations = 0;
};

/// Finds [lo, hi] around a sign change of f for a positive argument by
/// geometric expansion from `start`. f is assumed monotone; `increasing`
/// gives its direction. Returns nullopt after max_steps expansions.
template <class F>
std::optional<Bracket> bracket_positive(F&& f, double start, bool increasing, double factor = 2.0,
                                        int max_steps = 60) {
    Bracket b;
    double x = start;
    double fx = f(x);
    ++b.evaluations;
    if (fx == 0.0) return Bracket{x, x, 0.0, 0.0, b.evaluations};
    // Root lies above x if f(x) < 0 for increasing f.
    const bool go_up = increasing ? (fx < 0.0) : (fx > 0.0);
    for (int k = 0; k < max_steps; ++k) {
        const double next = go_up ? x * factor : x / factor;
        const double fn = f(next);
        ++b.evaluations;
        if ((fn > 0.0) != (fx > 0.0) || fn == 0.0) {
            if (go_up) return Bracket{x, next, fx, fn, b.evaluations};
            return Bracket{next, x, fn, fx, b.evaluations};
        }
        x = next;
        fx = fn;
    }
    return std::nullopt;
}

/// Brent's method on a bracket with f(lo), f(hi) of opposite signs. Stops
/// when the bracket width falls below rel_tol * |root|.
template <class F>
RootResult brent_root(F&& f, Bracket br, double rel_tol = 1e-8, int max_iter = 200) {
    double a = br.lo, b = br.hi, fa = br.f_lo, fb = br.f_hi;
    RootResult out;
    out.evaluations = br.evaluations;
    if (fa == 0.0) return {a, out.evaluations, true};
    if (fb == 0.0) return {b, out.evaluations, true};
    if ((fa > 0.0) == (fb > 0.0)) throw RootFindingError("brent_root: interval does not bracket a root");

    double c = a, fc = fa, d = b - a, e = d;
    for (int it = 0; it < max_iter; ++it) {
        if ((fb > 0.0) == (fc > 0.0)) {
            c = a;
            fc = fa;
            d = e = b - a;
        }
        if (std::fabs(fc) < std::fabs(fb)) {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        const double tol = 0.5 * rel_tol * std::fabs(b) + 1e-300;
        const double m = 0.5 * (c - b);
        if (std::fabs(m) <= tol || fb == 0.0) return {b, out.evaluations, true};

        if (std::fabs(e) >= tol && std::fabs(fa) > std::fabs(fb)) {
            double p, q;
            const double s = fb / fa;
            if (a == c) {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                const double qq = fa / fc;
                const double r = fb / fc;
                p = s * (2.0 * m * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0.0)
                q = -q;
            else
                p = -p;
            if (2.0 * p < std::fmin(3.0 * m * q - std::fabs(tol * q), std::fabs(e * q))) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += std::fabs(d) > tol ? d : (m > 0.0 ? tol : -tol);
        fb = f(b);
        ++out.evaluations;
    }
    return {b, out.evaluations, false};
}

/// Plain bisection; used where f is cheap and robustness matters more than speed.
template <class F>
RootResult bisect_root(F&& f, Bracket br, double rel_tol = 1e-12, int max_iter = 400) {
    double lo = br.lo, hi = br.hi, flo = br.f_lo;
    RootResult out;
    out.evaluations = br.evaluations;
    for (int it = 0; it < max_iter; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (hi - lo <= rel_tol * std::fabs(mid)) return {mid, out.evaluations, true};
        const double fm = f(mid);
        ++out.evaluations;
        if (fm == 0.0) return {mid, out.evaluations, true};
        if ((fm > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return {0.5 * (lo + hi), out.evaluations, false};
}

} // namespace hcr
