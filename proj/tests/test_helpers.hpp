#ifndef RIVEQ_TEST_HELPERS_HPP
#define RIVEQ_TEST_HELPERS_HPP

#include <cmath>
#include <functional>
#include <random>

#include "riveq/system.hpp"

namespace riveq::testing {

// quartic double well W(u) = 1/4 (u^2 - 1)^2 under ell(t) = t on [0,1],
// the workhorse scenario
inline RISystem quartic_linear(double alpha, double mu, double a = 0.0, double b = 1.0) {
    return RISystem(EnergyDensity::quartic_double_well(),
                    Loading::linear(1.0, 0.0, a, b), Dissipation(alpha, alpha),
                    mu > 0 ? ViscousCorrection::quadratic(mu) : ViscousCorrection::none());
}

inline RISystem quartic_const_load(double level, double alpha, double mu) {
    return RISystem(EnergyDensity::quartic_double_well(),
                    Loading::linear(0.0, level, 0.0, 1.0), Dissipation(alpha, alpha),
                    mu > 0 ? ViscousCorrection::quadratic(mu) : ViscousCorrection::none());
}

inline RISystem convex_linear(double alpha, double mu = 0.0, double a = 0.0, double b = 2.0) {
    return RISystem(EnergyDensity::polynomial({0.0, 0.0, 0.5}),
                    Loading::linear(1.0, 0.0, a, b), Dissipation(alpha, alpha),
                    mu > 0 ? ViscousCorrection::quadratic(mu) : ViscousCorrection::none());
}

// independent root oracle: bisection for f(x) = 0 on a sign-changing bracket
inline double bisect_root(const std::function<double(double)>& f, double lo, double hi) {
    double fa = f(lo);
    for (int k = 0; k < 200; ++k) {
        const double m = 0.5 * (lo + hi);
        const double fm = f(m);
        if ((fa < 0) == (fm < 0)) {
            lo = m;
            fa = fm;
        } else {
            hi = m;
        }
    }
    return 0.5 * (lo + hi);
}

// the root of u^3 - u = c inside [lo, hi]
inline double cubic_root(double c, double lo, double hi) {
    return bisect_root([c](double u) { return u * u * u - u - c; }, lo, hi);
}

// brute-force minimization oracle: dense grid plus one local refinement pass
inline double grid_min_value(const std::function<double(double)>& f, double lo, double hi,
                             int n = 200000) {
    double best = f(lo);
    double arg = lo;
    for (int i = 1; i <= n; ++i) {
        const double x = lo + (hi - lo) * i / n;
        const double v = f(x);
        if (v < best) {
            best = v;
            arg = x;
        }
    }
    const double h = (hi - lo) / n;
    for (int i = 1; i <= 2000; ++i) {
        const double x = arg - h + 2.0 * h * i / 2000;
        const double v = f(x);
        if (v < best) best = v;
    }
    return best;
}

inline double grid_argmin(const std::function<double(double)>& f, double lo, double hi,
                          int n = 200000) {
    double best = f(lo);
    double arg = lo;
    for (int i = 1; i <= n; ++i) {
        const double x = lo + (hi - lo) * i / n;
        const double v = f(x);
        if (v < best) {
            best = v;
            arg = x;
        }
    }
    double a = std::max(lo, arg - (hi - lo) / n), b = std::min(hi, arg + (hi - lo) / n);
    for (int k = 0; k < 100; ++k) {
        const double m1 = a + (b - a) / 3.0, m2 = b - (b - a) / 3.0;
        if (f(m1) < f(m2))
            b = m2;
        else
            a = m1;
    }
    return 0.5 * (a + b);
}

inline std::mt19937_64 seeded_rng() { return std::mt19937_64(probe_seed()); }

} // namespace riveq::testing

#endif
