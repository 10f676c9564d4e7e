#ifndef RIVEQ_NUMERICS_HPP
#define RIVEQ_NUMERICS_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "riveq/errors.hpp"
#include "riveq/system.hpp"

namespace riveq {

struct MinimizeSettings {
    int grid_points = 4096;
    double refine_tol = 1e-10;       // in the argument
    int max_refine_iters = 200;
    double value_tie_tol = 1e-9;
};

/// All near-global minimizers of a scalar function on an interval.
///
/// The set is a finite surrogate for a possibly multivalued argmin: every
/// listed minimizer attains min_value within value_tie_tol, deduplicated at
/// resolution refine_tol. Callers apply their own tie-breaking.
struct ArgminSet {
    std::vector<double> minimizers; // sorted ascending
    double min_value = 0.0;

    bool contains(double x, double tol) const {
        for (double m : minimizers)
            if (std::abs(m - x) <= tol) return true;
        return false;
    }
};

namespace detail {

// golden-section refinement on [a,b]; returns (x, f(x)) of the best point seen
template <class F>
std::pair<double, double> golden_refine(F&& f, double a, double b, double fa, double fb,
                                        const MinimizeSettings& s) {
    constexpr double invphi = 0.6180339887498949;
    double x1 = b - invphi * (b - a);
    double x2 = a + invphi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    double best_x = a, best_f = fa;
    if (fb < best_f) { best_x = b; best_f = fb; }
    for (int it = 0; it < s.max_refine_iters; ++it) {
        if (b - a <= s.refine_tol * (1.0 + std::abs(a) + std::abs(b))) break;
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - invphi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + invphi * (b - a);
            f2 = f(x2);
        }
    }
    if (f1 < best_f) { best_x = x1; best_f = f1; }
    if (f2 < best_f) { best_x = x2; best_f = f2; }
    return {best_x, best_f};
}

} // namespace detail

/// Bracketed global minimization of a continuous coercive scalar function.
///
/// Scans a uniform grid, keeps every local bracket whose center value is
/// within value_tie_tol of the running minimum, refines each bracket by
/// golden section, and returns all near-global minimizers.
template <class F>
ArgminSet global_min(F&& f, double lo, double hi, const MinimizeSettings& s = {}) {
    if (!(lo <= hi)) throw PreconditionViolation("global_min: need lo <= hi");
    if (lo == hi) {
        const double v = f(lo);
        if (!std::isfinite(v)) throw NonFiniteValue("global_min: f not finite");
        return ArgminSet{{lo}, v};
    }
    const int n = std::max(16, s.grid_points);
    std::vector<double> xs(static_cast<size_t>(n) + 1), fs(static_cast<size_t>(n) + 1);
    double grid_best = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= n; ++i) {
        const double x = lo + (hi - lo) * i / n;
        const double v = f(x);
        if (!std::isfinite(v)) throw NonFiniteValue("global_min: f not finite on the grid");
        xs[static_cast<size_t>(i)] = x;
        fs[static_cast<size_t>(i)] = v;
        grid_best = std::min(grid_best, v);
    }

    // every grid-local bracket is refined: grid values carry O(h^2)
    // resolution error, so near-tie filtering happens only after refinement
    struct Candidate {
        double x, v;
    };
    std::vector<Candidate> cands;
    for (int i = 0; i <= n; ++i) {
        const size_t ui = static_cast<size_t>(i);
        const bool left_ok = (i == 0) || fs[ui] <= fs[ui - 1];
        const bool right_ok = (i == n) || fs[ui] <= fs[ui + 1];
        if (!(left_ok && right_ok)) continue;
        const double a = xs[static_cast<size_t>(std::max(i - 1, 0))];
        const double b = xs[static_cast<size_t>(std::min(i + 1, n))];
        auto [x, v] = detail::golden_refine(f, a, b, fs[static_cast<size_t>(std::max(i - 1, 0))],
                                            fs[static_cast<size_t>(std::min(i + 1, n))], s);
        if (v <= fs[ui]) {
            cands.push_back({x, v});
        } else {
            cands.push_back({xs[ui], fs[ui]});
        }
    }

    double best = grid_best;
    for (const auto& c : cands) best = std::min(best, c.v);

    std::sort(cands.begin(), cands.end(),
              [](const Candidate& a, const Candidate& b) { return a.x < b.x; });
    ArgminSet out;
    out.min_value = best;
    const double dedupe = std::max(s.refine_tol, 1e-14 * (std::abs(lo) + std::abs(hi)));
    for (const auto& c : cands) {
        if (c.v > best + s.value_tie_tol) continue;
        if (!out.minimizers.empty() && c.x - out.minimizers.back() <= dedupe) continue;
        out.minimizers.push_back(c.x);
    }
    return out;
}

/// Interval guaranteed to contain all minimizers of v -> E(t,v) + D(u_ref,v)
/// for every t in [a,b]: expand from u_ref until the derivative coercivity
/// margins hold, then pad by 10%.
std::pair<double, double> coercive_bracket(const RISystem& sys, double u_ref);

/// Adaptive composite Simpson quadrature, absolute error <= tol on C^1
/// integrands.
namespace detail {
template <class F>
double simpson_rec(F&& f, double a, double b, double fa, double fm, double fb, double whole,
                   double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}
} // namespace detail

template <class F>
double integrate(F&& f, double lo, double hi, double tol = 1e-10) {
    if (!(lo <= hi)) throw PreconditionViolation("integrate: need lo <= hi");
    if (lo == hi) return 0.0;
    const double m = 0.5 * (lo + hi);
    const double fa = f(lo), fm = f(m), fb = f(hi);
    const double whole = (hi - lo) / 6.0 * (fa + 4.0 * fm + fb);
    return detail::simpson_rec(f, lo, hi, fa, fm, fb, whole, tol, 40);
}

} // namespace riveq

#endif
