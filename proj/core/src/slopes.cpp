#include "riveq/slopes.hpp"

#include <cmath>

namespace riveq {

double slope_kernel(const RISystem& sys, double u, double z) {
    const double h = z - u;
    const double eps = 1e-9 * (1.0 + std::abs(u));
    if (std::abs(h) <= eps) return sys.W().derivative(u);
    return (sys.W().value(z) - sys.W().value(u) + sys.delta(u, z)) / h;
}

SlopeResult slope_ir(const RISystem& sys, double u, const MinimizeSettings& settings) {
    auto [blo, bhi] = coercive_bracket(sys, u);
    (void)blo;
    const double hi = std::max(bhi, u + 1.0);
    auto f = [&](double z) { return slope_kernel(sys, u, z); };
    ArgminSet set = global_min(f, u, hi, settings);

    SlopeResult out;
    const double wp = sys.W().derivative(u);
    out.value = std::min(set.min_value, wp);
    // detached minimizer: strictly beyond both the refinement resolution
    // and the kernel's continuous-extension band at u
    const double detach_tol =
        std::max(4.0 * settings.refine_tol, 1.6e-8) * (1.0 + std::abs(u));
    if (set.min_value <= wp + settings.value_tie_tol) {
        for (double z : set.minimizers) {
            if (z - u > detach_tol) {
                out.arg = z;
                break;
            }
        }
    }
    return out;
}

SlopeResult slope_sl(const RISystem& sys, double u, const MinimizeSettings& settings) {
    auto [blo, bhi] = coercive_bracket(sys, u);
    (void)bhi;
    const double lo = std::min(blo, u - 1.0);
    auto f = [&](double z) { return -slope_kernel(sys, u, z); };
    ArgminSet set = global_min(f, lo, u, settings);

    SlopeResult out;
    const double wp = sys.W().derivative(u);
    out.value = std::max(-set.min_value, wp);
    const double detach_tol =
        std::max(4.0 * settings.refine_tol, 1.6e-8) * (1.0 + std::abs(u));
    if (-set.min_value >= wp - settings.value_tie_tol) {
        for (auto it = set.minimizers.rbegin(); it != set.minimizers.rend(); ++it) {
            if (u - *it > detach_tol) {
                out.arg = *it;
                break;
            }
        }
    }
    return out;
}

SlopePair slopes(const RISystem& sys, double u, const MinimizeSettings& settings) {
    const SlopeResult ir = slope_ir(sys, u, settings);
    const SlopeResult sl = slope_sl(sys, u, settings);
    return SlopePair{ir.value, sl.value, ir.arg, sl.arg};
}

double StabilityVerdict::min_margin() const {
    return std::min(std::min(margin_sl, margin_mid_l), std::min(margin_mid_r, margin_ir));
}

double StabilityVerdict::boundary_margin() const { return std::min(margin_sl, margin_ir); }

StabilityVerdict check_stability_1d(const RISystem& sys, double t, double u,
                                    const MinimizeSettings& settings) {
    constexpr double kTol = 1e-8;
    StabilityVerdict v;
    v.w_prime = sys.W().derivative(u);
    v.w_ir = slope_ir(sys, u, settings).value;
    v.w_sl = slope_sl(sys, u, settings).value;
    const double l = sys.loading().value(t);
    v.margin_sl = (l - v.w_sl) + sys.dissipation_potential().alpha_minus;
    v.margin_mid_l = v.w_sl - v.w_prime;
    v.margin_mid_r = v.w_prime - v.w_ir;
    v.margin_ir = sys.dissipation_potential().alpha_plus - (l - v.w_ir);
    v.stable = v.min_margin() >= -kTol;
    return v;
}

bool monotone_decrease_certificate(const RISystem& sys, double lo, double hi, SlopeSide side,
                                   int grid_points, const MinimizeSettings& settings) {
    if (!(lo < hi)) throw PreconditionViolation("monotone_decrease_certificate: need lo < hi");
    const int n = std::max(grid_points, 256);
    constexpr double kGap = 1e-8;
    double prev = 0.0;
    bool decreasing = true;
    for (int i = 0; i <= n; ++i) {
        const double x = lo + (hi - lo) * i / n;
        const double wp = sys.W().derivative(x);
        double s;
        if (side == SlopeSide::ir) {
            s = slope_ir(sys, x, settings).value;
            if (!(s < wp - kGap))
                throw PreconditionViolation(
                    "monotone_decrease_certificate: slope_ir == W' at a sample");
        } else {
            s = slope_sl(sys, x, settings).value;
            if (!(s > wp + kGap))
                throw PreconditionViolation(
                    "monotone_decrease_certificate: slope_sl == W' at a sample");
        }
        if (i > 0 && !(s < prev)) decreasing = false;
        prev = s;
    }
    return decreasing;
}

} // namespace riveq
