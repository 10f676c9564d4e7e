#ifndef RIVEQ_SLOPES_HPP
#define RIVEQ_SLOPES_HPP

#include <optional>

#include "riveq/numerics.hpp"
#include "riveq/system.hpp"

namespace riveq {

/// One one-sided global slope value with its minimizing state, when that
/// state is detached from u. arg is absent when the extremum is attained
/// only in the limit z -> u, the case split the transition builder needs.
struct SlopeResult {
    double value = 0.0;
    std::optional<double> arg;
};

struct SlopePair {
    double w_ir = 0.0;
    double w_sl = 0.0;
    std::optional<double> arg_ir;
    std::optional<double> arg_sl;
};

/// Difference-quotient kernel V(u,z), continuously extended by W'(u) at z=u.
double slope_kernel(const RISystem& sys, double u, double z);

/// inf over z > u of (W(z) - W(u) + delta(u,z)) / (z - u), truncated to the
/// coercive bracket. arg is the smallest detached minimizer.
SlopeResult slope_ir(const RISystem& sys, double u, const MinimizeSettings& settings = {});

/// Mirror: sup over z < u.
SlopeResult slope_sl(const RISystem& sys, double u, const MinimizeSettings& settings = {});

SlopePair slopes(const RISystem& sys, double u, const MinimizeSettings& settings = {});

/// The one-dimensional stability chain
///   -a- <= l - W'_sl <= l - W' <= l - W'_ir <= a+
/// with per-link margins (nonnegative when the link holds).
struct StabilityVerdict {
    bool stable = false;
    double w_prime = 0.0;
    double w_ir = 0.0;
    double w_sl = 0.0;
    double margin_sl = 0.0;    // (l - W'_sl) + a-
    double margin_mid_l = 0.0; // W'_sl - W'
    double margin_mid_r = 0.0; // W' - W'_ir
    double margin_ir = 0.0;    // a+ - (l - W'_ir)
    double min_margin() const;
    /// Distance to the stability boundary: the ordering margins vanish
    /// identically wherever the corrected slopes collapse onto W'.
    double boundary_margin() const;
};

StabilityVerdict check_stability_1d(const RISystem& sys, double t, double u,
                                    const MinimizeSettings& settings = {});

enum class SlopeSide { ir, sl };

/// Certifies the corrected slope is strictly decreasing along I, under the
/// strict-gap hypothesis slope != W' on I (grid of >= grid_points samples).
bool monotone_decrease_certificate(const RISystem& sys, double lo, double hi, SlopeSide side,
                                   int grid_points = 256, const MinimizeSettings& settings = {});

} // namespace riveq

#endif
