#ifndef RIVEQ_ENVELOPES_HPP
#define RIVEQ_ENVELOPES_HPP

#include <optional>
#include <vector>

#include "riveq/numerics.hpp"
#include "riveq/slopes.hpp"
#include "riveq/system.hpp"

namespace riveq {

enum class EnvelopeSide { upper_of_ir, lower_of_sl };

/// Monotone envelope of a corrected one-sided slope past a base point.
///
/// upper_of_ir is the minimal nondecreasing majorant of W'_ir on
/// [base, +inf); lower_of_sl the maximal nondecreasing minorant of W'_sl on
/// (-inf, base]. Inverse selections p_l/p_r (resp. q_l/q_r) are refined by
/// bisection on the slope function itself, not the gridded envelope.
class MonotoneEnvelope {
public:
    double base_point() const { return base_; }
    EnvelopeSide side() const { return side_; }

    /// Grid of states (ascending) with envelope values; mirrored back to
    /// original coordinates for the lower side.
    const std::vector<double>& grid() const { return grid_; }
    const std::vector<double>& values() const { return env_; }
    const std::vector<double>& slope_values() const { return slope_; }
    double domain_lo() const { return grid_.front(); }
    double domain_hi() const { return grid_.back(); }

    /// Envelope value at u (monotone interpolation of the grid).
    double value(double u) const;
    /// Underlying corrected slope at u, full accuracy.
    double slope_at(double u) const;

    // Inverse selections of the upper envelope (upper_of_ir only):
    //   p_left(l)  = min { u >= base : W'_ir(u) >= l }
    //   p_right(l) = inf { u >= base : W'_ir(u) >  l }
    double p_left(double level) const;
    double p_right(double level) const;

    // Mirrored selections of the lower envelope (lower_of_sl only):
    //   q_left(l)  = sup { u <= base : W'_sl(u) < l }
    //   q_right(l) = max { u <= base : W'_sl(u) <= l }
    double q_left(double level) const;
    double q_right(double level) const;

    /// States in [p_left, p_right] where the slope equals the level
    /// (tangencies, crossings, and sampled flat stretches).
    std::vector<double> contact_selection(double level) const;

private:
    friend MonotoneEnvelope build_envelope(const RISystem&, double, EnvelopeSide,
                                           std::optional<double>, const MinimizeSettings&);
    MonotoneEnvelope() = default;

    // Queries run on the working (upper) orientation; the lower side stores
    // the reflected system and mirrors arguments/results.
    double p_left_upper(double level) const;
    double p_right_upper(double level) const;
    std::vector<double> contact_upper(double level) const;
    double slope_upper(double u) const;

    std::optional<RISystem> work_sys_; // reflected for lower side
    EnvelopeSide side_ = EnvelopeSide::upper_of_ir;
    double base_ = 0.0;
    MinimizeSettings slope_settings_;
    // working-orientation data (always an upper envelope)
    std::vector<double> wgrid_, wenv_, wslope_;
    std::vector<double> wstationary_; // exact roots of W'' in the domain
    // public-orientation copies
    std::vector<double> grid_, env_, slope_;
};

/// Running max (upper) or running min (lower) of the corrected slope over a
/// grid from the base point; 8192 points plus the stationary points of W'
/// inserted exactly.
MonotoneEnvelope build_envelope(const RISystem& sys, double base_point, EnvelopeSide side,
                                std::optional<double> domain_limit = {},
                                const MinimizeSettings& slope_settings = MinimizeSettings{2048});

} // namespace riveq

#endif
