#ifndef RIVEQ_MOREAU_HPP
#define RIVEQ_MOREAU_HPP

#include <optional>

#include "riveq/numerics.hpp"
#include "riveq/system.hpp"

namespace riveq {

/// Value and minimal set of the D-Moreau-Yosida regularization
/// Y(t,u) = min_v E(t,v) + D(u,v).
struct MoreauResult {
    double value = 0.0;
    ArgminSet minimal_set;
};

MoreauResult moreau_yosida(const RISystem& sys, double t, double u,
                           const MinimizeSettings& settings = {});

/// Residual stability function R(t,u) = E(t,u) - Y(t,u), clamped at 0.
///
/// witness is a minimal-set element differing from u when the value is
/// positive: the one closest to u, leftmost on ties.
struct ResidualValue {
    double value = 0.0;
    std::optional<double> witness;
};

ResidualValue residual(const RISystem& sys, double t, double u,
                       const MinimizeSettings& settings = {});

/// Relative stability tolerance: 1e-9 * (1 + |E(t,u)|).
double stability_tolerance(const RISystem& sys, double t, double u);

/// Definition-level D-stability: R(t,u) <= tol. A negative tol selects the
/// default relative tolerance.
bool is_stable_by_definition(const RISystem& sys, double t, double u, double tol = -1.0,
                             const MinimizeSettings& settings = {});

} // namespace riveq

#endif
