#include "riveq/moreau.hpp"

#include <cmath>
#include <limits>

namespace riveq {

MoreauResult moreau_yosida(const RISystem& sys, double t, double u,
                           const MinimizeSettings& settings) {
    auto [lo, hi] = coercive_bracket(sys, u);
    auto f = [&](double v) { return sys.energy_unchecked(t, v) + sys.dissipation(u, v); };
    MoreauResult out;
    out.minimal_set = global_min(f, lo, hi, settings);
    // v = u is always a candidate; keeps Y(t,u) <= E(t,u) exact
    const double at_u = sys.energy_unchecked(t, u);
    if (at_u < out.minimal_set.min_value) {
        out.minimal_set.min_value = at_u;
        out.minimal_set.minimizers = {u};
    }
    out.value = out.minimal_set.min_value;
    return out;
}

double stability_tolerance(const RISystem& sys, double t, double u) {
    return 1e-9 * (1.0 + std::abs(sys.energy_unchecked(t, u)));
}

ResidualValue residual(const RISystem& sys, double t, double u,
                       const MinimizeSettings& settings) {
    const MoreauResult m = moreau_yosida(sys, t, u, settings);
    const double e = sys.energy_unchecked(t, u);
    ResidualValue out;
    out.value = e - m.value;
    if (out.value <= stability_tolerance(sys, t, u)) {
        out.value = 0.0;
        return out;
    }
    // witness: minimal-set element closest to u, leftmost on ties
    double best_d = std::numeric_limits<double>::infinity();
    const double self_tol = 4.0 * settings.refine_tol * (1.0 + std::abs(u));
    for (double z : m.minimal_set.minimizers) {
        if (std::abs(z - u) <= self_tol) continue;
        const double d = std::abs(z - u);
        if (d < best_d - 1e-15) {
            best_d = d;
            out.witness = z;
        }
    }
    return out;
}

bool is_stable_by_definition(const RISystem& sys, double t, double u, double tol,
                             const MinimizeSettings& settings) {
    if (tol < 0) tol = stability_tolerance(sys, t, u);
    const MoreauResult m = moreau_yosida(sys, t, u, settings);
    return sys.energy_unchecked(t, u) - m.value <= tol;
}

} // namespace riveq
