#include "riveq/numerics.hpp"

#include <cmath>

namespace riveq {

std::pair<double, double> coercive_bracket(const RISystem& sys, double u_ref) {
    if (!std::isfinite(u_ref)) throw PreconditionViolation("coercive_bracket: u_ref not finite");
    const double B = sys.eval_bound();
    if (std::abs(u_ref) > B) throw BracketOverflow("coercive_bracket: u_ref beyond eval bound");

    const Loading& ell = sys.loading();
    const double ap = sys.dissipation_potential().alpha_plus;
    const double am = sys.dissipation_potential().alpha_minus;

    double hi = u_ref, step = std::max(0.5, 0.1 * (1.0 + std::abs(u_ref)));
    while (!(sys.W().derivative(hi) > ell.max_value() + ap)) {
        hi += step;
        step *= 2.0;
        if (hi > B) throw BracketOverflow("coercive_bracket: expansion beyond eval bound");
    }
    double lo = u_ref;
    step = std::max(0.5, 0.1 * (1.0 + std::abs(u_ref)));
    while (!(sys.W().derivative(lo) < ell.min_value() - am)) {
        lo -= step;
        step *= 2.0;
        if (lo < -B) throw BracketOverflow("coercive_bracket: expansion beyond eval bound");
    }
    const double pad = 0.1 * (hi - lo);
    lo = std::max(lo - pad, -B);
    hi = std::min(hi + pad, B);
    return {lo, hi};
}

} // namespace riveq
