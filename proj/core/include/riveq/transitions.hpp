#ifndef RIVEQ_TRANSITIONS_HPP
#define RIVEQ_TRANSITIONS_HPP

#include <optional>
#include <string>
#include <vector>

#include "riveq/moreau.hpp"
#include "riveq/numerics.hpp"
#include "riveq/system.hpp"

namespace riveq {

enum class GapKind {
    hole,         // a genuine connected component of [E-,E+] \ E
    accumulation, // elided points of E: truncated chain tails, merged
                  // micro-steps, and sampled sliding stretches
};

/// Finite representation of a frozen-time jump transition.
///
/// The parameter set E is represented by its image: constructed 1D
/// transitions are monotone and parametrized by identity. Between
/// consecutive points sits either a hole (delta is paid across it) or an
/// accumulation stretch (its delta cost vanishes with the elided points).
struct Transition {
    double t = 0.0;
    std::vector<double> points;
    std::vector<GapKind> gap_kinds;                 // size points.size()-1
    std::optional<double> truncation_note;          // remaining Psi-mass bound

    bool increasing() const { return points.size() < 2 || points.back() >= points.front(); }
    void validate() const; // throws MalformedTransition
};

struct CostBreakdown {
    double var_psi = 0.0;
    double c_delta = 0.0;
    double res_sum = 0.0;
    double total = 0.0;
};

/// Transition cost: Psi-variation + delta over holes + residuals at every
/// point except the last. Empty and singleton sets cost zero.
CostBreakdown transition_cost(const RISystem& sys, const Transition& tr,
                              const MinimizeSettings& settings = {});

struct ChainSettings {
    double eps_fraction = 1e-6;     // eps-chain start offset, fraction of gap
    int max_halvings = 60;          // energy-decrease search for eps
    double trunc_psi = 1e-9;        // truncate when the Psi-increment drops below
    double trunc_note_max = 3e-5;   // cap on the truncated tail's Psi mass
    double emit_fraction = 1e-5;    // merge micro-steps below this fraction of gap
    long max_iterations = 20000000; // chain-divergence cap
    double eps_cost_check = 1e-6;   // rerun at eps/10 must match within this
    bool verify_eps_limit = true;
};

/// Constructs the optimal transition between stable states at frozen time:
/// the union of the slope-contact set S with, per gap, either an initial
/// jump to the detached slope minimizer followed by the minimizing-movement
/// chain, or an eps-start double chain when the infimum is attained only in
/// the limit.
Transition build_optimal_transition(const RISystem& sys, double t, double u_minus, double u_plus,
                                    const MinimizeSettings& settings = {},
                                    const ChainSettings& chain = {});

struct JumpCostResult {
    double cost = 0.0;
    Transition best;
    bool certified = false;
    bool budget_exhausted = false;
    std::string method; // "constructive" | "dp" | "trivial"
};

/// Dissipation cost between two states: the constructive candidate when it
/// connects them, otherwise (or when cheaper) dynamic programming over
/// monotone point sequences on a state grid.
JumpCostResult jump_cost(const RISystem& sys, double t, double u0, double u1,
                         int search_budget = 2048, const MinimizeSettings& settings = {});

struct CertificateReport {
    bool passed = false;
    double max_var_violation = 0.0;    // pairwise Psi-variation vs energy drop
    double max_minset_violation = 0.0; // augmented energy vs Y at predecessor
    double energy_drop_defect = 0.0;   // |E(first)-E(last) - total cost|
    std::vector<std::string> violations;
};

/// Optimality certificate: for all index pairs the Psi-variation is
/// dominated by the energy drop, every point is a minimal-set element of its
/// predecessor within tolerance, and the total cost equals the energy drop.
CertificateReport certify_optimal(const RISystem& sys, const Transition& tr,
                                  double tol = 1e-7, const MinimizeSettings& settings = {});

} // namespace riveq

#endif
