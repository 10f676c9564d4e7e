#ifndef RIVEQ_EVOLUTION_HPP
#define RIVEQ_EVOLUTION_HPP

#include <optional>
#include <string>
#include <vector>

#include "riveq/numerics.hpp"
#include "riveq/system.hpp"
#include "riveq/transitions.hpp"

namespace riveq {

struct Partition {
    std::vector<double> nodes; // strictly increasing, nodes.front()=a, back()=b

    static Partition uniform(double a, double b, int steps);
    double max_step() const;
    void validate() const;
};

enum class TieRule { nearest_left, nearest_right, global_min };

/// Values of the viscously corrected incremental minimization scheme:
/// U^n minimizes E(t^n, .) + D(U^{n-1}, .).
struct DiscreteSolution {
    Partition partition;
    std::vector<double> values;        // size nodes.size()
    std::vector<bool> multiple_minima; // per step: |minimal set| > 1
};

DiscreteSolution ims_solve(const RISystem& sys, const Partition& partition, double u0,
                           TieRule tie_rule = TieRule::nearest_left,
                           const MinimizeSettings& settings = {});

struct CurveSample {
    double t;
    double u;
};

struct JumpRecord {
    double t = 0.0;
    double u_left = 0.0;
    double u_at = 0.0;
    double u_right = 0.0;
    std::optional<Transition> left_transition;  // u_left -> u_at
    std::optional<Transition> right_transition; // u_at -> u_right
};

/// Piecewise representation of a BV evolution: sampled continuity segments
/// separated by explicit jump records with attached transitions.
struct VECurve {
    std::vector<std::vector<CurveSample>> segments;
    std::vector<JumpRecord> jumps; // jump i between segments i and i+1
    std::vector<std::string> notes;

    double t_begin() const;
    double t_end() const;
    double value(double t) const;      // right-continuous at jumps
    double left_limit(double t) const;
    double right_limit(double t) const;
    double min_value() const;
    double max_value() const;
    void validate() const;
};

struct ExtractSettings {
    int base_steps = 1024;
    TieRule tie_rule = TieRule::nearest_left;
    double cauchy_tol = 1e-3;     // relative to the state range
    double jump_floor_frac = 0.01; // absolute jump floor, fraction of range
    bool attach_transitions = true;
};

/// Runs the incremental scheme on dyadically refined partitions, detects the
/// cells where variation concentrates, and assembles the limit curve with
/// certified transitions at jumps. Throws NonConvergence when the two finest
/// levels disagree away from jumps.
VECurve extract_limit(const RISystem& sys, double u0, int levels,
                      const ExtractSettings& settings = {}, const MinimizeSettings& min_set = {});

enum class LoadDirection { increasing, decreasing };

/// Closed-form monotone-loading solver: rides the contact selection of the
/// monotone envelope built from u0, recording jumps where the inverse graph
/// has plateaus.
VECurve solve_monotone(const RISystem& sys, double u0, LoadDirection direction, int samples = 512,
                       const MinimizeSettings& settings = {});

struct BalanceReport {
    double var_psi = 0.0;
    double jump_increment = 0.0; // sum of Delta_c increments
    double work_integral = 0.0;  // int of P(s,u(s)) ds
    double defect = 0.0;         // LHS - RHS of the energy balance
};

struct ValidationSettings {
    double stability_tol = 1e-6;   // margin slack for (S_D,R)
    double equation_tol = -1.0;    // auto when negative
    double jump_tol = 1e-6;        // slope inequalities along jump intervals
    double identity_tol = 1e-6;    // (J_VE) defects, relative
    double balance_tol = -1.0;     // auto: 1e-5 * (1 + energy range)
    int max_samples_per_segment = 256;
};

struct ValidationReport {
    bool stability_ok = true;
    int stability_violations = 0;
    double worst_stability_margin = 0.0;
    bool equation_ok = true;
    double worst_equation_residual = 0.0;
    bool jump_conditions_ok = true;
    bool jump_identities_ok = true;
    double worst_jump_identity_defect = 0.0;
    BalanceReport balance;
    double balance_tol_used = 0.0;
    std::vector<std::string> failures;

    bool passed() const;
};

/// Full VE-solution validator: stability off jumps, the one-sided slope
/// equations on the supports of increase/decrease, jump conditions and
/// identities, and the augmented energy balance.
ValidationReport validate_ve(const RISystem& sys, const VECurve& curve,
                             const ValidationSettings& settings = {},
                             const MinimizeSettings& min_set = {});

/// Pointwise Psi-variation over [s,t] of the stored samples and jumps.
double total_variation_psi(const RISystem& sys, const VECurve& curve, double s, double t);
double total_variation_psi(const RISystem& sys, const DiscreteSolution& disc, double s, double t);

/// Psi-variation plus jump-cost increments over [s,t].
BalanceReport augmented_variation(const RISystem& sys, const VECurve& curve, double s, double t,
                                  const MinimizeSettings& settings = {});

/// Restriction/concatenation principle: the whole curve validates iff every
/// piece between the split times does.
bool check_restriction_concatenation(const RISystem& sys, const VECurve& curve,
                                     const std::vector<double>& splits,
                                     const ValidationSettings& settings = {});

VECurve restrict_curve(const VECurve& curve, double s, double t);
VECurve concatenate(const std::vector<VECurve>& pieces); // throws on endpoint mismatch

/// Energy-balance defect of the left-continuous piecewise-constant
/// interpolant of a discrete solution; halves when the step halves on
/// jump-free scenarios.
double discrete_balance_defect(const RISystem& sys, const DiscreteSolution& disc);

} // namespace riveq

#endif
