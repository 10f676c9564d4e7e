#ifndef RIVEQ_SYSTEM_HPP
#define RIVEQ_SYSTEM_HPP

#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "riveq/errors.hpp"

namespace riveq {

/// Dense polynomial, coefficients lowest degree first.
class Polynomial {
public:
    Polynomial() : coeffs_{0.0} {}
    explicit Polynomial(std::vector<double> coeffs);

    double value(double x) const;
    double derivative(double x) const;
    Polynomial derivative_poly() const;
    const std::vector<double>& coefficients() const { return coeffs_; }
    int degree() const { return static_cast<int>(coeffs_.size()) - 1; }

    /// p(x) -> p(-x)
    Polynomial reflected() const;
    Polynomial negated() const;

private:
    std::vector<double> coeffs_;
};

struct CompositePiece {
    double lo;
    double hi;
    Polynomial poly;
};

/// Energy density W: C^1, derivative-coercive within the eval bound B.
///
/// Kinds: a single polynomial, the scaled quartic double well
/// W(u) = scale/4 (u^2-1)^2, or a C^1 piecewise-polynomial composite.
class EnergyDensity {
public:
    enum class Kind { polynomial, quartic_double_well, composite };

    static EnergyDensity polynomial(std::vector<double> coeffs, double eval_bound = 1e3);
    static EnergyDensity quartic_double_well(double scale = 1.0, double eval_bound = 1e3);
    static EnergyDensity composite(std::vector<CompositePiece> pieces, double eval_bound = 1e3);

    double value(double u) const;
    double derivative(double u) const;
    double second_derivative(double u) const;

    Kind kind() const { return kind_; }
    double eval_bound() const { return eval_bound_; }
    double quartic_scale() const { return scale_; }
    const std::vector<CompositePiece>& pieces() const { return pieces_; }

    /// Roots of W'' in [lo,hi] plus composite breakpoints; these are the
    /// stationary points of W' that envelope grids must contain exactly.
    std::vector<double> derivative_stationary_points(double lo, double hi) const;

    EnergyDensity reflected() const;

private:
    EnergyDensity() = default;
    const Polynomial& piece_at(double u) const;

    Kind kind_ = Kind::polynomial;
    double eval_bound_ = 1e3;
    double scale_ = 1.0;                  // quartic only
    std::vector<CompositePiece> pieces_;  // composite: contiguous, C^1
    Polynomial poly_, dpoly_, ddpoly_;    // polynomial/quartic
    std::vector<Polynomial> dpieces_, ddpieces_;
};

/// External loading ell in C^1([a,b]).
class Loading {
public:
    enum class Kind { linear, sine, piecewise };

    static Loading linear(double slope, double intercept, double a, double b);
    static Loading sine(double amplitude, double frequency, double phase, double a, double b);
    struct Segment {
        double t0;
        double t1;
        Polynomial poly;
    };
    static Loading piecewise(std::vector<Segment> segments);

    double value(double t) const;
    double derivative(double t) const;

    double t_begin() const { return a_; }
    double t_end() const { return b_; }
    double min_value() const { return min_value_; }
    double max_value() const { return max_value_; }
    double max_abs() const;
    double max_abs_derivative() const { return max_abs_derivative_; }
    bool is_nondecreasing() const;
    bool is_nonincreasing() const;
    Kind kind() const { return kind_; }

    /// -ell
    Loading negated() const;

private:
    Loading() = default;
    void compute_range();

    Kind kind_ = Kind::linear;
    double a_ = 0, b_ = 1;
    double slope_ = 0, intercept_ = 0;
    double amplitude_ = 0, frequency_ = 1, phase_ = 0;
    std::vector<Segment> segments_;
    std::vector<Polynomial> dsegments_;
    double min_value_ = 0, max_value_ = 0, max_abs_derivative_ = 0;
};

/// Psi(v) = alpha_plus v^+ + alpha_minus v^-.
struct Dissipation {
    double alpha_plus;
    double alpha_minus;

    Dissipation(double ap, double am);
    double eval(double v) const {
        return v >= 0 ? alpha_plus * v : -alpha_minus * v;
    }
    Dissipation reflected() const { return {alpha_minus, alpha_plus}; }
};

/// Viscous correction delta(u,v) >= 0 with delta(u,u) = 0.
///
/// quadratic uses the one-dimensional convention
/// delta_mu(u,v) = mu/2 (v-u)^2, so the convexity threshold for a C^2
/// energy is exactly mu >= -min W''. convex_of_psi composes a power law
/// f(r) = c r^p with Psi(v-u).
class ViscousCorrection {
public:
    enum class Kind { none, quadratic, convex_of_psi };

    static ViscousCorrection none();
    static ViscousCorrection quadratic(double mu);
    static ViscousCorrection convex_of_psi(double coefficient, double exponent);

    double eval(double u, double v, const Dissipation& psi) const;
    Kind kind() const { return kind_; }
    double mu() const { return mu_; }
    double coefficient() const { return coefficient_; }
    double exponent() const { return exponent_; }

    /// Human-readable convention string, echoed into CSV schema comments.
    std::string convention_string() const;

private:
    Kind kind_ = Kind::none;
    double mu_ = 0;
    double coefficient_ = 0;
    double exponent_ = 2;
};

struct AdmissibilityReport {
    bool passed = false;
    bool delta1_ok = false;
    // max over sampled u of delta(u, u+-h)/h at h = 1e-2, 1e-4, 1e-6
    double delta1_ratios[3] = {0, 0, 0};
    bool delta2_ok = false;
    bool delta2_vacuous = false; // kind none: delta == 0, (d2) vacuous
    double delta2_min_gap = 0;
    double violating_triple[3] = {0, 0, 0};
    std::string summary;
};

/// The rate-independent system (R, E, Psi, delta) with
/// E(t,u) = W(u) - ell(t) u and D(u,v) = Psi(v-u) + delta(u,v).
class RISystem {
public:
    RISystem(EnergyDensity W, Loading ell, Dissipation psi, ViscousCorrection delta);
    RISystem(const RISystem& other);
    RISystem& operator=(const RISystem& other);

    double energy(double t, double u) const;           // E(t,u), domain checked
    double energy_unchecked(double t, double u) const { // hot paths
        return W_.value(u) - ell_.value(t) * u;
    }
    double psi(double v) const { return psi_.eval(v); }
    double delta(double u, double v) const { return delta_.eval(u, v, psi_); }
    double dissipation(double u, double v) const { return psi(v - u) + delta(u, v); }
    double power(double t, double u) const { return -ell_.derivative(t) * u; }

    const EnergyDensity& W() const { return W_; }
    const Loading& loading() const { return ell_; }
    const Dissipation& dissipation_potential() const { return psi_; }
    const ViscousCorrection& correction() const { return delta_; }
    double eval_bound() const { return W_.eval_bound(); }

    /// The mirrored system (u -> -u, ell -> -ell, alpha+ <-> alpha-).
    /// Decreasing-jump machinery runs increasing algorithms on it.
    const RISystem& reflected() const;

private:
    void check_invariants() const;

    EnergyDensity W_;
    Loading ell_;
    Dissipation psi_;
    ViscousCorrection delta_;

    mutable std::shared_ptr<const RISystem> reflected_;
    mutable std::mutex reflect_mutex_;
};

/// Samples (d1) at scales {1e-2,1e-4,1e-6} (decrease factor >= 10) and the
/// reverse triangle inequality (d2) on random triples u0 < v < u1.
AdmissibilityReport check_admissibility(const RISystem& sys, int samples);

/// Seed for randomized probe sampling; reads RIVEQ_SEED, defaults fixed.
unsigned long long probe_seed();

} // namespace riveq

#endif
