#include "riveq/system.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <random>
#include <sstream>

namespace riveq {

// ---------------------------------------------------------------------------
// Polynomial

Polynomial::Polynomial(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
    if (coeffs_.empty()) coeffs_.push_back(0.0);
    while (coeffs_.size() > 1 && coeffs_.back() == 0.0) coeffs_.pop_back();
}

double Polynomial::value(double x) const {
    double r = 0.0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) r = r * x + *it;
    return r;
}

double Polynomial::derivative(double x) const {
    double r = 0.0;
    for (int k = static_cast<int>(coeffs_.size()) - 1; k >= 1; --k) {
        r = r * x + k * coeffs_[static_cast<size_t>(k)];
    }
    return r;
}

Polynomial Polynomial::derivative_poly() const {
    if (coeffs_.size() <= 1) return Polynomial({0.0});
    std::vector<double> d(coeffs_.size() - 1);
    for (size_t k = 1; k < coeffs_.size(); ++k) d[k - 1] = static_cast<double>(k) * coeffs_[k];
    return Polynomial(std::move(d));
}

Polynomial Polynomial::reflected() const {
    std::vector<double> c = coeffs_;
    for (size_t k = 1; k < c.size(); k += 2) c[k] = -c[k];
    return Polynomial(std::move(c));
}

Polynomial Polynomial::negated() const {
    std::vector<double> c = coeffs_;
    for (auto& x : c) x = -x;
    return Polynomial(std::move(c));
}

// ---------------------------------------------------------------------------
// EnergyDensity

EnergyDensity EnergyDensity::polynomial(std::vector<double> coeffs, double eval_bound) {
    EnergyDensity w;
    w.kind_ = Kind::polynomial;
    w.eval_bound_ = eval_bound;
    w.poly_ = Polynomial(std::move(coeffs));
    w.dpoly_ = w.poly_.derivative_poly();
    w.ddpoly_ = w.dpoly_.derivative_poly();
    return w;
}

EnergyDensity EnergyDensity::quartic_double_well(double scale, double eval_bound) {
    if (!(scale > 0)) throw Error("quartic_double_well: scale must be positive");
    EnergyDensity w = polynomial({scale / 4, 0.0, -scale / 2, 0.0, scale / 4}, eval_bound);
    w.kind_ = Kind::quartic_double_well;
    w.scale_ = scale;
    return w;
}

EnergyDensity EnergyDensity::composite(std::vector<CompositePiece> pieces, double eval_bound) {
    if (pieces.empty()) throw Error("composite: no pieces");
    std::sort(pieces.begin(), pieces.end(),
              [](const CompositePiece& a, const CompositePiece& b) { return a.lo < b.lo; });
    constexpr double kJoinTol = 1e-12;
    for (size_t i = 0; i + 1 < pieces.size(); ++i) {
        const double x = pieces[i].hi;
        if (std::abs(x - pieces[i + 1].lo) > kJoinTol)
            throw Error("composite: pieces are not contiguous");
        const double dv = pieces[i].poly.value(x) - pieces[i + 1].poly.value(x);
        const double dd = pieces[i].poly.derivative(x) - pieces[i + 1].poly.derivative(x);
        if (std::abs(dv) > kJoinTol || std::abs(dd) > kJoinTol) {
            std::ostringstream os;
            os << "composite: C1 mismatch at breakpoint " << x << " (value gap " << dv
               << ", derivative gap " << dd << ")";
            throw Error(os.str());
        }
    }
    EnergyDensity w;
    w.kind_ = Kind::composite;
    w.eval_bound_ = eval_bound;
    w.pieces_ = std::move(pieces);
    for (const auto& p : w.pieces_) {
        w.dpieces_.push_back(p.poly.derivative_poly());
        w.ddpieces_.push_back(w.dpieces_.back().derivative_poly());
    }
    return w;
}

const Polynomial& EnergyDensity::piece_at(double u) const {
    // first and last pieces extend beyond the hull
    size_t lo = 0, hi = pieces_.size() - 1;
    while (lo < hi) {
        size_t mid = (lo + hi) / 2;
        if (u <= pieces_[mid].hi)
            hi = mid;
        else
            lo = mid + 1;
    }
    return pieces_[lo].poly;
}

double EnergyDensity::value(double u) const {
    if (kind_ != Kind::composite) return poly_.value(u);
    return piece_at(u).value(u);
}

double EnergyDensity::derivative(double u) const {
    if (kind_ != Kind::composite) return dpoly_.value(u);
    return piece_at(u).derivative(u);
}

double EnergyDensity::second_derivative(double u) const {
    if (kind_ != Kind::composite) return ddpoly_.value(u);
    size_t lo = 0, hi = pieces_.size() - 1;
    while (lo < hi) {
        size_t mid = (lo + hi) / 2;
        if (u <= pieces_[mid].hi)
            hi = mid;
        else
            lo = mid + 1;
    }
    return ddpieces_[lo].value(u);
}

namespace {

// sign-change roots of f on [lo,hi], dense grid + bisection
template <class F>
std::vector<double> grid_roots(F&& f, double lo, double hi, int n = 2048) {
    std::vector<double> roots;
    if (!(lo < hi)) return roots;
    double prev_x = lo, prev_f = f(lo);
    for (int i = 1; i <= n; ++i) {
        const double x = lo + (hi - lo) * i / n;
        const double fx = f(x);
        if (prev_f == 0.0) roots.push_back(prev_x);
        if ((prev_f < 0 && fx > 0) || (prev_f > 0 && fx < 0)) {
            double a = prev_x, b = x, fa = prev_f;
            for (int k = 0; k < 80; ++k) {
                const double m = 0.5 * (a + b);
                const double fm = f(m);
                if ((fa < 0) == (fm < 0)) {
                    a = m;
                    fa = fm;
                } else {
                    b = m;
                }
            }
            roots.push_back(0.5 * (a + b));
        }
        prev_x = x;
        prev_f = fx;
    }
    return roots;
}

} // namespace

std::vector<double> EnergyDensity::derivative_stationary_points(double lo, double hi) const {
    auto w2 = [this](double u) { return second_derivative(u); };
    std::vector<double> pts = grid_roots(w2, lo, hi);
    if (kind_ == Kind::composite) {
        for (size_t i = 0; i + 1 < pieces_.size(); ++i) {
            const double x = pieces_[i].hi;
            if (x > lo && x < hi) pts.push_back(x);
        }
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [](double a, double b) { return std::abs(a - b) < 1e-12; }),
              pts.end());
    return pts;
}

EnergyDensity EnergyDensity::reflected() const {
    switch (kind_) {
        case Kind::quartic_double_well:
            return *this; // even
        case Kind::polynomial:
            return polynomial(poly_.reflected().coefficients(), eval_bound_);
        case Kind::composite: {
            std::vector<CompositePiece> rp;
            for (auto it = pieces_.rbegin(); it != pieces_.rend(); ++it)
                rp.push_back({-it->hi, -it->lo, it->poly.reflected()});
            return composite(std::move(rp), eval_bound_);
        }
    }
    throw Error("unreachable");
}

// ---------------------------------------------------------------------------
// Loading

Loading Loading::linear(double slope, double intercept, double a, double b) {
    if (!(a < b)) throw Error("loading: need a < b");
    Loading l;
    l.kind_ = Kind::linear;
    l.a_ = a;
    l.b_ = b;
    l.slope_ = slope;
    l.intercept_ = intercept;
    l.compute_range();
    return l;
}

Loading Loading::sine(double amplitude, double frequency, double phase, double a, double b) {
    if (!(a < b)) throw Error("loading: need a < b");
    Loading l;
    l.kind_ = Kind::sine;
    l.a_ = a;
    l.b_ = b;
    l.amplitude_ = amplitude;
    l.frequency_ = frequency;
    l.phase_ = phase;
    l.compute_range();
    return l;
}

Loading Loading::piecewise(std::vector<Segment> segments) {
    if (segments.empty()) throw Error("loading: no segments");
    std::sort(segments.begin(), segments.end(),
              [](const Segment& x, const Segment& y) { return x.t0 < y.t0; });
    constexpr double kJoinTol = 1e-12;
    for (size_t i = 0; i + 1 < segments.size(); ++i) {
        const double t = segments[i].t1;
        if (std::abs(t - segments[i + 1].t0) > kJoinTol)
            throw Error("loading: segments are not contiguous");
        if (std::abs(segments[i].poly.value(t) - segments[i + 1].poly.value(t)) > kJoinTol ||
            std::abs(segments[i].poly.derivative(t) - segments[i + 1].poly.derivative(t)) >
                kJoinTol)
            throw Error("loading: C1 mismatch at segment join");
    }
    Loading l;
    l.kind_ = Kind::piecewise;
    l.a_ = segments.front().t0;
    l.b_ = segments.back().t1;
    l.segments_ = std::move(segments);
    for (const auto& s : l.segments_) l.dsegments_.push_back(s.poly.derivative_poly());
    l.compute_range();
    return l;
}

double Loading::value(double t) const {
    switch (kind_) {
        case Kind::linear:
            return slope_ * t + intercept_;
        case Kind::sine:
            return amplitude_ * std::sin(frequency_ * t + phase_);
        case Kind::piecewise: {
            size_t lo = 0, hi = segments_.size() - 1;
            while (lo < hi) {
                size_t mid = (lo + hi) / 2;
                if (t <= segments_[mid].t1)
                    hi = mid;
                else
                    lo = mid + 1;
            }
            return segments_[lo].poly.value(t);
        }
    }
    throw Error("unreachable");
}

double Loading::derivative(double t) const {
    switch (kind_) {
        case Kind::linear:
            return slope_;
        case Kind::sine:
            return amplitude_ * frequency_ * std::cos(frequency_ * t + phase_);
        case Kind::piecewise: {
            size_t lo = 0, hi = segments_.size() - 1;
            while (lo < hi) {
                size_t mid = (lo + hi) / 2;
                if (t <= segments_[mid].t1)
                    hi = mid;
                else
                    lo = mid + 1;
            }
            return dsegments_[lo].value(t);
        }
    }
    throw Error("unreachable");
}

void Loading::compute_range() {
    const int n = 4096;
    double mn = value(a_), mx = mn, md = std::abs(derivative(a_));
    for (int i = 1; i <= n; ++i) {
        const double t = a_ + (b_ - a_) * i / n;
        const double v = value(t);
        mn = std::min(mn, v);
        mx = std::max(mx, v);
        md = std::max(md, std::abs(derivative(t)));
    }
    if (kind_ == Kind::sine) {
        // interior critical points of the sine are exact
        const double w = frequency_, ph = phase_;
        if (w != 0.0) {
            const double pi = 3.14159265358979323846;
            double k0 = std::ceil((w * a_ + ph) / pi - 0.5);
            for (double k = k0;; k += 1.0) {
                const double t = ((k + 0.5) * pi - ph) / w;
                if (t > b_) break;
                if (t >= a_) {
                    const double v = value(t);
                    mn = std::min(mn, v);
                    mx = std::max(mx, v);
                }
            }
            md = std::max(md, std::abs(amplitude_ * w));
        }
    }
    min_value_ = mn;
    max_value_ = mx;
    max_abs_derivative_ = md;
}

double Loading::max_abs() const { return std::max(std::abs(min_value_), std::abs(max_value_)); }

bool Loading::is_nondecreasing() const {
    const int n = 2048;
    for (int i = 0; i <= n; ++i) {
        if (derivative(a_ + (b_ - a_) * i / n) < -1e-12) return false;
    }
    return true;
}

bool Loading::is_nonincreasing() const {
    const int n = 2048;
    for (int i = 0; i <= n; ++i) {
        if (derivative(a_ + (b_ - a_) * i / n) > 1e-12) return false;
    }
    return true;
}

Loading Loading::negated() const {
    switch (kind_) {
        case Kind::linear:
            return linear(-slope_, -intercept_, a_, b_);
        case Kind::sine:
            return sine(-amplitude_, frequency_, phase_, a_, b_);
        case Kind::piecewise: {
            std::vector<Segment> neg;
            for (const auto& s : segments_) neg.push_back({s.t0, s.t1, s.poly.negated()});
            return piecewise(std::move(neg));
        }
    }
    throw Error("unreachable");
}

// ---------------------------------------------------------------------------
// Dissipation / ViscousCorrection

Dissipation::Dissipation(double ap, double am) : alpha_plus(ap), alpha_minus(am) {
    if (!(ap > 0) || !(am > 0)) throw Error("dissipation: alpha+ and alpha- must be positive");
}

ViscousCorrection ViscousCorrection::none() { return ViscousCorrection{}; }

ViscousCorrection ViscousCorrection::quadratic(double mu) {
    if (mu < 0) throw Error("viscous correction: mu must be nonnegative");
    ViscousCorrection d;
    d.kind_ = Kind::quadratic;
    d.mu_ = mu;
    return d;
}

ViscousCorrection ViscousCorrection::convex_of_psi(double coefficient, double exponent) {
    if (coefficient < 0 || exponent < 1)
        throw Error("viscous correction: need coefficient >= 0 and exponent >= 1");
    ViscousCorrection d;
    d.kind_ = Kind::convex_of_psi;
    d.coefficient_ = coefficient;
    d.exponent_ = exponent;
    return d;
}

double ViscousCorrection::eval(double u, double v, const Dissipation& psi) const {
    switch (kind_) {
        case Kind::none:
            return 0.0;
        case Kind::quadratic: {
            const double d = v - u;
            return 0.5 * mu_ * d * d;
        }
        case Kind::convex_of_psi:
            return coefficient_ * std::pow(psi.eval(v - u), exponent_);
    }
    return 0.0;
}

std::string ViscousCorrection::convention_string() const {
    std::ostringstream os;
    switch (kind_) {
        case Kind::none:
            os << "delta=none (energetic)";
            break;
        case Kind::quadratic:
            os << "delta=quadratic 0.5*mu*(v-u)^2 mu=" << mu_;
            break;
        case Kind::convex_of_psi:
            os << "delta=convex_of_psi " << coefficient_ << "*Psi(v-u)^" << exponent_;
            break;
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// RISystem

RISystem::RISystem(EnergyDensity W, Loading ell, Dissipation psi, ViscousCorrection delta)
    : W_(std::move(W)), ell_(std::move(ell)), psi_(psi), delta_(delta) {
    check_invariants();
}

RISystem::RISystem(const RISystem& other)
    : W_(other.W_), ell_(other.ell_), psi_(other.psi_), delta_(other.delta_) {}

RISystem& RISystem::operator=(const RISystem& other) {
    if (this != &other) {
        W_ = other.W_;
        ell_ = other.ell_;
        psi_ = other.psi_;
        delta_ = other.delta_;
        std::lock_guard<std::mutex> lock(reflect_mutex_);
        reflected_.reset();
    }
    return *this;
}

void RISystem::check_invariants() const {
    const double B = W_.eval_bound();
    if (!(B > 0)) throw Error("system: eval bound must be positive");
    const double lmax = ell_.max_abs();
    if (!(W_.derivative(-B) < -(lmax + psi_.alpha_minus + 1.0)))
        throw Error("system: W' not coercive at -B for the configured loading bound");
    if (!(W_.derivative(B) > lmax + psi_.alpha_plus + 1.0))
        throw Error("system: W' not coercive at +B for the configured loading bound");
    if (!std::isfinite(energy_unchecked(ell_.t_begin(), 0.0)) ||
        !std::isfinite(energy_unchecked(ell_.t_end(), 0.0)))
        throw Error("system: energy not finite on the domain");
}

double RISystem::energy(double t, double u) const {
    const double B = W_.eval_bound();
    const double t_slack = 1e-9 * (1.0 + std::abs(ell_.t_end() - ell_.t_begin()));
    if (std::abs(u) > B)
        throw DomainViolation("energy: |u| exceeds the eval bound");
    if (t < ell_.t_begin() - t_slack || t > ell_.t_end() + t_slack)
        throw DomainViolation("energy: t outside [a,b]");
    return energy_unchecked(t, u);
}

const RISystem& RISystem::reflected() const {
    std::lock_guard<std::mutex> lock(reflect_mutex_);
    if (!reflected_) {
        reflected_ = std::make_shared<const RISystem>(
            RISystem(W_.reflected(), ell_.negated(), psi_.reflected(), delta_));
    }
    return *reflected_;
}

// ---------------------------------------------------------------------------
// Admissibility

unsigned long long probe_seed() {
    if (const char* env = std::getenv("RIVEQ_SEED")) {
        return std::strtoull(env, nullptr, 10);
    }
    return 20260810ull;
}

AdmissibilityReport check_admissibility(const RISystem& sys, int samples) {
    if (samples < 10) throw PreconditionViolation("check_admissibility: samples >= 10 required");

    AdmissibilityReport rep;
    const double range = std::min(10.0, sys.eval_bound());
    const double scales[3] = {1e-2, 1e-4, 1e-6};
    std::ostringstream summary;

    for (int s = 0; s < 3; ++s) {
        double worst = 0.0;
        for (int i = 0; i < samples; ++i) {
            const double u = -range + 2.0 * range * i / (samples - 1);
            const double h = scales[s];
            worst = std::max(worst, sys.delta(u, u + h) / h);
            worst = std::max(worst, sys.delta(u, u - h) / h);
        }
        rep.delta1_ratios[s] = worst;
    }
    // (d1): the ratio must fall toward 0, factor >= 10 between scales
    rep.delta1_ok = true;
    for (int s = 0; s + 1 < 3; ++s) {
        if (rep.delta1_ratios[s] <= 1e-14) continue;
        if (!(rep.delta1_ratios[s + 1] * 10.0 <= rep.delta1_ratios[s])) rep.delta1_ok = false;
    }

    if (sys.correction().kind() == ViscousCorrection::Kind::none) {
        rep.delta2_vacuous = true;
        rep.delta2_ok = true;
        rep.delta2_min_gap = 0.0;
        summary << "energetic (delta == 0), (d2) vacuous";
    } else {
        std::mt19937_64 rng(probe_seed());
        std::uniform_real_distribution<double> unif(-range, range);
        double min_gap = std::numeric_limits<double>::infinity();
        for (int i = 0; i < samples; ++i) {
            double a = unif(rng), b = unif(rng), c = unif(rng);
            double u0 = std::min({a, b, c}), u1 = std::max({a, b, c});
            double v = a + b + c - u0 - u1;
            if (!(u0 < v && v < u1)) continue;
            const double gap = sys.delta(u0, u1) - sys.delta(u0, v) - sys.delta(v, u1);
            if (gap < min_gap) {
                min_gap = gap;
                rep.violating_triple[0] = u0;
                rep.violating_triple[1] = v;
                rep.violating_triple[2] = u1;
            }
        }
        rep.delta2_min_gap = min_gap;
        rep.delta2_ok = min_gap > 0.0;
        if (!rep.delta2_ok) {
            summary << "(d2) fails: gap " << min_gap << " at (" << rep.violating_triple[0] << ", "
                    << rep.violating_triple[1] << ", " << rep.violating_triple[2] << ")";
        }
    }
    if (!rep.delta1_ok) {
        if (summary.tellp() > 0) summary << "; ";
        summary << "(d1) fails: ratios " << rep.delta1_ratios[0] << " -> " << rep.delta1_ratios[1]
                << " -> " << rep.delta1_ratios[2] << " do not vanish";
    }
    rep.passed = rep.delta1_ok && rep.delta2_ok;
    if (rep.passed && summary.tellp() == 0) summary << "admissible";
    rep.summary = summary.str();
    return rep;
}

} // namespace riveq
