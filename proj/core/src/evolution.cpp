#include "riveq/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "riveq/envelopes.hpp"
#include "riveq/moreau.hpp"
#include "riveq/slopes.hpp"

namespace riveq {

namespace {

double scale_tol(double tol, double x) { return tol * (1.0 + std::abs(x)); }

} // namespace

// ---------------------------------------------------------------------------
// Partition / discrete scheme

Partition Partition::uniform(double a, double b, int steps) {
    if (!(a < b) || steps < 1) throw PreconditionViolation("partition: need a < b, steps >= 1");
    Partition p;
    p.nodes.resize(static_cast<size_t>(steps) + 1);
    for (int i = 0; i <= steps; ++i) p.nodes[static_cast<size_t>(i)] = a + (b - a) * i / steps;
    p.nodes.back() = b;
    return p;
}

double Partition::max_step() const {
    double m = 0.0;
    for (size_t i = 1; i < nodes.size(); ++i) m = std::max(m, nodes[i] - nodes[i - 1]);
    return m;
}

void Partition::validate() const {
    if (nodes.size() < 2) throw PreconditionViolation("partition: need at least two nodes");
    for (size_t i = 1; i < nodes.size(); ++i)
        if (!(nodes[i] > nodes[i - 1]))
            throw PreconditionViolation("partition: nodes not strictly increasing");
}

DiscreteSolution ims_solve(const RISystem& sys, const Partition& partition, double u0,
                           TieRule tie_rule, const MinimizeSettings& settings) {
    partition.validate();
    if (std::abs(u0) > sys.eval_bound())
        throw PreconditionViolation("ims_solve: u0 beyond the eval bound");

    DiscreteSolution out;
    out.partition = partition;
    out.values.resize(partition.nodes.size());
    out.multiple_minima.assign(partition.nodes.size(), false);
    out.values[0] = u0;

    for (size_t n = 1; n < partition.nodes.size(); ++n) {
        const double t = partition.nodes[n];
        const double prev = out.values[n - 1];
        const MoreauResult m = moreau_yosida(sys, t, prev, settings);
        out.multiple_minima[n] = m.minimal_set.minimizers.size() > 1;

        double pick;
        if (tie_rule == TieRule::global_min) {
            pick = m.minimal_set.minimizers.front();
        } else {
            // the previous state stays exactly when it remains near-minimal
            const double at_prev = sys.energy_unchecked(t, prev);
            if (at_prev <= m.value + settings.value_tie_tol) {
                out.values[n] = prev;
                continue;
            }
            pick = m.minimal_set.minimizers.front();
            double best_d = std::numeric_limits<double>::infinity();
            for (double z : m.minimal_set.minimizers) {
                const double d = std::abs(z - prev);
                const bool better =
                    d < best_d - 1e-15 ||
                    (std::abs(d - best_d) <= 1e-15 && tie_rule == TieRule::nearest_right &&
                     z > pick);
                if (better) {
                    best_d = d;
                    pick = z;
                }
            }
        }
        out.values[n] = pick;
    }
    return out;
}

// ---------------------------------------------------------------------------
// VECurve

double VECurve::t_begin() const {
    if (segments.empty() || segments.front().empty()) throw Error("curve: empty");
    return segments.front().front().t;
}

double VECurve::t_end() const {
    if (segments.empty() || segments.back().empty()) throw Error("curve: empty");
    return segments.back().back().t;
}

void VECurve::validate() const {
    if (segments.empty()) throw Error("curve: no segments");
    if (segments.size() != jumps.size() + 1)
        throw Error("curve: segment/jump counts inconsistent");
    for (const auto& seg : segments) {
        if (seg.empty()) throw Error("curve: empty segment");
        for (size_t i = 1; i < seg.size(); ++i)
            if (!(seg[i].t >= seg[i - 1].t)) throw Error("curve: segment times decrease");
    }
    for (size_t j = 0; j < jumps.size(); ++j) {
        const auto& jr = jumps[j];
        const auto& before = segments[j].back();
        const auto& after = segments[j + 1].front();
        const double tol_t = scale_tol(1e-9, jr.t);
        if (std::abs(before.t - jr.t) > tol_t || std::abs(after.t - jr.t) > tol_t)
            throw Error("curve: jump time does not match adjacent segments");
        if (std::abs(before.u - jr.u_left) > scale_tol(1e-7, jr.u_left) ||
            std::abs(after.u - jr.u_right) > scale_tol(1e-7, jr.u_right))
            throw Error("curve: jump limits do not match adjacent segments");
        const double lo = std::min(jr.u_left, jr.u_right);
        const double hi = std::max(jr.u_left, jr.u_right);
        if (jr.u_at < lo - scale_tol(1e-9, lo) || jr.u_at > hi + scale_tol(1e-9, hi))
            throw Error("curve: jump value outside the jump interval");
    }
}

namespace {

double interp(const std::vector<CurveSample>& seg, double t) {
    if (t <= seg.front().t) return seg.front().u;
    if (t >= seg.back().t) return seg.back().u;
    const auto it = std::lower_bound(seg.begin(), seg.end(), t,
                                     [](const CurveSample& s, double x) { return s.t < x; });
    const size_t j = static_cast<size_t>(it - seg.begin());
    const auto& s1 = seg[j];
    const auto& s0 = seg[j - 1];
    if (s1.t <= s0.t) return s1.u;
    const double w = (t - s0.t) / (s1.t - s0.t);
    return s0.u * (1.0 - w) + s1.u * w;
}

} // namespace

double VECurve::value(double t) const {
    for (size_t j = 0; j < jumps.size(); ++j)
        if (std::abs(t - jumps[j].t) <= scale_tol(1e-12, t)) return jumps[j].u_at;
    for (size_t s = 0; s < segments.size(); ++s) {
        if (t <= segments[s].back().t || s + 1 == segments.size())
            return interp(segments[s], t);
    }
    return segments.back().back().u;
}

double VECurve::left_limit(double t) const {
    for (size_t j = 0; j < jumps.size(); ++j)
        if (std::abs(t - jumps[j].t) <= scale_tol(1e-12, t)) return jumps[j].u_left;
    return value(t);
}

double VECurve::right_limit(double t) const {
    for (size_t j = 0; j < jumps.size(); ++j)
        if (std::abs(t - jumps[j].t) <= scale_tol(1e-12, t)) return jumps[j].u_right;
    return value(t);
}

double VECurve::min_value() const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& seg : segments)
        for (const auto& s : seg) m = std::min(m, s.u);
    return m;
}

double VECurve::max_value() const {
    double m = -std::numeric_limits<double>::infinity();
    for (const auto& seg : segments)
        for (const auto& s : seg) m = std::max(m, s.u);
    return m;
}

// ---------------------------------------------------------------------------
// Discrete-to-limit extraction

namespace {

double median_of(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Frozen jump time: the earliest t in the window at which u_l is strictly
// unstable. The residual grows linearly past the trigger and is computed by
// a full minimization, so this pins t* far more accurately than slope
// values, whose noise floor would starve the frozen-time chain of its
// energy margin.
double residual_jump_time(const RISystem& sys, double u_l, double tlo, double thi,
                          const MinimizeSettings& settings) {
    // the margin clears the one-sided noise floor of slope evaluations, so
    // contact detection at the frozen time cannot mistake the departure's
    // neighborhood for a fresh contact
    auto raw = [&](double t) {
        const MoreauResult m = moreau_yosida(sys, t, u_l, settings);
        const double e = sys.energy_unchecked(t, u_l);
        return (e - m.value) - 1e-7 * (1.0 + std::abs(e));
    };
    if (raw(tlo) >= 0) return tlo;
    if (raw(thi) <= 0) return std::numeric_limits<double>::quiet_NaN(); // not yet unstable
    double a = tlo, b = thi;
    for (int k = 0; k < 60 && b - a > 1e-13 * (1.0 + std::abs(b)); ++k) {
        const double m = 0.5 * (a + b);
        if (raw(m) <= 0)
            a = m;
        else
            b = m;
    }
    return b; // the strictly unstable side
}

// landing polish: the jump arrives on a rising branch where W' equals the
// shifted load level
double polish_branch_root(const RISystem& sys, double target, double u0) {
    double x = u0;
    for (int it = 0; it < 12; ++it) {
        const double d2 = sys.W().second_derivative(x);
        if (!(std::abs(d2) > 1e-8)) return u0;
        const double nx = x - (sys.W().derivative(x) - target) / d2;
        if (std::abs(nx - u0) > 0.05 * (1.0 + std::abs(u0))) return u0;
        if (std::abs(nx - x) <= 1e-14 * (1.0 + std::abs(x))) return nx;
        x = nx;
    }
    return u0;
}

} // namespace

VECurve extract_limit(const RISystem& sys, double u0, int levels, const ExtractSettings& es,
                      const MinimizeSettings& min_set) {
    if (levels < 3) throw PreconditionViolation("extract_limit: need at least 3 levels");
    const Loading& ell = sys.loading();

    std::vector<DiscreteSolution> disc;
    disc.reserve(static_cast<size_t>(levels));
    for (int k = 0; k < levels; ++k) {
        const int n = es.base_steps << k;
        disc.push_back(
            ims_solve(sys, Partition::uniform(ell.t_begin(), ell.t_end(), n), u0, es.tie_rule,
                      min_set));
    }
    const DiscreteSolution& fine = disc.back();
    const size_t nf = fine.values.size();

    double umin = fine.values[0], umax = fine.values[0];
    for (double v : fine.values) {
        umin = std::min(umin, v);
        umax = std::max(umax, v);
    }
    const double range = umax - umin;

    std::vector<double> inc(nf - 1);
    for (size_t i = 0; i + 1 < nf; ++i) inc[i] = std::abs(fine.values[i + 1] - fine.values[i]);
    const double med = median_of(inc);
    const double floor = es.jump_floor_frac * range + 1e-7 * (1.0 + std::abs(umax) + std::abs(umin));

    // a cell jumps when its increment dominates the median, exceeds the
    // absolute floor, and does not shrink under the last two refinements
    auto coarse_inc = [&](int lvl, double tmid) {
        const DiscreteSolution& d = disc[static_cast<size_t>(lvl)];
        const double a = d.partition.nodes.front();
        const double h = (d.partition.nodes.back() - a) / static_cast<double>(d.values.size() - 1);
        size_t c = static_cast<size_t>((tmid - a) / h);
        c = std::min(c, d.values.size() - 2);
        return std::abs(d.values[c + 1] - d.values[c]);
    };
    std::vector<char> jump_cell(nf - 1, 0);
    for (size_t i = 0; i + 1 < nf; ++i) {
        if (!(inc[i] > 10.0 * med && inc[i] > floor)) continue;
        const double tmid = 0.5 * (fine.partition.nodes[i] + fine.partition.nodes[i + 1]);
        bool persists = true;
        for (int back = 1; back <= 2 && levels - 1 - back >= 0; ++back)
            if (coarse_inc(levels - 1 - back, tmid) < 0.5 * inc[i]) persists = false;
        if (persists) jump_cell[i] = 1;
    }

    // merge adjacent jump cells into events
    struct Event {
        size_t first, last; // cell indices
    };
    std::vector<Event> events;
    for (size_t i = 0; i + 1 < nf; ++i) {
        if (!jump_cell[i]) continue;
        if (!events.empty() && events.back().last + 1 == i)
            events.back().last = i;
        else
            events.push_back({i, i});
    }

    VECurve curve;
    std::vector<CurveSample> seg;
    const double tau = fine.partition.max_step();
    size_t next_event = 0;
    for (size_t i = 0; i < nf; ++i) {
        if (next_event < events.size() && i == events[next_event].first + 1) {
            const Event& ev = events[next_event];
            const double u_l_disc = fine.values[ev.first];
            const double u_r_disc = fine.values[ev.last + 1];
            const bool increasing = u_r_disc > u_l_disc;

            // the discrete endpoints carry O(tau) lag; the envelope through
            // the jump gap identifies the plateau level and the exact
            // departure/landing pair
            const MonotoneEnvelope env = build_envelope(
                sys, u_l_disc,
                increasing ? EnvelopeSide::upper_of_ir : EnvelopeSide::lower_of_sl);
            const double level = env.value(0.5 * (u_l_disc + u_r_disc));
            const double u_l = increasing ? env.p_left(level) : env.q_right(level);
            const double t_disc = fine.partition.nodes[ev.last + 1];
            double t_star = residual_jump_time(
                sys, u_l, std::max(ell.t_begin(), t_disc - 8.0 * tau),
                std::min(ell.t_end(), t_disc + 8.0 * tau), min_set);
            if (!std::isfinite(t_star)) t_star = t_disc;
            const double target = increasing
                                      ? ell.value(t_star) - sys.dissipation_potential().alpha_plus
                                      : ell.value(t_star) + sys.dissipation_potential().alpha_minus;
            const double u_r = polish_branch_root(
                sys, target, increasing ? env.p_right(level) : env.q_left(level));

            JumpRecord jr;
            jr.t = t_star;
            jr.u_left = u_l;
            jr.u_at = u_r;
            jr.u_right = u_r;
            if (es.attach_transitions) {
                jr.left_transition = build_optimal_transition(sys, t_star, u_l, u_r, min_set);
                Transition point;
                point.t = t_star;
                point.points = {u_r};
                jr.right_transition = point;
            }

            if (seg.empty() || seg.back().t < t_star) seg.push_back({t_star, u_l});
            curve.segments.push_back(std::move(seg));
            curve.jumps.push_back(std::move(jr));
            seg.clear();
            seg.push_back({t_star, u_r});

            i = ev.last; // swallow transient cells
            ++next_event;
            continue;
        }
        if (!seg.empty() && fine.partition.nodes[i] <= seg.back().t) continue;
        seg.push_back({fine.partition.nodes[i], fine.values[i]});
    }
    curve.segments.push_back(std::move(seg));

    // Cauchy defect between the two finest levels, away from jump windows
    const DiscreteSolution& prev = disc[static_cast<size_t>(levels) - 2];
    double defect = 0.0;
    const double w = 8.0 * prev.partition.max_step();
    for (size_t m = 0; m < prev.values.size(); ++m) {
        const double t = prev.partition.nodes[m];
        bool near_jump = false;
        for (const auto& jr : curve.jumps)
            if (std::abs(t - jr.t) <= w) near_jump = true;
        if (near_jump) continue;
        defect = std::max(defect, std::abs(prev.values[m] - fine.values[2 * m]));
    }
    {
        std::ostringstream os;
        os << "cauchy defect " << defect << " at steps " << (es.base_steps << (levels - 1));
        curve.notes.push_back(os.str());
    }
    if (defect > es.cauchy_tol * (1.0 + range))
        throw NonConvergence("extract_limit: refinement levels disagree away from jumps");

    curve.validate();
    return curve;
}

// ---------------------------------------------------------------------------
// Monotone-loading solver

namespace {

VECurve solve_monotone_increasing(const RISystem& sys, double u0, int samples,
                                  const MinimizeSettings& settings, bool attach) {
    const Loading& ell = sys.loading();
    if (!ell.is_nondecreasing())
        throw PreconditionViolation("solve_monotone: loading is not nondecreasing");
    const double ap = sys.dissipation_potential().alpha_plus;
    const double am = sys.dissipation_potential().alpha_minus;

    const SlopePair sp0 = slopes(sys, u0, settings);
    if (ell.value(ell.t_begin()) < sp0.w_sl - am - scale_tol(1e-7, sp0.w_sl))
        throw PreconditionViolation("solve_monotone: initial state incompatible with l(a)");

    MonotoneEnvelope env = build_envelope(sys, u0, EnvelopeSide::upper_of_ir);

    VECurve curve;
    std::vector<CurveSample> seg;
    double current = u0;
    double prev_t = ell.t_begin();

    for (int i = 0; i <= samples; ++i) {
        const double t = ell.t_begin() + (ell.t_end() - ell.t_begin()) * i / samples;
        const double level = ell.value(t) - ap;

        for (int guard = 0; guard < 16; ++guard) {
            double target = current;
            if (level >= env.slope_at(current) - scale_tol(1e-9, level)) {
                const std::vector<double> contact = env.contact_selection(level);
                for (double c : contact) {
                    if (c >= current - scale_tol(1e-9, current)) {
                        target = std::max(current, c);
                        break;
                    }
                }
            }
            // a genuine jump shows as a stretch where the slope dips below
            // its value at the current state; the envelope over the dip is
            // the plateau level. Comparing slopes keeps envelope kink cells
            // (interpolation overshoot) from registering as gaps.
            double plateau = std::numeric_limits<double>::quiet_NaN();
            if (target - current > scale_tol(1e-7, current)) {
                const double s_cur = env.slope_at(current);
                int first_dip = -1, last_dip = -1;
                for (int k = 1; k <= 32; ++k) {
                    const double v = current + (target - current) * k / 33.0;
                    const bool dips = env.slope_at(v) < s_cur - scale_tol(1e-6, s_cur);
                    if (dips && first_dip < 0) first_dip = k;
                    if (dips && first_dip >= 0 && last_dip == k - 1) last_dip = k;
                    if (dips && last_dip < 0) last_dip = k;
                    if (!dips && first_dip >= 0) break;
                }
                if (first_dip >= 0) {
                    // read the plateau away from the gap's kink cells, where
                    // the gridded envelope is exact up to slope noise
                    const int mid = (first_dip + last_dip) / 2;
                    plateau = env.value(current + (target - current) * mid / 33.0);
                }
            }
            if (!std::isfinite(plateau)) {
                current = std::max(current, target);
                break;
            }
            // the jump fires when the departure state turns strictly
            // unstable; it departs from the left end of the inverse graph
            // and lands on the right one
            const double u_l = std::max(current, env.p_left(plateau));
            const double window = std::max(t - prev_t, 1e-9 * (1.0 + std::abs(t)));
            const double t_star = residual_jump_time(
                sys, u_l, prev_t, std::min(ell.t_end(), t + window), settings);
            if (!std::isfinite(t_star)) break; // trigger not reached yet
            const double u_r =
                polish_branch_root(sys, ell.value(t_star) - ap, env.p_right(plateau));

            JumpRecord jr;
            jr.t = t_star;
            jr.u_left = u_l;
            jr.u_at = u_r;
            jr.u_right = u_r;
            if (attach) {
                jr.left_transition = build_optimal_transition(sys, t_star, u_l, u_r, settings);
                Transition point;
                point.t = t_star;
                point.points = {u_r};
                jr.right_transition = point;
            }
            if (seg.empty() || seg.back().t <= t_star) seg.push_back({t_star, u_l});
            curve.segments.push_back(std::move(seg));
            curve.jumps.push_back(std::move(jr));
            seg.clear();
            seg.push_back({t_star, u_r});
            current = u_r;
        }

        if (seg.empty() || t >= seg.back().t) seg.push_back({t, current});
        prev_t = t;
    }
    curve.segments.push_back(std::move(seg));

    // report (not resolve) failures of the sliding-selection hypothesis
    for (const auto& s : curve.segments) {
        const size_t stride = std::max<size_t>(1, s.size() / 32);
        for (size_t i = 0; i < s.size(); i += stride) {
            const double wsl = slope_sl(sys, s[i].u, settings).value;
            if (wsl - am > sys.W().derivative(s[i].u) + 1e-6) {
                std::ostringstream os;
                os << "selection hypothesis fails at t = " << s[i].t << ", u = " << s[i].u
                   << ": W'_sl - a- > W'";
                curve.notes.push_back(os.str());
            }
        }
    }
    curve.validate();
    return curve;
}

VECurve mirror_curve(const VECurve& w) {
    VECurve out;
    out.notes = w.notes;
    for (const auto& seg : w.segments) {
        std::vector<CurveSample> s;
        s.reserve(seg.size());
        for (const auto& p : seg) s.push_back({p.t, -p.u});
        out.segments.push_back(std::move(s));
    }
    for (const auto& j : w.jumps) {
        JumpRecord r;
        r.t = j.t;
        r.u_left = -j.u_left;
        r.u_at = -j.u_at;
        r.u_right = -j.u_right;
        out.jumps.push_back(r);
    }
    return out;
}

} // namespace

VECurve solve_monotone(const RISystem& sys, double u0, LoadDirection direction, int samples,
                       const MinimizeSettings& settings) {
    if (samples < 8) throw PreconditionViolation("solve_monotone: need samples >= 8");
    if (direction == LoadDirection::increasing)
        return solve_monotone_increasing(sys, u0, samples, settings, true);

    VECurve w = solve_monotone_increasing(sys.reflected(), -u0, samples, settings, false);
    VECurve out = mirror_curve(w);
    for (auto& jr : out.jumps) {
        jr.left_transition = build_optimal_transition(sys, jr.t, jr.u_left, jr.u_at, settings);
        Transition point;
        point.t = jr.t;
        point.points = {jr.u_right};
        jr.right_transition = point;
    }
    out.validate();
    return out;
}

// ---------------------------------------------------------------------------
// Variation, balance, validation

double total_variation_psi(const RISystem& sys, const VECurve& curve, double s, double t) {
    if (!(s <= t)) throw PreconditionViolation("total_variation_psi: need s <= t");
    std::vector<double> vals;
    vals.push_back(curve.left_limit(s));
    for (size_t seg_i = 0; seg_i < curve.segments.size(); ++seg_i) {
        for (const auto& p : curve.segments[seg_i])
            if (p.t > s && p.t < t) vals.push_back(p.u);
        if (seg_i < curve.jumps.size()) {
            const auto& jr = curve.jumps[seg_i];
            if (jr.t >= s && jr.t <= t) {
                vals.push_back(jr.u_left);
                vals.push_back(jr.u_at);
                vals.push_back(jr.u_right);
            }
        }
    }
    vals.push_back(curve.right_limit(t));
    double var = 0.0;
    for (size_t i = 1; i < vals.size(); ++i) var += sys.psi(vals[i] - vals[i - 1]);
    return var;
}

double total_variation_psi(const RISystem& sys, const DiscreteSolution& disc, double s, double t) {
    if (!(s <= t)) throw PreconditionViolation("total_variation_psi: need s <= t");
    double var = 0.0;
    for (size_t i = 1; i < disc.values.size(); ++i) {
        if (disc.partition.nodes[i] <= s || disc.partition.nodes[i - 1] >= t) continue;
        var += sys.psi(disc.values[i] - disc.values[i - 1]);
    }
    return var;
}

namespace {

double jump_piece_cost(const RISystem& sys, const std::optional<Transition>& tr, double t,
                       double from, double to, const MinimizeSettings& settings) {
    if (from == to) return 0.0;
    if (tr && tr->points.size() >= 1 && std::abs(tr->points.front() - from) < 1e-9 &&
        std::abs(tr->points.back() - to) < 1e-9)
        return transition_cost(sys, *tr, settings).total;
    return jump_cost(sys, t, from, to, 1024, settings).cost;
}

// Delta_c increments of a jump record per the additive convention
double jump_increment_of(const RISystem& sys, const JumpRecord& jr,
                         const MinimizeSettings& settings) {
    double inc = 0.0;
    inc += jump_piece_cost(sys, jr.left_transition, jr.t, jr.u_left, jr.u_at, settings) -
           sys.psi(jr.u_at - jr.u_left);
    inc += jump_piece_cost(sys, jr.right_transition, jr.t, jr.u_at, jr.u_right, settings) -
           sys.psi(jr.u_right - jr.u_at);
    return inc;
}

double work_integral_of(const RISystem& sys, const VECurve& curve, double s, double t) {
    const Loading& ell = sys.loading();
    double work = 0.0;
    for (const auto& seg : curve.segments) {
        for (size_t i = 1; i < seg.size(); ++i) {
            double a = std::max(seg[i - 1].t, s);
            double b = std::min(seg[i].t, t);
            if (!(b > a)) continue;
            const double t0 = seg[i - 1].t, t1 = seg[i].t, u0 = seg[i - 1].u, u1 = seg[i].u;
            auto f = [&](double x) {
                const double w = t1 > t0 ? (x - t0) / (t1 - t0) : 0.0;
                const double u = u0 * (1.0 - w) + u1 * w;
                return -ell.derivative(x) * u;
            };
            // 3-point Simpson per sample cell: u is linear there
            const double m = 0.5 * (a + b);
            work += (b - a) / 6.0 * (f(a) + 4.0 * f(m) + f(b));
        }
    }
    return work;
}

} // namespace

BalanceReport augmented_variation(const RISystem& sys, const VECurve& curve, double s, double t,
                                  const MinimizeSettings& settings) {
    BalanceReport rep;
    rep.var_psi = total_variation_psi(sys, curve, s, t);
    for (const auto& jr : curve.jumps) {
        if (jr.t < s || jr.t > t) continue;
        rep.jump_increment += jump_increment_of(sys, jr, settings);
    }
    return rep;
}

bool ValidationReport::passed() const {
    return stability_ok && equation_ok && jump_conditions_ok && jump_identities_ok &&
           std::abs(balance.defect) <= balance_tol_used;
}

ValidationReport validate_ve(const RISystem& sys, const VECurve& curve,
                             const ValidationSettings& vs, const MinimizeSettings& min_set) {
    curve.validate();
    ValidationReport rep;
    const Loading& ell = sys.loading();
    const double ap = sys.dissipation_potential().alpha_plus;
    const double am = sys.dissipation_potential().alpha_minus;

    // tolerances
    double max_inc = 0.0, max_dt = 0.0, emin = 0.0, emax = 0.0;
    bool first = true;
    for (const auto& seg : curve.segments) {
        for (size_t i = 0; i < seg.size(); ++i) {
            const double e = sys.energy_unchecked(seg[i].t, seg[i].u);
            if (first) {
                emin = emax = e;
                first = false;
            }
            emin = std::min(emin, e);
            emax = std::max(emax, e);
            if (i > 0) {
                max_inc = std::max(max_inc, std::abs(seg[i].u - seg[i - 1].u));
                max_dt = std::max(max_dt, seg[i].t - seg[i - 1].t);
            }
        }
    }
    const double mu = sys.correction().kind() == ViscousCorrection::Kind::quadratic
                          ? sys.correction().mu()
                          : 0.0;
    const double eq_tol = vs.equation_tol > 0
                              ? vs.equation_tol
                              : std::max(1e-6, 3.0 * mu * max_inc +
                                                   3.0 * max_dt * ell.max_abs_derivative());
    rep.balance_tol_used =
        vs.balance_tol > 0 ? vs.balance_tol : 1e-5 * (1.0 + (emax - emin));

    rep.worst_stability_margin = std::numeric_limits<double>::infinity();

    // (a) stability off jumps; (b) slope equations on supports of motion
    for (const auto& seg : curve.segments) {
        const size_t stride =
            std::max<size_t>(1, seg.size() / static_cast<size_t>(vs.max_samples_per_segment));
        for (size_t i = 0; i < seg.size(); i += stride) {
            const StabilityVerdict v = check_stability_1d(sys, seg[i].t, seg[i].u, min_set);
            rep.worst_stability_margin = std::min(rep.worst_stability_margin, v.min_margin());
            if (v.min_margin() < -vs.stability_tol) {
                ++rep.stability_violations;
                if (rep.stability_ok) {
                    std::ostringstream os;
                    os << "stability fails at t = " << seg[i].t << ", u = " << seg[i].u
                       << " (margin " << v.min_margin() << ")";
                    rep.failures.push_back(os.str());
                }
                rep.stability_ok = false;
            }
        }
        for (size_t i = 1; i < seg.size(); i += stride) {
            const double du = seg[i].u - seg[i - 1].u;
            if (std::abs(du) <= 1e-12) continue;
            const double w = sys.W().derivative(seg[i].u);
            const double target = du > 0 ? ell.value(seg[i].t) - ap : ell.value(seg[i].t) + am;
            const double r = std::abs(w - target);
            rep.worst_equation_residual = std::max(rep.worst_equation_residual, r);
            if (r > eq_tol) {
                if (rep.equation_ok) {
                    std::ostringstream os;
                    os << "flow equation fails at t = " << seg[i].t << ": |W'(u) - target| = "
                       << r;
                    rep.failures.push_back(os.str());
                }
                rep.equation_ok = false;
            }
        }
    }

    // (c) jump conditions, (d) jump identities
    for (const auto& jr : curve.jumps) {
        const bool increasing = jr.u_right >= jr.u_left;
        const double lo = std::min(jr.u_left, jr.u_right);
        const double hi = std::max(jr.u_left, jr.u_right);
        if (jr.u_at < lo - 1e-9 || jr.u_at > hi + 1e-9) rep.jump_conditions_ok = false;
        const double l = ell.value(jr.t);
        for (int k = 0; k <= 64; ++k) {
            const double v = lo + (hi - lo) * k / 64.0;
            if (increasing) {
                if (slope_ir(sys, v, min_set).value > l - ap + scale_tol(vs.jump_tol, l)) {
                    rep.jump_conditions_ok = false;
                    std::ostringstream os;
                    os << "jump slope inequality fails at t = " << jr.t << ", v = " << v;
                    rep.failures.push_back(os.str());
                    break;
                }
            } else {
                if (slope_sl(sys, v, min_set).value < l + am - scale_tol(vs.jump_tol, l)) {
                    rep.jump_conditions_ok = false;
                    std::ostringstream os;
                    os << "jump slope inequality fails at t = " << jr.t << ", v = " << v;
                    rep.failures.push_back(os.str());
                    break;
                }
            }
        }
        // equation at the jump's right limit
        {
            const double w = sys.W().derivative(jr.u_right);
            const double target = increasing ? l - ap : l + am;
            rep.worst_equation_residual =
                std::max(rep.worst_equation_residual, std::abs(w - target));
            if (std::abs(w - target) > eq_tol) rep.equation_ok = false;
        }
        // (J_VE): energy drops equal the dissipation cost on each piece
        const double e_l = sys.energy_unchecked(jr.t, jr.u_left);
        const double e_at = sys.energy_unchecked(jr.t, jr.u_at);
        const double e_r = sys.energy_unchecked(jr.t, jr.u_right);
        const double c1 = jump_piece_cost(sys, jr.left_transition, jr.t, jr.u_left, jr.u_at,
                                          min_set);
        const double c2 = jump_piece_cost(sys, jr.right_transition, jr.t, jr.u_at, jr.u_right,
                                          min_set);
        const double d1 = std::abs((e_l - e_at) - c1);
        const double d2 = std::abs((e_at - e_r) - c2);
        const double d3 = std::abs((e_l - e_r) - (c1 + c2));
        const double dmax = std::max({d1, d2, d3});
        rep.worst_jump_identity_defect = std::max(rep.worst_jump_identity_defect, dmax);
        if (dmax > scale_tol(vs.identity_tol, e_l - e_r)) {
            rep.jump_identities_ok = false;
            std::ostringstream os;
            os << "jump identity fails at t = " << jr.t << ": defect " << dmax;
            rep.failures.push_back(os.str());
        }
    }

    // (e) energy balance over the full interval
    const double a = curve.t_begin(), b = curve.t_end();
    BalanceReport bal = augmented_variation(sys, curve, a, b, min_set);
    bal.work_integral = work_integral_of(sys, curve, a, b);
    const double e_end = sys.energy_unchecked(b, curve.right_limit(b));
    const double e_start = sys.energy_unchecked(a, curve.left_limit(a));
    bal.defect = (e_end + bal.var_psi + bal.jump_increment) - (e_start + bal.work_integral);
    rep.balance = bal;
    if (std::abs(bal.defect) > rep.balance_tol_used) {
        std::ostringstream os;
        os << "energy balance defect " << bal.defect << " exceeds " << rep.balance_tol_used;
        rep.failures.push_back(os.str());
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Restriction / concatenation

VECurve restrict_curve(const VECurve& curve, double s, double t) {
    if (!(s < t)) throw PreconditionViolation("restrict_curve: need s < t");
    VECurve out;
    std::vector<CurveSample> seg;
    seg.push_back({s, curve.left_limit(s)});
    for (size_t i = 0; i < curve.segments.size(); ++i) {
        for (const auto& p : curve.segments[i])
            if (p.t > s && p.t < t && (seg.empty() || p.t >= seg.back().t))
                seg.push_back(p);
        if (i < curve.jumps.size()) {
            const auto& jr = curve.jumps[i];
            if (jr.t < s || jr.t > t) continue;
            if (seg.empty() || seg.back().t < jr.t) seg.push_back({jr.t, jr.u_left});
            out.segments.push_back(std::move(seg));
            out.jumps.push_back(jr);
            seg.clear();
            seg.push_back({jr.t, jr.u_right});
        }
    }
    if (seg.empty() || seg.back().t < t) seg.push_back({t, curve.right_limit(t)});
    out.segments.push_back(std::move(seg));
    out.validate();
    return out;
}

VECurve concatenate(const std::vector<VECurve>& pieces) {
    if (pieces.empty()) throw PreconditionViolation("concatenate: no pieces");
    VECurve out = pieces.front();
    for (size_t k = 1; k < pieces.size(); ++k) {
        const VECurve& nxt = pieces[k];
        const double t_end = out.t_end();
        const double u_end = out.segments.back().back().u;
        if (std::abs(nxt.t_begin() - t_end) > scale_tol(1e-9, t_end))
            throw Error("concatenate: time intervals do not abut");
        if (std::abs(nxt.segments.front().front().u - u_end) > scale_tol(1e-7, u_end))
            throw Error("concatenate: endpoint values mismatch");
        // merge the junction segments; the junction is a continuity point
        auto& last = out.segments.back();
        const auto& first = nxt.segments.front();
        for (size_t i = 0; i < first.size(); ++i)
            if (first[i].t > last.back().t) last.push_back(first[i]);
        for (size_t i = 1; i < nxt.segments.size(); ++i) out.segments.push_back(nxt.segments[i]);
        for (const auto& j : nxt.jumps) out.jumps.push_back(j);
        for (const auto& n : nxt.notes) out.notes.push_back(n);
    }
    out.validate();
    return out;
}

bool check_restriction_concatenation(const RISystem& sys, const VECurve& curve,
                                     const std::vector<double>& splits,
                                     const ValidationSettings& settings) {
    std::vector<double> cuts = splits;
    std::sort(cuts.begin(), cuts.end());
    for (double c : cuts)
        if (!(c > curve.t_begin() && c < curve.t_end()))
            throw PreconditionViolation("check_restriction_concatenation: split not interior");

    const bool whole = validate_ve(sys, curve, settings).passed();
    bool pieces = true;
    double lo = curve.t_begin();
    for (size_t i = 0; i <= cuts.size(); ++i) {
        const double hi = i < cuts.size() ? cuts[i] : curve.t_end();
        pieces = pieces && validate_ve(sys, restrict_curve(curve, lo, hi), settings).passed();
        lo = hi;
    }
    return whole == pieces;
}

double discrete_balance_defect(const RISystem& sys, const DiscreteSolution& disc) {
    const auto& nodes = disc.partition.nodes;
    const Loading& ell = sys.loading();
    double var = 0.0, work = 0.0;
    for (size_t n = 1; n < disc.values.size(); ++n) {
        var += sys.psi(disc.values[n] - disc.values[n - 1]);
        // left-continuous piecewise-constant interpolant: u = U^n on
        // (t^{n-1}, t^n], so the cell work integral is exact
        work += -disc.values[n] * (ell.value(nodes[n]) - ell.value(nodes[n - 1]));
    }
    const double e_end = sys.energy_unchecked(nodes.back(), disc.values.back());
    const double e_start = sys.energy_unchecked(nodes.front(), disc.values.front());
    return (e_end + var) - (e_start + work);
}

} // namespace riveq
