#include "riveq/envelopes.hpp"

#include <algorithm>
#include <cmath>

namespace riveq {

namespace {

constexpr int kEnvelopeGridPoints = 8192;

double level_tol(double level) { return 1e-9 * (1.0 + std::abs(level)); }

// bisection width target for inverse-selection refinement
double arg_tol(double u) { return 1e-9 * (1.0 + std::abs(u)); }

} // namespace

MonotoneEnvelope build_envelope(const RISystem& sys, double base_point, EnvelopeSide side,
                                std::optional<double> domain_limit,
                                const MinimizeSettings& slope_settings) {
    MonotoneEnvelope env;
    env.side_ = side;
    env.base_ = base_point;
    env.slope_settings_ = slope_settings;

    const bool upper = side == EnvelopeSide::upper_of_ir;
    env.work_sys_ = upper ? sys : sys.reflected();
    const RISystem& ws = *env.work_sys_;
    const double wbase = upper ? base_point : -base_point;

    double whi;
    if (domain_limit) {
        whi = upper ? *domain_limit : -*domain_limit;
        if (!(whi > wbase)) throw PreconditionViolation("build_envelope: empty domain");
    } else {
        whi = coercive_bracket(ws, wbase).second;
    }

    std::vector<double> g;
    g.reserve(kEnvelopeGridPoints + 32);
    for (int i = 0; i <= kEnvelopeGridPoints; ++i)
        g.push_back(wbase + (whi - wbase) * i / kEnvelopeGridPoints);
    env.wstationary_ = ws.W().derivative_stationary_points(wbase, whi);
    for (double s : env.wstationary_) g.push_back(s);
    std::sort(g.begin(), g.end());
    g.erase(std::unique(g.begin(), g.end(),
                        [&](double a, double b) { return b - a < 1e-13 * (1.0 + std::abs(a)); }),
            g.end());

    std::vector<double> slopes(g.size());
    for (size_t i = 0; i < g.size(); ++i)
        slopes[i] = slope_ir(ws, g[i], slope_settings).value;

    // slope peaks are the plateau levels. Collapse-case peaks sit at the
    // inserted stationary points of W', but detachment corners do not lie
    // on any precomputable set: locate them from the grid maxima and insert
    // them exactly, or p/q queries inherit an O(grid-step) bias.
    std::vector<double> peaks;
    for (size_t i = 1; i + 1 < g.size(); ++i) {
        // strict maxima only: slope noise on flat stretches must not spawn
        // spurious refinements
        const double eps = 1e-7 * (1.0 + std::abs(slopes[i]));
        if (!(slopes[i] > slopes[i - 1] + eps && slopes[i] > slopes[i + 1] + eps)) continue;
        MinimizeSettings ps = slope_settings;
        ps.grid_points = 48;
        const ArgminSet m = global_min(
            [&](double x) { return -slope_ir(ws, x, slope_settings).value; }, g[i - 1], g[i + 1],
            ps);
        peaks.push_back(m.minimizers.front());
    }
    for (double p : peaks) {
        g.push_back(p);
        env.wstationary_.push_back(p);
    }
    std::sort(g.begin(), g.end());
    g.erase(std::unique(g.begin(), g.end(),
                        [&](double a, double b) { return b - a < 1e-13 * (1.0 + std::abs(a)); }),
            g.end());
    std::sort(env.wstationary_.begin(), env.wstationary_.end());

    env.wgrid_ = std::move(g);
    env.wslope_.resize(env.wgrid_.size());
    env.wenv_.resize(env.wgrid_.size());
    double running = -std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < env.wgrid_.size(); ++i) {
        env.wslope_[i] = slope_ir(ws, env.wgrid_[i], slope_settings).value;
        running = std::max(running, env.wslope_[i]);
        env.wenv_[i] = running;
    }

    if (upper) {
        env.grid_ = env.wgrid_;
        env.env_ = env.wenv_;
        env.slope_ = env.wslope_;
    } else {
        // mirror back: u = -w, slope_sl(u) = -slope_ir(w), running min
        const size_t n = env.wgrid_.size();
        env.grid_.resize(n);
        env.env_.resize(n);
        env.slope_.resize(n);
        for (size_t i = 0; i < n; ++i) {
            env.grid_[i] = -env.wgrid_[n - 1 - i];
            env.env_[i] = -env.wenv_[n - 1 - i];
            env.slope_[i] = -env.wslope_[n - 1 - i];
        }
    }
    return env;
}

double MonotoneEnvelope::slope_upper(double u) const {
    return slope_ir(*work_sys_, u, slope_settings_).value;
}

double MonotoneEnvelope::slope_at(double u) const {
    if (side_ == EnvelopeSide::upper_of_ir) return slope_upper(u);
    return -slope_upper(-u);
}

double MonotoneEnvelope::value(double u) const {
    const auto& g = grid_;
    if (u <= g.front()) return env_.front();
    if (u >= g.back()) return env_.back();
    const auto it = std::upper_bound(g.begin(), g.end(), u);
    const size_t j = static_cast<size_t>(it - g.begin());
    const double x0 = g[j - 1], x1 = g[j];
    const double w = x1 > x0 ? (u - x0) / (x1 - x0) : 0.0;
    return env_[j - 1] * (1.0 - w) + env_[j] * w;
}

double MonotoneEnvelope::p_left_upper(double level) const {
    const double tol = level_tol(level);
    // a tangency contact sits at a stationary point of W'; those are known
    // exactly, while any value-based search pays a sqrt(noise) position
    // penalty on the flat top
    const double snap_tol = 2e-7 * (1.0 + std::abs(level));
    if (wenv_.front() >= level - tol) return wgrid_.front();
    if (wenv_.back() < level - tol)
        throw OutOfRange("p_left: level above the envelope range");
    // first grid index whose running max reached the level
    size_t j = static_cast<size_t>(
        std::lower_bound(wenv_.begin(), wenv_.end(), level - tol) - wenv_.begin());
    double a = wgrid_[j - 1], b = wgrid_[j];
    // min{u : slope(u) >= level}; slope < level on [base, a]
    for (int k = 0; k < 64; ++k) {
        if (b - a <= arg_tol(a)) break;
        const double m = 0.5 * (a + b);
        if (slope_upper(m) >= level - tol)
            b = m;
        else
            a = m;
    }
    for (double s : wstationary_) {
        if (s >= b) break;
        if (std::abs(slope_upper(s) - level) <= snap_tol) return s;
    }
    return b;
}

double MonotoneEnvelope::p_right_upper(double level) const {
    const double tol = level_tol(level);
    if (wenv_.front() > level + tol) return wgrid_.front();
    if (!(wenv_.back() > level + tol))
        throw OutOfRange("p_right: level at or above the envelope top");
    size_t j = static_cast<size_t>(
        std::upper_bound(wenv_.begin(), wenv_.end(), level + tol) - wenv_.begin());
    // wenv_[j] > level + tol, wenv_[j-1] <= level + tol
    double a = wgrid_[j - 1], b = wgrid_[j];
    // the cell may cross the level anywhere; scan for the first exceed
    const int sub = 64;
    double prev = a;
    for (int i = 1; i <= sub; ++i) {
        const double x = a + (b - a) * i / sub;
        if (slope_upper(x) > level + tol) {
            b = x;
            a = prev;
            break;
        }
        prev = x;
    }
    for (int k = 0; k < 64; ++k) {
        if (b - a <= arg_tol(a)) break;
        const double m = 0.5 * (a + b);
        if (slope_upper(m) > level + tol)
            b = m;
        else
            a = m;
    }
    return b;
}

double MonotoneEnvelope::p_left(double level) const {
    if (side_ != EnvelopeSide::upper_of_ir)
        throw PreconditionViolation("p_left: envelope is a lower envelope");
    return p_left_upper(level);
}

double MonotoneEnvelope::p_right(double level) const {
    if (side_ != EnvelopeSide::upper_of_ir)
        throw PreconditionViolation("p_right: envelope is a lower envelope");
    return p_right_upper(level);
}

double MonotoneEnvelope::q_left(double level) const {
    if (side_ != EnvelopeSide::lower_of_sl)
        throw PreconditionViolation("q_left: envelope is an upper envelope");
    return -p_right_upper(-level);
}

double MonotoneEnvelope::q_right(double level) const {
    if (side_ != EnvelopeSide::lower_of_sl)
        throw PreconditionViolation("q_right: envelope is an upper envelope");
    return -p_left_upper(-level);
}

std::vector<double> MonotoneEnvelope::contact_upper(double level) const {
    const double pl = p_left_upper(level);
    double pr;
    try {
        pr = p_right_upper(level);
    } catch (const OutOfRange&) {
        pr = wgrid_.back();
    }
    const double tol = 1e-8 * (1.0 + std::abs(level));
    const double cell = (wgrid_.back() - wgrid_.front()) /
                        static_cast<double>(kEnvelopeGridPoints);

    // candidate grid points inside [pl, pr]; the endpoints are pinned onto
    // the level by the inverse-graph bisection, so they are admitted with a
    // noise-tolerant bound (the base point is a contact by convention)
    const double end_tol = 1e-6 * (1.0 + std::abs(level));
    std::vector<double> cand;
    if (pl == wgrid_.front() || std::abs(slope_upper(pl) - level) <= end_tol)
        cand.push_back(pl);
    for (size_t i = 0; i < wgrid_.size(); ++i) {
        const double u = wgrid_[i];
        if (u <= pl || u >= pr) continue;
        if (std::abs(wslope_[i] - level) <= tol) cand.push_back(u);
    }
    if (pr > pl && std::abs(slope_upper(pr) - level) <= end_tol) cand.push_back(pr);
    if (cand.empty()) return cand;

    // cluster; flat stretches keep their samples, short clusters reduce to a
    // crossing root or a tangency argmax
    std::vector<double> out;
    size_t i = 0;
    while (i < cand.size()) {
        size_t j = i;
        while (j + 1 < cand.size() && cand[j + 1] - cand[j] <= 2.0 * cell) ++j;
        const double clo = cand[i], chi = cand[j];
        if (chi - clo > 8.0 * cell) {
            for (size_t k = i; k <= j; ++k) out.push_back(cand[k]);
        } else if (chi - clo <= arg_tol(clo)) {
            out.push_back(clo);
        } else {
            const double flo = slope_upper(clo) - level;
            const double fhi = slope_upper(chi) - level;
            if ((flo < 0) != (fhi < 0)) {
                double a = clo, b = chi, fa = flo;
                for (int k = 0; k < 64 && b - a > arg_tol(a); ++k) {
                    const double m = 0.5 * (a + b);
                    const double fm = slope_upper(m) - level;
                    if ((fa < 0) == (fm < 0)) {
                        a = m;
                        fa = fm;
                    } else {
                        b = m;
                    }
                }
                out.push_back(0.5 * (a + b));
            } else {
                // tangency: prefer the exactly known stationary point, fall
                // back to the slope extremum inside the cluster
                bool snapped = false;
                for (double s : wstationary_) {
                    if (s < clo - cell || s > chi + cell) continue;
                    if (std::abs(slope_upper(s) - level) <= 2e-7 * (1.0 + std::abs(level))) {
                        out.push_back(s);
                        snapped = true;
                        break;
                    }
                }
                if (!snapped) {
                    MinimizeSettings s;
                    s.grid_points = 64;
                    auto g = [&](double x) {
                        const double d = slope_upper(x) - level;
                        return flo < 0 ? -d : d; // drive toward the level
                    };
                    const ArgminSet m = global_min(g, clo - cell, chi + cell, s);
                    out.push_back(m.minimizers.front());
                }
            }
        }
        i = j + 1;
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end(),
                          [&](double a, double b) { return b - a <= arg_tol(a); }),
              out.end());
    return out;
}

std::vector<double> MonotoneEnvelope::contact_selection(double level) const {
    if (side_ == EnvelopeSide::upper_of_ir) return contact_upper(level);
    std::vector<double> w = contact_upper(-level);
    std::vector<double> out(w.size());
    for (size_t i = 0; i < w.size(); ++i) out[i] = -w[w.size() - 1 - i];
    return out;
}

} // namespace riveq
