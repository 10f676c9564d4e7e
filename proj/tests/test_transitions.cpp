#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "riveq/moreau.hpp"
#include "riveq/slopes.hpp"
#include "riveq/transitions.hpp"
#include "test_helpers.hpp"

using namespace riveq;
using Catch::Approx;
namespace rt = riveq::testing;

namespace {

const double kRoot3 = std::sqrt(3.0);
const double kDelay = 2.0 / (3.0 * kRoot3);     // trigger level, mu >= 1
const double kMod = std::sqrt(2.0 / 3.0) / 3.0; // trigger level, mu = 1/3
const double kModLand = std::sqrt(2.0 / 3.0);   // initial hole landing

Transition two_point(double t, double a, double b) {
    Transition tr;
    tr.t = t;
    tr.points = {a, b};
    tr.gap_kinds = {GapKind::hole};
    return tr;
}

} // namespace

TEST_CASE("transition cost conventions", "[transitions]") {
    const RISystem sys = rt::quartic_const_load(0.5, 0.5, 0.0);
    Transition single;
    single.t = 0.0;
    single.points = {-1.0};
    const CostBreakdown c0 = transition_cost(sys, single);
    CHECK(c0.total == 0.0);

    // Maxwell two-point jump: cost = Psi(2) = 1 = energy drop
    const Transition tr = two_point(0.0, -1.0, 1.0);
    const CostBreakdown c = transition_cost(sys, tr);
    CHECK(c.var_psi == Approx(1.0));
    CHECK(c.c_delta == 0.0);
    CHECK(c.res_sum == Approx(0.0).margin(1e-10));
    CHECK(c.total == Approx(sys.energy_unchecked(0.0, -1.0) - sys.energy_unchecked(0.0, 1.0))
                         .margin(1e-9));
}

TEST_CASE("interior unstable points contribute residuals", "[transitions]") {
    const RISystem sys = rt::quartic_const_load(0.5, 0.5, 0.0);
    Transition tr;
    tr.t = 0.0;
    tr.points = {-1.0, 0.0, 1.0};
    tr.gap_kinds = {GapKind::hole, GapKind::hole};
    const CostBreakdown c = transition_cost(sys, tr);
    CHECK(c.res_sum > 0.1); // u = 0 is strictly unstable at the Maxwell level
    CHECK(c.total == Approx(c.var_psi + c.c_delta + c.res_sum));
}

TEST_CASE("malformed transitions are rejected", "[transitions]") {
    Transition bad;
    bad.t = 0.0;
    bad.points = {0.0, 1.0, 0.5};
    bad.gap_kinds = {GapKind::hole, GapKind::hole};
    CHECK_THROWS_AS(bad.validate(), MalformedTransition);
    bad.points = {0.0, 1.0};
    CHECK_THROWS_AS(bad.validate(), MalformedTransition); // kind count mismatch
}

TEST_CASE("energetic construction is the pure two-point jump", "[transitions]") {
    const RISystem sys = rt::quartic_const_load(0.5, 0.5, 0.0);
    const Transition tr = build_optimal_transition(sys, 0.0, -1.0, 1.0);
    REQUIRE(tr.points.size() == 2);
    CHECK(tr.points[0] == Approx(-1.0));
    CHECK(tr.points[1] == Approx(1.0));
    CHECK(tr.gap_kinds[0] == GapKind::hole);
    CHECK(certify_optimal(sys, tr).passed);
}

TEST_CASE("delay-rule construction is a double chain", "[transitions]") {
    const RISystem sys = rt::quartic_const_load(kDelay + 0.5, 0.5, 1.0);
    const Transition tr = build_optimal_transition(sys, 0.0, -1.0 / kRoot3, 2.0 / kRoot3);
    REQUIRE(tr.points.size() > 20);
    CHECK(tr.points.front() == Approx(-1.0 / kRoot3).margin(1e-9));
    CHECK(tr.points.back() == Approx(2.0 / kRoot3).margin(1e-7));
    // accumulation at both ends, genuine movement steps in the middle
    CHECK(tr.gap_kinds.front() == GapKind::accumulation);
    CHECK(tr.gap_kinds.back() == GapKind::accumulation);
    int holes = 0;
    for (GapKind k : tr.gap_kinds) holes += k == GapKind::hole ? 1 : 0;
    CHECK(holes > 10);

    const CertificateReport cert = certify_optimal(sys, tr);
    CHECK(cert.passed);
    CHECK(cert.max_var_violation <= 1e-7);
    CHECK(cert.max_minset_violation <= 1e-7);

    // the optimal cost equals the energy drop
    const CostBreakdown c = transition_cost(sys, tr);
    const double drop = sys.energy_unchecked(0.0, tr.points.front()) -
                        sys.energy_unchecked(0.0, tr.points.back());
    CHECK(c.total == Approx(drop).margin(1e-6));
}

TEST_CASE("modified Maxwell construction has the initial hole", "[transitions]") {
    const double rest = rt::cubic_root(kMod, 1.0 / kRoot3, 2.0);
    CHECK(rest == Approx(1.1153550716504108).margin(1e-10));

    const RISystem sys = rt::quartic_const_load(kMod + 0.5, 0.5, 1.0 / 3.0);
    const Transition tr = build_optimal_transition(sys, 0.0, -kModLand, rest);
    REQUIRE(tr.points.size() >= 3);
    CHECK(tr.points.front() == Approx(-kModLand).margin(1e-9));
    CHECK(tr.points.back() == Approx(rest).margin(1e-7));

    // the first gap is the initial hole onto +sqrt(2/3)
    CHECK(tr.gap_kinds.front() == GapKind::hole);
    CHECK(tr.points[1] == Approx(kModLand).margin(1e-5));

    // the chord identity at the hole within 1e-8
    const double z = tr.points[1];
    const double lhs = sys.W().value(z) - sys.W().value(-kModLand) - kMod * (z + kModLand) +
                       sys.delta(-kModLand, z);
    CHECK(std::abs(lhs) <= 1e-8);

    CHECK(certify_optimal(sys, tr).passed);
}

TEST_CASE("certificate rejects a mispicked landing", "[transitions]") {
    // ell - alpha+ = 0.1 without correction: the minimal set from -1 is the
    // tilted right root, not +1
    const RISystem sys = rt::quartic_const_load(0.6, 0.5, 0.0);
    const Transition bad = two_point(0.0, -1.0, 1.0);
    const CertificateReport rep = certify_optimal(sys, bad);
    CHECK_FALSE(rep.passed);
    CHECK(rep.max_minset_violation > 1e-4);

    const double good_landing = rt::cubic_root(0.1, 1.0 / kRoot3, 2.0);
    const Transition good = two_point(0.0, -1.0, good_landing);
    CHECK(certify_optimal(sys, good).passed);
}

TEST_CASE("singleton certificates are vacuous", "[transitions]") {
    const RISystem sys = rt::quartic_const_load(0.5, 0.5, 0.0);
    Transition s;
    s.t = 0.0;
    s.points = {0.4};
    CHECK(certify_optimal(sys, s).passed);
}

TEST_CASE("jump cost agrees between construction and DP", "[transitions]") {
    const RISystem sys = rt::quartic_const_load(0.5, 0.5, 0.0);
    const JumpCostResult r = jump_cost(sys, 0.0, -1.0, 1.0, 2048);
    CHECK(r.cost == Approx(1.0).margin(1e-4));
    CHECK(r.certified);

    const JumpCostResult trivial = jump_cost(sys, 0.0, 0.3, 0.3, 64);
    CHECK(trivial.cost == 0.0);
    CHECK(trivial.method == "trivial");

    // the delay-rule jump: cost certified equal to the energy drop
    const RISystem delay = rt::quartic_const_load(kDelay + 0.5, 0.5, 1.0);
    const JumpCostResult d = jump_cost(delay, 0.0, -1.0 / kRoot3, 2.0 / kRoot3, 1024);
    const double drop = delay.energy_unchecked(0.0, -1.0 / kRoot3) -
                        delay.energy_unchecked(0.0, 2.0 / kRoot3);
    CHECK(d.cost == Approx(drop).margin(1e-6));
    CHECK(d.method == "constructive");
}

TEST_CASE("decreasing jumps mirror increasing ones", "[transitions]") {
    // mirrored Maxwell: ell + alpha- = 0 from +1 down to -1
    const RISystem sys = rt::quartic_const_load(-0.5, 0.5, 0.0);
    const Transition tr = build_optimal_transition(sys, 0.0, 1.0, -1.0);
    REQUIRE(tr.points.size() == 2);
    CHECK(tr.points[0] == Approx(1.0));
    CHECK(tr.points[1] == Approx(-1.0));
    CHECK(certify_optimal(sys, tr).passed);
    const CostBreakdown c = transition_cost(sys, tr);
    CHECK(c.total == Approx(1.0).margin(1e-9));
}

TEST_CASE("cost additivity under splitting", "[transitions]") {
    const RISystem sys = rt::quartic_const_load(kDelay + 0.5, 0.5, 1.0);
    const Transition tr = build_optimal_transition(sys, 0.0, -1.0 / kRoot3, 2.0 / kRoot3);
    const CostBreakdown whole = transition_cost(sys, tr);

    auto rng = rt::seeded_rng();
    std::uniform_int_distribution<size_t> pick(1, tr.points.size() - 2);
    for (int k = 0; k < 10; ++k) {
        const size_t cut = pick(rng);
        Transition left, right;
        left.t = right.t = tr.t;
        left.points.assign(tr.points.begin(), tr.points.begin() + static_cast<long>(cut) + 1);
        left.gap_kinds.assign(tr.gap_kinds.begin(),
                              tr.gap_kinds.begin() + static_cast<long>(cut));
        right.points.assign(tr.points.begin() + static_cast<long>(cut), tr.points.end());
        right.gap_kinds.assign(tr.gap_kinds.begin() + static_cast<long>(cut),
                               tr.gap_kinds.end());
        const double sum = transition_cost(sys, left).total + transition_cost(sys, right).total;
        CHECK(sum == Approx(whole.total).margin(1e-10));
    }
}

TEST_CASE("lower bound holds for arbitrary transitions", "[transitions]") {
    // finite parameter sets: every gap is a hole (accumulation flags assert
    // elided dense points and only arise from the constructive builder)
    const RISystem sys = rt::quartic_const_load(0.55, 0.5, 0.5);
    auto rng = rt::seeded_rng();
    std::uniform_real_distribution<double> unif(-1.8, 1.8);
    std::uniform_int_distribution<int> count(2, 12);
    std::uniform_int_distribution<int> kind(0, 1);
    for (int k = 0; k < 200; ++k) {
        std::vector<double> pts;
        const int n = count(rng);
        for (int i = 0; i < n; ++i) pts.push_back(unif(rng));
        std::sort(pts.begin(), pts.end());
        pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
        if (pts.size() < 2) continue;
        if (kind(rng)) std::reverse(pts.begin(), pts.end());
        Transition tr;
        tr.t = 0.5;
        tr.points = pts;
        tr.gap_kinds.assign(pts.size() - 1, GapKind::hole);
        const CostBreakdown c = transition_cost(sys, tr);
        const double drop = sys.energy_unchecked(0.5, tr.points.front()) -
                            sys.energy_unchecked(0.5, tr.points.back());
        CHECK(c.total >= drop - 1e-7);
    }
}

TEST_CASE("chain monotonicity and discrete energy descent", "[transitions]") {
    const RISystem sys = rt::quartic_const_load(kDelay + 0.5, 0.5, 1.0);
    const Transition tr = build_optimal_transition(sys, 0.0, -1.0 / kRoot3, 2.0 / kRoot3);

    // the per-pair descent inequality makes -E minus the running variation
    // nondecreasing along the point list
    for (size_t i = 1; i < tr.points.size(); ++i) {
        const double psi_inc = sys.psi(tr.points[i] - tr.points[i - 1]);
        const double drop = sys.energy_unchecked(0.0, tr.points[i - 1]) -
                            sys.energy_unchecked(0.0, tr.points[i]);
        CHECK(psi_inc <= drop + 1e-9);
    }

    // total Psi-variation is dominated by the total energy drop
    const double total_drop = sys.energy_unchecked(0.0, tr.points.front()) -
                              sys.energy_unchecked(0.0, tr.points.back());
    double var = 0.0;
    for (size_t i = 1; i < tr.points.size(); ++i)
        var += sys.psi(tr.points[i] - tr.points[i - 1]);
    CHECK(var <= total_drop + 1e-8);
}

TEST_CASE("interior hole points are strictly unstable", "[transitions]") {
    const RISystem sys = rt::quartic_const_load(kMod + 0.5, 0.5, 1.0 / 3.0);
    const double rest = rt::cubic_root(kMod, 1.0 / kRoot3, 2.0);
    const Transition tr = build_optimal_transition(sys, 0.0, -kModLand, rest);
    REQUIRE(tr.gap_kinds.front() == GapKind::hole);
    const double a = tr.points[0], b = tr.points[1];
    for (int k = 1; k < 8; ++k) {
        const double v = a + (b - a) * k / 8.0;
        CHECK_FALSE(check_stability_1d(sys, 0.0, v).stable);
    }
}

TEST_CASE("jump preconditions are enforced", "[transitions]") {
    // at a sub-Maxwell level the slope inequality fails across the wells
    const RISystem sys = rt::quartic_const_load(0.3, 0.5, 0.0);
    CHECK_THROWS_AS(build_optimal_transition(sys, 0.0, -1.0, 1.0), JumpConditionViolation);
}
