#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "riveq/numerics.hpp"
#include "test_helpers.hpp"

using namespace riveq;
using Catch::Approx;
namespace rt = riveq::testing;

TEST_CASE("global_min on convex and double-well objectives", "[numerics]") {
    auto half_sq = [](double v) { return 0.5 * v * v; };
    const ArgminSet a = global_min(half_sq, -2.0, 2.0);
    REQUIRE(a.minimizers.size() == 1);
    CHECK(a.minimizers[0] == Approx(0.0).margin(1e-9));
    CHECK(a.min_value == Approx(0.0).margin(1e-15));

    auto well = [](double v) { return 0.25 * (v * v - 1) * (v * v - 1); };
    const ArgminSet b = global_min(well, -2.0, 2.0);
    REQUIRE(b.minimizers.size() == 2);
    CHECK(b.minimizers[0] == Approx(-1.0).margin(1e-8));
    CHECK(b.minimizers[1] == Approx(1.0).margin(1e-8));

    // tilted well: expected argmin frozen from the bisection oracle on
    // v^3 - v = 0.1 (right branch)
    auto tilted = [&](double v) { return well(v) - 0.1 * v; };
    const double oracle_root = rt::cubic_root(0.1, 1.0 / std::sqrt(3.0), 2.0);
    CHECK(oracle_root == Approx(1.0466805318046022).margin(1e-12));
    const ArgminSet c = global_min(tilted, -2.0, 2.0);
    REQUIRE(c.minimizers.size() == 1);
    CHECK(c.minimizers[0] == Approx(oracle_root).margin(1e-7));
}

TEST_CASE("global_min rejects non-finite objectives", "[numerics]") {
    auto bad = [](double v) { return v > 0.5 ? std::numeric_limits<double>::infinity() : v; };
    CHECK_THROWS_AS(global_min(bad, 0.0, 1.0), NonFiniteValue);
}

TEST_CASE("global_min never exceeds random probes", "[numerics]") {
    auto f = [](double v) { return 0.25 * (v * v - 1) * (v * v - 1) + 0.3 * std::sin(5 * v); };
    const ArgminSet a = global_min(f, -2.5, 2.5);
    auto rng = rt::seeded_rng();
    std::uniform_real_distribution<double> unif(-2.5, 2.5);
    for (int i = 0; i < 10000; ++i) CHECK(a.min_value <= f(unif(rng)) + 1e-12);
}

TEST_CASE("global_min is stable under grid refinement", "[numerics]") {
    auto f = [](double v) { return 0.25 * (v * v - 1) * (v * v - 1) - 0.05 * v; };
    MinimizeSettings s1;
    MinimizeSettings s2;
    s2.grid_points = 2 * s1.grid_points;
    const ArgminSet a1 = global_min(f, -2.0, 2.0, s1);
    const ArgminSet a2 = global_min(f, -2.0, 2.0, s2);
    CHECK(a2.min_value <= a1.min_value + s1.value_tie_tol);
    CHECK(a1.min_value <= a2.min_value + s1.value_tie_tol);
}

TEST_CASE("coercive bracket covers the loading margins", "[numerics]") {
    const RISystem quartic = RISystem(EnergyDensity::quartic_double_well(),
                                      Loading::linear(2.0, -1.0, 0.0, 1.0), // ell in [-1, 1]
                                      Dissipation(0.5, 0.5), ViscousCorrection::none());
    const auto [lo, hi] = coercive_bracket(quartic, 0.0);
    CHECK(lo <= -1.5);
    CHECK(hi >= 1.5);

    const RISystem convex = rt::convex_linear(1.0, 0.0, 0.0, 1.0);
    // ell in [0,1] here; the bracket still covers [-1, 1]
    const auto [clo, chi] = coercive_bracket(convex, 0.0);
    CHECK(clo <= -1.0);
    CHECK(chi >= 1.0);

    auto rng = rt::seeded_rng();
    std::uniform_real_distribution<double> unif(-3.0, 3.0);
    for (int i = 0; i < 50; ++i) {
        const double c = unif(rng);
        const auto [l, h] = coercive_bracket(quartic, c);
        CHECK(l <= c);
        CHECK(h >= c);
    }
}

TEST_CASE("bracket widening leaves the argmin set unchanged", "[numerics]") {
    const RISystem sys = rt::quartic_linear(0.5, 1.0);
    const double t = 0.6, u = -0.3;
    auto f = [&](double v) { return sys.energy_unchecked(t, v) + sys.dissipation(u, v); };
    const auto [lo, hi] = coercive_bracket(sys, u);
    const double mid = 0.5 * (lo + hi), w = hi - lo;
    const ArgminSet a = global_min(f, lo, hi);
    const ArgminSet b = global_min(f, mid - w, mid + w);
    REQUIRE(a.minimizers.size() == b.minimizers.size());
    for (size_t i = 0; i < a.minimizers.size(); ++i)
        CHECK(a.minimizers[i] == Approx(b.minimizers[i]).margin(1e-7));
}

TEST_CASE("adaptive Simpson quadrature", "[numerics]") {
    CHECK(integrate([](double) { return 1.0; }, 0.0, 2.0) == Approx(2.0));
    CHECK(integrate([](double s) { return s; }, 0.0, 1.0) == Approx(0.5));
    const double pi_half = std::acos(0.0);
    CHECK(integrate([](double s) { return std::cos(s); }, 0.0, pi_half, 1e-10) ==
          Approx(1.0).margin(1e-9));
}
