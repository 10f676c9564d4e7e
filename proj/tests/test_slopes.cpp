#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "riveq/moreau.hpp"
#include "riveq/slopes.hpp"
#include "test_helpers.hpp"

using namespace riveq;
using Catch::Approx;
namespace rt = riveq::testing;

namespace {

// brute-force slope oracle over a dense z grid
double slope_ir_oracle(const RISystem& sys, double u, double hi = 3.0) {
    auto V = [&](double z) {
        return (sys.W().value(z) - sys.W().value(u) + sys.delta(u, z)) / (z - u);
    };
    double best = sys.W().derivative(u);
    const int n = 400000;
    for (int i = 1; i <= n; ++i) {
        const double z = u + (hi - u) * i / n;
        best = std::min(best, V(z));
    }
    return best;
}

} // namespace

TEST_CASE("slopes of a convex energy equal the derivative", "[slopes]") {
    const RISystem sys = rt::convex_linear(1.0, 0.5);
    const SlopeResult ir = slope_ir(sys, 0.7);
    CHECK(ir.value == Approx(0.7).margin(1e-8));
    CHECK_FALSE(ir.arg.has_value());
    const SlopeResult sl = slope_sl(sys, -0.3);
    CHECK(sl.value == Approx(-0.3).margin(1e-8));
    CHECK_FALSE(sl.arg.has_value());
}

TEST_CASE("energetic slopes at the well bottoms", "[slopes]") {
    const RISystem sys = rt::quartic_const_load(0.0, 0.5, 0.0);
    const SlopeResult ir = slope_ir(sys, -1.0);
    CHECK(ir.value == Approx(0.0).margin(1e-7));
    REQUIRE(ir.arg.has_value()); // the infimum is also attained at z = 1
    CHECK(*ir.arg == Approx(1.0).margin(1e-5));

    const SlopeResult sl = slope_sl(sys, 1.0);
    CHECK(sl.value == Approx(0.0).margin(1e-7));
    REQUIRE(sl.arg.has_value());
    CHECK(*sl.arg == Approx(-1.0).margin(1e-5));
}

TEST_CASE("slope collapse under the convexity threshold", "[slopes]") {
    // mu = -min W'' = 1: both corrected slopes equal W'
    const RISystem sys = rt::quartic_const_load(0.0, 0.5, 1.0);
    for (double u : {-1.2, -0.57735, 0.0, 0.2, 0.7, 1.3}) {
        const double wp = u * u * u - u;
        CHECK(slope_ir(sys, u).value == Approx(wp).margin(1e-7));
        CHECK(slope_sl(sys, u).value == Approx(wp).margin(1e-7));
    }
    CHECK(slope_sl(sys, 0.2).value == Approx(-0.192).margin(1e-7));
}

TEST_CASE("slope values match the dense-grid oracle", "[slopes]") {
    for (double mu : {0.0, 1.0 / 3.0}) {
        const RISystem sys = rt::quartic_const_load(0.0, 0.5, mu);
        for (double u : {-1.0, -0.8, -0.3, 0.4, 0.9}) {
            CHECK(slope_ir(sys, u).value ==
                  Approx(slope_ir_oracle(sys, u)).margin(2e-6));
        }
    }
}

TEST_CASE("modified Maxwell detachment", "[slopes]") {
    // mu = 1/3 at the trigger: the infimum from -sqrt(2/3) is also attained
    // at +sqrt(2/3)
    const RISystem sys = rt::quartic_const_load(0.0, 0.5, 1.0 / 3.0);
    const double r = std::sqrt(2.0 / 3.0);
    const SlopeResult ir = slope_ir(sys, -r);
    CHECK(ir.value == Approx((1.0 / 3.0) * r).margin(1e-7)); // mu sqrt(1-mu)
    REQUIRE(ir.arg.has_value());
    CHECK(*ir.arg == Approx(r).margin(1e-4));
}

TEST_CASE("one-dimensional stability chain", "[slopes]") {
    const RISystem stable = rt::quartic_const_load(0.0, 0.5, 0.0);
    const StabilityVerdict v = check_stability_1d(stable, 0.0, -1.0);
    CHECK(v.stable);
    CHECK(v.margin_ir == Approx(0.5).margin(1e-6));
    CHECK(v.margin_sl == Approx(0.5).margin(1e-6));

    const RISystem pushed = rt::quartic_const_load(0.6, 0.5, 0.0);
    const StabilityVerdict w = check_stability_1d(pushed, 0.0, -1.0);
    CHECK_FALSE(w.stable);
    CHECK(w.margin_ir < -0.05);

    // convex W at equilibrium: margins are exactly the alphas
    const RISystem conv = rt::convex_linear(0.7, 0.0, 0.0, 2.0);
    const StabilityVerdict c = check_stability_1d(conv, 0.5, 0.5); // W'(u) = ell(t)
    CHECK(c.stable);
    CHECK(c.margin_ir == Approx(0.7).margin(1e-7));
    CHECK(c.margin_sl == Approx(0.7).margin(1e-7));
}

TEST_CASE("monotone decrease certificate on the detached region", "[slopes]") {
    const RISystem energetic = rt::quartic_const_load(0.0, 0.5, 0.0);
    CHECK(monotone_decrease_certificate(energetic, -0.98, -0.60, SlopeSide::ir));

    const RISystem collapsed = rt::quartic_const_load(0.0, 0.5, 1.0);
    CHECK_THROWS_AS(monotone_decrease_certificate(collapsed, -0.98, -0.60, SlopeSide::ir),
                    PreconditionViolation);

    const RISystem conv = rt::convex_linear(1.0);
    CHECK_THROWS_AS(monotone_decrease_certificate(conv, -1.0, 1.0, SlopeSide::ir),
                    PreconditionViolation);
}

TEST_CASE("slope continuity in the base point", "[slopes]") {
    const RISystem sys = rt::quartic_const_load(0.0, 0.5, 0.0);
    for (double u : {-1.0, -0.7, 0.3}) {
        double prev_gap = std::numeric_limits<double>::infinity();
        for (double h : {1e-2, 1e-3, 1e-4}) {
            const double gap = std::abs(slope_ir(sys, u + h).value - slope_ir(sys, u).value);
            CHECK(gap < prev_gap + 1e-9);
            prev_gap = gap;
        }
        CHECK(prev_gap < 1e-3);
    }
}

TEST_CASE("slope ordering and monotonicity in the correction", "[slopes]") {
    const RISystem s0 = rt::quartic_const_load(0.0, 0.5, 0.0);
    const RISystem s3 = rt::quartic_const_load(0.0, 0.5, 1.0 / 3.0);
    const RISystem s1 = rt::quartic_const_load(0.0, 0.5, 1.0);
    for (int i = 0; i <= 40; ++i) {
        const double u = -1.6 + 3.2 * i / 40;
        const double wp = s0.W().derivative(u);
        const double w0 = slope_ir(s0, u).value;
        const double w3 = slope_ir(s3, u).value;
        const double w1 = slope_ir(s1, u).value;
        CHECK(w0 <= w3 + 1e-7);
        CHECK(w3 <= w1 + 1e-7);
        CHECK(w1 <= wp + 1e-7);
        CHECK(wp <= slope_sl(s0, u).value + 1e-7);
    }
}

TEST_CASE("slope stability agrees with the definition", "[slopes]") {
    for (double mu : {0.0, 1.0}) {
        const RISystem sys = rt::quartic_linear(0.5, mu);
        int band = 0;
        for (int i = 0; i <= 20; ++i) {
            for (int j = 0; j <= 20; ++j) {
                const double t = i / 20.0;
                const double u = -2.0 + 4.0 * j / 20.0;
                const StabilityVerdict v = check_stability_1d(sys, t, u);
                const bool def = is_stable_by_definition(sys, t, u);
                if (std::abs(v.boundary_margin()) < 1e-6) {
                    ++band;
                    continue;
                }
                CHECK(v.stable == def);
            }
        }
        CHECK(band <= 8); // the tolerance band is a thin neighborhood
    }
}
