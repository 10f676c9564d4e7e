#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "riveq/envelopes.hpp"
#include "test_helpers.hpp"

using namespace riveq;
using Catch::Approx;
namespace rt = riveq::testing;

namespace {

const double kRoot3 = std::sqrt(3.0);
const double kPlateau = 2.0 / (3.0 * kRoot3); // local max of u^3 - u

} // namespace

TEST_CASE("envelope of an already monotone slope", "[envelopes]") {
    const RISystem sys = rt::convex_linear(1.0);
    const MonotoneEnvelope env = build_envelope(sys, 0.0, EnvelopeSide::upper_of_ir);
    for (double u : {0.1, 0.5, 0.9}) CHECK(env.value(u) == Approx(u).margin(1e-6));
    CHECK(env.p_left(0.7) == Approx(0.7).margin(1e-7));
    CHECK(env.p_right(0.7) == Approx(0.7).margin(1e-7));
    const auto contact = env.contact_selection(0.7);
    REQUIRE(contact.size() == 1);
    CHECK(contact[0] == Approx(0.7).margin(1e-6));
}

TEST_CASE("energetic envelope has the Maxwell plateau", "[envelopes]") {
    const RISystem sys = rt::quartic_const_load(0.0, 0.5, 0.0);
    const double base = rt::cubic_root(-1.0, -2.0, -1.0); // W' = -1 on the left branch
    CHECK(base == Approx(-1.3247179572447460).margin(1e-10));
    const MonotoneEnvelope env = build_envelope(sys, base, EnvelopeSide::upper_of_ir);

    // equals W' on the rising branch, locks at 0 across the wells
    CHECK(env.value(-1.2) == Approx(sys.W().derivative(-1.2)).margin(1e-6));
    CHECK(env.value(0.0) == Approx(0.0).margin(1e-6));
    CHECK(env.value(0.9) == Approx(0.0).margin(1e-6));
    CHECK(env.value(1.3) == Approx(sys.W().derivative(1.3)).margin(1e-4));

    // Maxwell plateau endpoints under the zero level
    CHECK(env.p_left(-1e-6) == Approx(-1.0).margin(1e-4));
    CHECK(env.p_right(-1e-6) == Approx(-1.0).margin(1e-4));
    CHECK(env.p_right(1e-6) == Approx(1.0).margin(1e-4));

    const auto contact = env.contact_selection(0.0);
    REQUIRE(contact.size() >= 2);
    CHECK(contact.front() == Approx(-1.0).margin(1e-4));
    CHECK(contact.back() == Approx(1.0).margin(1e-4));
}

TEST_CASE("collapsed envelope is the running max of W'", "[envelopes]") {
    const RISystem sys = rt::quartic_const_load(0.0, 0.5, 1.0);
    const double base = rt::cubic_root(-1.0, -2.0, -1.0);
    const MonotoneEnvelope env = build_envelope(sys, base, EnvelopeSide::upper_of_ir);

    CHECK(env.value(0.5) == Approx(kPlateau).margin(1e-6));
    CHECK(env.value(-1.0) == Approx(0.0).margin(1e-6));

    // plateau [-1/sqrt3, 2/sqrt3] at the level of the local max
    CHECK(env.p_left(kPlateau) == Approx(-1.0 / kRoot3).margin(1e-6));
    CHECK(env.p_right(kPlateau) == Approx(2.0 / kRoot3).margin(1e-6));

    const auto contact = env.contact_selection(kPlateau);
    REQUIRE(contact.size() == 2);
    CHECK(contact[0] == Approx(-1.0 / kRoot3).margin(1e-4));
    CHECK(contact[1] == Approx(2.0 / kRoot3).margin(1e-5));
}

TEST_CASE("lower envelope mirrors the upper one", "[envelopes]") {
    const RISystem sys = rt::quartic_const_load(0.0, 0.5, 0.0);
    const double base = rt::cubic_root(1.0, 1.0, 2.0); // W' = 1 on the right branch
    const MonotoneEnvelope env = build_envelope(sys, base, EnvelopeSide::lower_of_sl);

    CHECK(env.value(1.2) == Approx(sys.W().derivative(1.2)).margin(1e-6));
    CHECK(env.value(0.0) == Approx(0.0).margin(1e-6));
    CHECK(env.q_right(1e-6) == Approx(1.0).margin(1e-4));
    CHECK(env.q_left(-1e-6) == Approx(-1.0).margin(1e-4));

    const auto contact = env.contact_selection(0.0);
    REQUIRE(contact.size() >= 2);
    CHECK(contact.front() == Approx(-1.0).margin(1e-4));
    CHECK(contact.back() == Approx(1.0).margin(1e-4));
}

TEST_CASE("inverse graph consistency", "[envelopes]") {
    const RISystem sys = rt::quartic_const_load(0.0, 0.5, 1.0);
    const MonotoneEnvelope env = build_envelope(sys, -1.5, EnvelopeSide::upper_of_ir);
    auto rng = rt::seeded_rng();
    std::uniform_real_distribution<double> levels(env.values().front() + 1e-3,
                                                  env.values().back() - 1e-3);
    for (int k = 0; k < 25; ++k) {
        const double l = levels(rng);
        const double pl = env.p_left(l);
        const double pr = env.p_right(l);
        CHECK(pl <= pr + 1e-9);
        // p_l and p_r are nondecreasing in the level
        const double l2 = l + 1e-3;
        CHECK(env.p_left(l2) >= pl - 1e-9);
        CHECK(env.p_right(l2) >= pr - 1e-9);
        // the slope stays under the level up to p_right
        for (int i = 1; i < 16; ++i) {
            const double u = env.base_point() + (pr - env.base_point()) * i / 16.0;
            CHECK(env.slope_at(u) <= l + 1e-7);
        }
        // inside a plateau the envelope sits at the level
        const double mid = 0.5 * (pl + pr);
        if (pr - pl > 1e-6) CHECK(env.value(mid) == Approx(l).margin(1e-3));
    }
}

TEST_CASE("envelope idempotence and minimality", "[envelopes]") {
    const RISystem sys = rt::quartic_const_load(0.0, 0.5, 0.0);
    const MonotoneEnvelope env = build_envelope(sys, -1.5, EnvelopeSide::upper_of_ir);
    const auto& g = env.grid();
    const auto& v = env.values();
    // idempotence: the running max of envelope values is itself
    double running = v.front();
    for (size_t i = 0; i < g.size(); ++i) {
        running = std::max(running, v[i]);
        CHECK(running == v[i]);
        CHECK(v[i] >= env.slope_values()[i] - 1e-9);
    }
    // minimality against a sampled nondecreasing majorant of the slope
    std::vector<double> f(g.size());
    double acc = env.slope_values()[0] + 0.05;
    for (size_t i = 0; i < g.size(); ++i) {
        acc = std::max(acc, env.slope_values()[i] + 0.05);
        f[i] = acc;
        CHECK(f[i] >= v[i] - 1e-9);
    }
}
