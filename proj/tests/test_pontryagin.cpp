#include <doctest.h>

#include <cmath>

#include "opticon/pontryagin.hpp"
#include "support.hpp"

using namespace opticon;
using testkit::ref;

TEST_CASE("costates of both scenarios pass every check") {
    const auto p = ref();
    const CostWeights w;
    for (double s0 : {0.7, 0.85}) {
        CAPTURE(s0);
        const SynthesisResult r = optimal_open_loop({s0, 0.001}, 500, p, w);
        const CostateTrajectory c = synthesize_costates(r, w, p);
        const VerificationReport rep = verify_extremal(r, c, w, p, 1e-6);
        for (const auto& chk : rep.checks) {
            CAPTURE(chk.name);
            CAPTURE(chk.residual);
            CHECK(chk.passed);
        }
        CHECK(rep.at("P5_hamiltonian").residual <= 1e-6);
        CHECK_THROWS_AS(rep.at("no_such_check"), std::out_of_range);
    }
}

TEST_CASE("atom at tau2 has mass lambda2 beta / (gamma i_M)") {
    const auto p = ref();
    for (double l2 : {1.0, 0.5, 3.0}) {
        const CostWeights w(0.0, l2);
        const SynthesisResult r = optimal_open_loop({0.7, 0.001}, 500, p, w);
        const CostateTrajectory c = synthesize_costates(r, w, p);
        CHECK(std::abs(c.atom_mass_at(*r.switching.tau2) - l2 * 0.16 / (0.06 * 0.02)) < 1e-8);
    }
}

TEST_CASE("scenario 2 has two downward p_i jumps, scenario 1 one") {
    const auto p = ref();
    const CostWeights w;
    const SynthesisResult r1 = optimal_open_loop({0.7, 0.001}, 500, p, w);
    const SynthesisResult r2 = optimal_open_loop({0.85, 0.001}, 500, p, w);
    const CostateTrajectory c1 = synthesize_costates(r1, w, p);
    const CostateTrajectory c2 = synthesize_costates(r2, w, p);
    CHECK(c1.mu_atoms.size() == 1);
    REQUIRE(c2.mu_atoms.size() == 2);
    CHECK(std::abs(c2.mu_atoms[0].time - *r2.switching.tau1) < 1e-12);
    CHECK(c2.mu_atoms[0].mass > 0);
}

TEST_CASE("on the arc p_i is constant and the multiplier density is gamma p_s") {
    const auto p = ref();
    const CostWeights w;
    const SynthesisResult r = optimal_open_loop({0.85, 0.001}, 500, p, w);
    const CostateTrajectory c = synthesize_costates(r, w, p);
    const double t1 = *r.switching.tau1, t2 = *r.switching.tau2;
    double pi_ref = NAN;
    for (std::size_t k = 0; k < c.times.size(); ++k) {
        const double t = c.times[k];
        if (t <= t1 || t >= t2) continue;
        if (std::isnan(pi_ref)) pi_ref = c.p_i[k];
        CHECK(std::abs(c.p_i[k] - pi_ref) < 1e-9);
        CHECK(std::abs(c.mu_density[k] - p.gamma() * c.p_s[k]) < 1e-9);
    }
}

TEST_CASE("a corrupted control fails minimality") {
    const auto p = ref();
    const CostWeights w;
    SynthesisResult r = optimal_open_loop({0.7, 0.001}, 500, p, w);
    const CostateTrajectory c = synthesize_costates(r, w, p);
    std::vector<ControlSegment> segs = r.schedule.segments();
    segs.back().law = ConstantLaw{p.beta_star()};
    r.schedule = ControlSchedule(p, segs, p.beta_star());
    r.trajectory = integrate(r.state0, r.schedule, 0, r.t_f, 1e-11, p, 0.5);
    const VerificationReport rep = verify_extremal(r, c, w, p, 1e-6);
    CHECK_FALSE(rep.passed());
    CHECK_FALSE(rep.at("P4_minimality").passed);
}

TEST_CASE("pure-beta solutions carry zero costates") {
    const auto p = ref();
    const CostWeights w;
    const SynthesisResult r = optimal_open_loop({0.3, 0.01}, 300, p, w);
    const CostateTrajectory c = synthesize_costates(r, w, p);
    CHECK(c.mu_atoms.empty());
    for (double v : c.p_i) CHECK(v == 0.0);
    CHECK(verify_extremal(r, c, w, p, 1e-6).passed());
}

TEST_CASE("singular arc control") {
    const auto p = ref();
    CHECK(singular_arc_control(0.5, p) == doctest::Approx(0.12));
    CHECK_THROWS(singular_arc_control(0.9, p));
    CHECK_THROWS(singular_arc_control(0.3, p));
}
