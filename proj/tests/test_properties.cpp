#include <doctest.h>

#include "properties.hpp"

using namespace testkit;

TEST_CASE("property: trajectories stay in the simplex") {
    const auto r = simplex_preservation(101, 120);
    CHECK(r.cases >= 100);
    CHECK(r.failures == 0);
}

TEST_CASE("property: first integral drift under constant control") {
    const auto r = conserved_drift(102, 120, 1e-9);
    CHECK(r.cases >= 100);
    CHECK(r.failures == 0);
}

TEST_CASE("property: forward/backward round trip") {
    const auto r = round_trip(103, 120, 1e-9);
    CHECK(r.cases >= 100);
    CHECK(r.failures == 0);
}

TEST_CASE("property: feedback agrees with the open-loop optimum") {
    const auto r = feedback_agreement(104, 100);
    CHECK(r.cases >= 100);
    CHECK(r.failures == 0);
}

TEST_CASE("property: B is monotone in i") {
    const auto r = monotone_membership(105, 200);
    CHECK(r.cases >= 100);
    CHECK(r.failures == 0);
}

TEST_CASE("property: starts inside A get beta and cost lambda1 t_f") {
    const auto p = ref();
    Gen g(106);
    const opticon::CostWeights w(0.7, 1.3);
    for (int c = 0; c < 100; ++c) {
        const opticon::SirState x = g.inside_A(p);
        const double t_f = opticon::reaching_time(x, p) + g.uniform(50, 400);
        const auto r = opticon::optimal_open_loop(x, t_f, p, w);
        CHECK(r.cost == 0.7 * t_f);
        CHECK(r.structure == "bang");
        CHECK(r.trajectory.max_i() <= p.i_M());
    }
}

TEST_CASE("property: synthesized paths respect the ICU bound and end below herd immunity") {
    const auto p = ref();
    Gen g(107);
    for (int c = 0; c < 100; ++c) {
        const opticon::SirState x = g.feasible(p, 0.05, 0.95, 1e-3);
        const double t_f = opticon::reaching_time(x, p) + 100;
        const auto r = opticon::optimal_open_loop(x, t_f, p);
        CHECK(r.trajectory.max_i() <= p.i_M() + 1e-9);
        CHECK(r.trajectory.back().s < p.herd());
        for (double b : r.trajectory.controls()) {
            CHECK(b >= p.beta_star() - 1e-15);
            CHECK(b <= p.beta() + 1e-15);
        }
    }
}
