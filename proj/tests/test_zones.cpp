#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "opticon/errors.hpp"
#include "opticon/zones.hpp"
#include "support.hpp"

using namespace opticon;
using testkit::ref;

namespace {

// Root of i_M - s + c + c ln(s / c) on (c, 1], by plain bisection.
double root_of_branch(double c, double iM) {
    auto g = [&](double s) { return iM - s + c + c * std::log(s / c); };
    double lo = c, hi = 1.0;
    for (int k = 0; k < 200; ++k) {
        const double mid = 0.5 * (lo + hi);
        (g(mid) > 0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double peak_i(double s, double i, double b, double gamma) {
    const auto path = testkit::rk4(s, i, [&](double, double, double) { return b; }, 0, 2000, 0.01, gamma);
    double m = 0;
    for (const auto& q : path) m = std::max(m, q.i);
    return m;
}

}  // namespace

TEST_CASE("scenario values of the zone boundaries") {
    const auto p = ref();
    CHECK(std::abs(phi_A_analytic(0.7, p) + 0.071) <= 1e-3);
    CHECK(std::abs(phi_A_analytic(0.85, p) + 0.148) <= 1e-3);
    CHECK(std::abs(phi_B_analytic(0.85, p) - 0.014) <= 1e-3);
    CHECK(std::abs(phi_B_analytic(0.7, p) - 0.018) <= 1e-3);
    // Below the thresholds the clamped maps sit at i_M.
    CHECK(phi_B(0.7, p) == 0.02);
    CHECK(phi_A(0.3, p) == 0.02);
    CHECK(phi_A(0.7, p) == 0.0);
}

TEST_CASE("s_M and s_M* agree with an independent bisection") {
    const auto p = ref();
    CHECK(std::abs(s_m(p) - root_of_branch(p.herd(), p.i_M())) < 1e-10);
    CHECK(std::abs(s_m_star(p) - root_of_branch(p.lock(), p.i_M())) < 1e-10);
    CHECK(std::abs(s_m(p) - 0.51115525113) < 1e-9);
    // gamma/beta* = 3: the feasible boundary never reaches i = 0 inside [0, 1].
    CHECK_THROWS_AS(EpidemicParams(0.02, 0.16, 0.06, 0.3), DomainError);
}

TEST_CASE("Phi_A is the highest start whose beta-trajectory peaks at i_M") {
    const auto p = ref();
    for (double s : {0.4, 0.45, 0.5}) {
        const double i = phi_A(s, p);
        CHECK(std::abs(peak_i(s, i, p.beta(), p.gamma()) - p.i_M()) < 1e-7);
    }
}

TEST_CASE("Phi_B is the beta*-trajectory through (gamma/beta*, i_M)") {
    const auto p = ref();
    for (double s : {0.8, 0.85, 0.9}) {
        const double i = phi_B(s, p);
        const auto path = testkit::rk4(s, i, [&](double, double, double) { return p.beta_star(); }, 0, 2000, 0.01,
                                       p.gamma());
        double m = 0;
        for (const auto& q : path) m = std::max(m, q.i);
        CHECK(std::abs(m - p.i_M()) < 1e-7);
    }
}

TEST_CASE("classification of representative points") {
    const auto p = ref();
    CHECK(classify({0.3, 0.01}, p) == ZoneLabel::InteriorA);
    CHECK(classify({0.3, 0.02}, p) == ZoneLabel::BoundaryA);
    CHECK(classify({0.7, 0.001}, p) == ZoneLabel::InB0_NotA);
    CHECK(classify({0.85, 0.001}, p) == ZoneLabel::InB_NotB0);
    CHECK(classify({0.85, phi_B(0.85, p)}, p) == ZoneLabel::BoundaryB);
    CHECK(classify({0.85, 0.05}, p) == ZoneLabel::OutsideB);
    CHECK(classify({0.85, 0.0}, p) == ZoneLabel::StationaryLine);
    CHECK(in_B(ZoneLabel::StationaryLine));
    CHECK_FALSE(in_B(ZoneLabel::OutsideB));
    CHECK(in_A(ZoneLabel::BoundaryA));
    CHECK_FALSE(in_A(ZoneLabel::InB0_NotA));
}

TEST_CASE("capture basin: starts in B reach B0 with i <= i_M") {
    const auto p = ref();
    testkit::Gen g(11);
    for (int k = 0; k < 20; ++k) {
        const SirState x = g.feasible(p, 0.8, 0.93, 1e-3);
        CHECK(capture_basin_check(x, p, 2000));
    }
}

TEST_CASE("coarse grid kernel agrees with the closed forms") {
    const auto p = ref();
    const BitGrid gB = grid_viability_kernel(p, 64, 9);
    const BitGrid gA = grid_viability_kernel(p, 64, 1);
    const auto cB = compare_with_closed_form(gB, [&](double s) { return phi_B(s, p); }, 2);
    const auto cA = compare_with_closed_form(gA, [&](double s) { return phi_A(s, p); }, 2);
    CHECK(cB.outside_band == 0);
    CHECK(cA.outside_band == 0);
    CHECK(gB.count() > gA.count());
}

TEST_CASE("serial and parallel grid kernels are identical") {
    const auto p = ref();
    const BitGrid a = grid_viability_kernel(p, GridOptions{96, 9, false});
    const BitGrid b = grid_viability_kernel(p, GridOptions{96, 9, true});
    CHECK(a == b);
}
