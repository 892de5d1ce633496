#include <doctest.h>

#include <cmath>

#include "opticon/errors.hpp"
#include "opticon/synthesis.hpp"
#include "support.hpp"

using namespace opticon;
using testkit::ref;

namespace {

constexpr double kH = 1e-3;  // RK4 oracle step

struct OracleTimes {
    double tau0, tau1, tau2, s1;
};

// Switching times from fixed-step RK4 and linear interpolation only.
OracleTimes oracle_times(double s0, double i0) {
    const double b = 0.16, bs = 0.08, g = 0.06, iM = 0.02;
    const double L = g / bs, H = g / b;
    auto phiB = [&](double s) { return s <= L ? iM : iM - s + L + L * std::log(s / L); };
    const auto p1 = testkit::rk4(s0, i0, [&](double, double, double) { return b; }, 0, 400, kH, g);
    const double t0 = testkit::first_crossing(p1, [&](double s, double i) { return i - phiB(s); });
    // State at t0 by interpolation between the bracketing samples.
    std::size_t k = 1;
    while (p1[k].t < t0) ++k;
    const double w = (t0 - p1[k - 1].t) / (p1[k].t - p1[k - 1].t);
    const double s_t0 = p1[k - 1].s + w * (p1[k].s - p1[k - 1].s);
    const double i_t0 = p1[k - 1].i + w * (p1[k].i - p1[k - 1].i);
    if (s_t0 <= L) return {t0, t0, t0 + (s_t0 - H) / (g * iM), s_t0};
    const auto p2 = testkit::rk4(s_t0, i_t0, [&](double, double, double) { return bs; }, t0, t0 + 400, kH, g);
    const double t1 = testkit::first_crossing(p2, [&](double s, double) { return s - L; });
    return {t0, t1, t1 + (L - H) / (g * iM), L};
}

// J for lambda = (0, 1): (beta - beta*) (tau1 - tau0) + int_tau1^tau2 (beta - beta/(1 + beta i_M (tau2 - t))) dt.
double oracle_cost(const OracleTimes& o) {
    const double b = 0.16, bs = 0.08, iM = 0.02;
    const double d = o.tau2 - o.tau1;
    return (b - bs) * (o.tau1 - o.tau0) + b * d - std::log1p(b * iM * d) / iM;
}

}  // namespace

TEST_CASE("scenario 1: bang-boundary-bang") {
    const auto p = ref();
    const SynthesisResult r = optimal_open_loop({0.7, 0.001}, 500, p);
    CHECK(r.structure == "bang-boundary-bang");
    CHECK(r.start_label == ZoneLabel::InB0_NotA);
    REQUIRE(r.switching.tau0);
    CHECK(*r.switching.tau0 == *r.switching.tau1);

    const OracleTimes o = oracle_times(0.7, 0.001);
    CHECK(std::abs(*r.switching.tau0 - o.tau0) < 1e-5);
    CHECK(std::abs(*r.switching.tau2 - o.tau2) < 1e-5);
    CHECK(std::abs(r.cost - oracle_cost(o)) < 1e-5);

    CHECK(std::abs(r.trajectory.state_at(*r.switching.tau2).s - 0.375) < 1e-8);
    CHECK(r.switching.reaching_time == *r.switching.tau2);
    CHECK(r.trajectory.max_i() <= p.i_M() + 1e-10);
    CHECK(r.trajectory.back().s < p.herd());
}

TEST_CASE("scenario 2: bang-bang-boundary-bang with a beta* plateau") {
    const auto p = ref();
    const SynthesisResult r = optimal_open_loop({0.85, 0.001}, 500, p);
    CHECK(r.structure == "bang-bang-boundary-bang");
    CHECK(r.start_label == ZoneLabel::InB_NotB0);
    const double t0 = *r.switching.tau0, t1 = *r.switching.tau1, t2 = *r.switching.tau2;
    CHECK(t1 > t0);
    CHECK(r.schedule.value(0.5 * (t0 + t1)) == p.beta_star());
    CHECK(r.schedule.value(0.5 * t0) == p.beta());
    CHECK(r.schedule.value(t2 + 1) == p.beta());

    const OracleTimes o = oracle_times(0.85, 0.001);
    CHECK(std::abs(t0 - o.tau0) < 1e-5);
    CHECK(std::abs(t1 - o.tau1) < 1e-5);
    CHECK(std::abs(t2 - o.tau2) < 1e-5);
    CHECK(std::abs(r.cost - oracle_cost(o)) < 1e-5);

    const LengthBounds lb = lockdown_length_bounds({0.85, 0.001}, p);
    CHECK(lb.lower <= t1 - t0);
    CHECK(t1 - t0 <= lb.upper);
    CHECK(lb.lower > 0);
}

TEST_CASE("boundary arc: linear s and closed-form length") {
    const auto p = ref();
    for (double s0 : {0.7, 0.85}) {
        const SynthesisResult r = optimal_open_loop({s0, 0.001}, 500, p);
        const double t1 = *r.switching.tau1, t2 = *r.switching.tau2;
        const double s2 = r.trajectory.state_at(t2).s;
        double err = 0;
        for (int k = 0; k <= 400; ++k) {
            const double t = t1 + (t2 - t1) * k / 400.0;
            err = std::max(err, std::abs(r.trajectory.state_at(t).s - (s2 + p.gamma() * p.i_M() * (t2 - t))));
            CHECK(std::abs(r.schedule.value(std::min(t, t2 - 1e-12)) - p.gamma() / r.trajectory.state_at(t).s) <
                  1e-8);
        }
        CHECK(err <= 1e-8);
        const double s1 = r.trajectory.state_at(t1).s;
        CHECK(std::abs((t2 - t1) - (s1 - p.herd()) / (p.gamma() * p.i_M())) <= 1e-8);
    }
}

TEST_CASE("cost matches quadrature of the stored control") {
    const auto p = ref();
    const CostWeights w(0.5, 2.0);
    const SynthesisResult r = optimal_open_loop({0.85, 0.001}, 500, p, w);
    // Composite Simpson on the schedule, split at the switching times.
    std::vector<double> cuts{0, *r.switching.tau0, *r.switching.tau1, *r.switching.tau2, 500};
    double acc = 0;
    for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
        const double a = cuts[c], b = cuts[c + 1];
        if (b <= a) continue;
        const int n = 2000;
        const double h = (b - a) / n;
        auto f = [&](double t) { return w.lambda1 + w.lambda2 * (p.beta() - r.schedule.value(std::min(t, b - 1e-13))); };
        double sum = f(a) + f(b);
        for (int k = 1; k < n; ++k) sum += (k % 2 ? 4 : 2) * f(a + k * h);
        acc += sum * h / 3;
    }
    CHECK(std::abs(r.cost - acc) < 1e-8);
}

TEST_CASE("starts in A keep beta and cost lambda1 t_f") {
    const auto p = ref();
    const CostWeights w(0.3, 1.0);
    const SynthesisResult r = optimal_open_loop({0.3, 0.01}, 200, p, w);
    CHECK(r.structure == "bang");
    CHECK(r.cost == 0.3 * 200);
    for (double b : r.trajectory.controls()) CHECK(b == p.beta());
}

TEST_CASE("errors: infeasible start, short horizon, zero infection") {
    const auto p = ref();
    CHECK_THROWS_AS(optimal_open_loop({0.85, 0.05}, 500, p), InfeasibleStart);
    CHECK_THROWS_AS(optimal_open_loop({0.7, 0.001}, 100, p), HorizonError);
    CHECK_THROWS_AS(optimal_open_loop({0.7, 0.0}, 500, p), DomainError);
    CHECK_THROWS_AS(switching_times({0.7, 0.001}, -1, p), DomainError);
}

TEST_CASE("feedback values in each region") {
    const auto p = ref();
    CHECK(optimal_feedback({0.3, 0.01}, p) == p.beta());
    CHECK(optimal_feedback({0.7, 0.001}, p) == p.beta());
    CHECK(std::abs(optimal_feedback({0.6, p.i_M()}, p) - p.gamma() / 0.6) < 1e-15);
    CHECK(optimal_feedback({0.85, phi_B(0.85, p)}, p) == p.beta_star());
    CHECK_THROWS_AS(optimal_feedback({0.85, 0.05}, p), InfeasibleStart);
}

TEST_CASE("closed loop reproduces the open-loop path") {
    const auto p = ref();
    for (double s0 : {0.7, 0.85}) {
        const SynthesisResult r = optimal_open_loop({s0, 0.001}, 500, p);
        const Trajectory fb = simulate_feedback({s0, 0.001}, 500, p);
        CHECK(sup_distance(r.trajectory, fb) < 1e-6);
    }
}

TEST_CASE("omega is positive past the reaching time") {
    const auto p = ref();
    CHECK(omega({0.7, 0.001}, 0.0, p) == 0.0);
    CHECK(omega({0.7, 0.001}, 10.0, p) > 0.0);
    CHECK(omega({0.7, 0.001}, 100.0, p) > omega({0.7, 0.001}, 10.0, p));
    CHECK(std::abs(reaching_time({0.7, 0.001}, p) - *switching_times({0.7, 0.001}, 500, p).tau2) < 1e-12);
}
