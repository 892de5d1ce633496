#pragma once

// Randomized property suites shared by the unit tests and the acceptance
// runner. Each returns the number of cases, failures and the worst observed
// value of the checked quantity.

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "opticon/dynamics.hpp"
#include "opticon/synthesis.hpp"
#include "opticon/zones.hpp"
#include "support.hpp"

namespace testkit {

struct PropertyOutcome {
    int cases = 0;
    int failures = 0;
    double worst = 0.0;

    void record(double value, bool ok) {
        ++cases;
        if (!ok) ++failures;
        worst = std::max(worst, value);
    }
};

/// 1-5 constant pieces with random rates in [beta*, beta] over [0, horizon].
inline opticon::ControlSchedule random_schedule(Gen& g, const opticon::EpidemicParams& p, double horizon) {
    const int n = g.integer(1, 5);
    std::vector<double> cuts{0.0, horizon};
    for (int k = 1; k < n; ++k) cuts.push_back(g.uniform(0.0, horizon));
    std::sort(cuts.begin(), cuts.end());
    std::vector<opticon::ControlSegment> segs;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k)
        if (cuts[k + 1] > cuts[k])
            segs.push_back({cuts[k], cuts[k + 1], opticon::ConstantLaw{g.uniform(p.beta_star(), p.beta())}});
    return opticon::ControlSchedule(p, std::move(segs), p.beta());
}

/// Points anywhere in the simplex stay in it under random piecewise controls.
inline PropertyOutcome simplex_preservation(std::uint64_t seed, int n) {
    const auto p = ref();
    Gen g(seed);
    PropertyOutcome out;
    for (int c = 0; c < n; ++c) {
        const double s = g.uniform(0.0, 1.0);
        const opticon::SirState x0(s, g.uniform(0.0, 1.0 - s));
        const auto tr = opticon::integrate(x0, random_schedule(g, p, 300), 0, 300, 1e-9, p);
        double worst = 0;
        for (const auto& x : tr.states())
            worst = std::max({worst, -x.s, -x.i, x.s + x.i - 1.0});
        out.record(worst, worst <= 1e-12);
    }
    return out;
}

/// |C(x(t)) - C(x0)| under constant b, in units of tol.
inline PropertyOutcome conserved_drift(std::uint64_t seed, int n, double tol) {
    const auto p = ref();
    Gen g(seed);
    PropertyOutcome out;
    for (int c = 0; c < n; ++c) {
        const double s = g.uniform(0.05, 0.95);
        const opticon::SirState x0(s, g.uniform(1e-4, 1.0 - s));
        const double b = g.uniform(p.beta_star(), p.beta());
        const auto tr = opticon::integrate(x0, opticon::ControlSchedule::constant(p, b), 0, 300, tol, p);
        const double c0 = opticon::conserved_quantity(x0, b, p);
        double worst = 0;
        for (const auto& x : tr.states()) worst = std::max(worst, std::abs(opticon::conserved_quantity(x, b, p) - c0));
        out.record(worst / tol, worst < 100 * tol);
    }
    return out;
}

/// Forward to T then backward to 0 under the same schedule, in units of tol.
/// Backward runs amplify errors by roughly i(0)/i(T), so T stays within 40
/// days; past ~80 days the error grows with that ratio whatever tol is.
inline PropertyOutcome round_trip(std::uint64_t seed, int n, double tol) {
    const auto p = ref();
    Gen g(seed);
    PropertyOutcome out;
    for (int c = 0; c < n; ++c) {
        const double s = g.uniform(0.05, 0.95);
        const opticon::SirState x0(s, g.uniform(1e-4, 1.0 - s));
        const double T = g.uniform(5.0, 40.0);
        const auto sch = random_schedule(g, p, T);
        const auto fw = opticon::integrate(x0, sch, 0, T, tol, p);
        const auto bw = opticon::integrate(fw.back(), sch, T, 0, tol, p);
        const double err = std::max(std::abs(bw.front().s - x0.s), std::abs(bw.front().i - x0.i));
        out.record(err / tol, err < 10 * tol);
    }
    return out;
}

/// Sup distance between the closed-loop path and the open-loop optimum.
inline PropertyOutcome feedback_agreement(std::uint64_t seed, int n) {
    const auto p = ref();
    Gen g(seed);
    PropertyOutcome out;
    while (out.cases < n) {
        const opticon::SirState x0 = g.feasible(p, 0.05, 0.95, 1e-3);
        const double t_f = opticon::reaching_time(x0, p) + 200.0;
        const auto r = opticon::optimal_open_loop(x0, t_f, p);
        const auto fb = opticon::simulate_feedback(x0, t_f, p);
        const double d = opticon::sup_distance(r.trajectory, fb);
        out.record(d, d < 1e-6);
    }
    return out;
}

/// (s, i) in B and 0 <= i' < i imply (s, i') in B.
inline PropertyOutcome monotone_membership(std::uint64_t seed, int n) {
    const auto p = ref();
    Gen g(seed);
    PropertyOutcome out;
    for (int c = 0; c < n; ++c) {
        const opticon::SirState x = g.feasible(p, 0.01, 0.99, 0.0);
        bool ok = opticon::in_B(opticon::classify(x, p));
        for (int k = 0; k < 10; ++k) {
            const double lower = x.i * g.uniform(0.0, 1.0);
            ok = ok && opticon::in_B(opticon::classify({x.s, lower}, p));
        }
        // The boundary point itself and everything below it.
        const double top = std::min(opticon::phi_B(x.s, p), 1.0 - x.s);
        ok = ok && opticon::in_B(opticon::classify({x.s, top}, p));
        out.record(ok ? 0.0 : 1.0, ok);
    }
    return out;
}

}  // namespace testkit
