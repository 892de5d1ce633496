#pragma once

// Optimal control synthesis: beta until the trajectory meets the boundary of
// B, beta* along that boundary down to s = gamma/beta*, the boundary arc
// i = i_M (control beta / (1 + beta i_M (tau2 - t))) until s = gamma/beta,
// then beta again.

#include <optional>
#include <string>
#include <vector>

#include "opticon/control.hpp"
#include "opticon/dynamics.hpp"
#include "opticon/params.hpp"
#include "opticon/zones.hpp"

namespace opticon {

struct SwitchingTimes {
    std::optional<double> tau0;
    std::optional<double> tau1;
    std::optional<double> tau2;
    double reaching_time = 0.0;
};

struct SynthesisResult {
    EpidemicParams params;
    CostWeights weights;
    SirState state0;
    double t_f;
    ZoneLabel start_label;
    ControlSchedule schedule;
    SwitchingTimes switching;
    Trajectory trajectory;
    double cost;
    std::string structure;           // e.g. "bang-boundary-bang"
    std::vector<std::string> notes;  // non-uniqueness and edge-case remarks
};

/// Throws InfeasibleStart outside B and DomainError when i0 = 0.
SwitchingTimes switching_times(const SirState& state0, double t_f, const EpidemicParams& params);

/// Throws HorizonError unless t_f exceeds the reaching time by enough for
/// s(t_f) < gamma/beta to hold with omega(t_f - reaching) > 1e-10.
SynthesisResult optimal_open_loop(const SirState& state0, double t_f, const EpidemicParams& params,
                                  const CostWeights& weights = {}, double tol = kDefaultTol);

/// The dense path of a synthesized schedule on [0, t_f], integrated the way
/// optimal_open_loop does it (shared so stored schedules reproduce exactly).
Trajectory open_loop_trajectory(const SirState& state0, const ControlSchedule& schedule, double t_f,
                                const EpidemicParams& params, double tol = kDefaultTol);

/// Feedback form of the optimal control. `band` is the distance within which
/// a state counts as lying on i = i_M or on the upper boundary of B.
double optimal_feedback(const SirState& state, const EpidemicParams& params, double band = 1e-9);

/// Closed-loop run of optimal_feedback with mode switches at boundary contacts.
Trajectory simulate_feedback(const SirState& state0, double t_f, const EpidemicParams& params,
                             double tol = kDefaultTol);

/// Exact J = int_0^t_f lambda1 + lambda2 (beta - b) dt. Closed form per
/// segment; schedules carrying bumps fall back to Gauss-Legendre panels.
double cost(const ControlSchedule& schedule, double t_f, const CostWeights& weights);

double reaching_time(const SirState& state0, const EpidemicParams& params);

/// gamma/beta - s(tau) on the beta-trajectory restarted from (gamma/beta, i_r),
/// i_r being the infected level at the reaching time.
double omega(const SirState& state0, double tau, const EpidemicParams& params);

struct LengthBounds {
    double lower;
    double upper;
    double theta0;
    double theta1;  // s at tau0
    double theta2;  // i at tau0
};

/// Bracket for tau1 - tau0 from the start data alone. Degenerates to [0, 0]
/// when the beta-trajectory meets the boundary at s <= gamma/beta*.
LengthBounds lockdown_length_bounds(const SirState& state0, const EpidemicParams& params);

}  // namespace opticon
