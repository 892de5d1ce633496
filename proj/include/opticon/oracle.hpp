#pragma once

// Brute-force baselines for the synthesized control: a direct transcription
// over piecewise-constant controls, and random admissible perturbations.

#include <cstdint>
#include <optional>
#include <vector>

#include "opticon/control.hpp"
#include "opticon/dynamics.hpp"
#include "opticon/params.hpp"
#include "opticon/synthesis.hpp"

namespace opticon {

struct TranscriptionProblem {
    int n_intervals;
    double t_f;
    SirState state0;
    EpidemicParams params;
    CostWeights weights;
    double penalty_weight = 100.0;

    /// Throws DomainError unless n_intervals >= 10, t_f > 0, penalty_weight > 0.
    void validate() const;
};

struct BaselineSolution {
    std::vector<double> control_values;  // one per interval, each in [beta*, beta]
    double cost = 0.0;                   // J without penalty
    double max_violation = 0.0;          // max(0, max i - i_M, s(t_f) - gamma/beta)
    double objective = 0.0;              // penalised objective at the final weight
    int start_index = -1;                // which multistart produced it
};

struct TranscriptionOptions {
    int rounds = 4;             // outer penalty rounds, weight x10 each
    double escalation = 10.0;
    int substeps = 4;           // RK4 steps per control interval
    int max_sweeps = 80;        // coordinate sweeps per round
    bool parallel = true;       // OpenMP over the 8 multistarts
};

/// Terminal target of the transcription: s(t_f) <= gamma/beta - kTerminalMargin.
inline constexpr double kTerminalMargin = 1e-4;

/// Projected coordinate descent on J + w * penalty with 8 multistarts (b^opt
/// averaged per interval, beta, beta*, midpoint, 4 seeded jitters of b^opt).
/// Deterministic for a given seed, independent of thread count.
BaselineSolution solve_transcription(const TranscriptionProblem& problem, std::uint64_t seed,
                                     const TranscriptionOptions& opt = {});

/// Piecewise-constant schedule of a solution (default beta after t_f).
ControlSchedule transcription_schedule(const TranscriptionProblem& problem, const std::vector<double>& values);

/// Perturbs b^opt by 1-3 seeded cos^2 bumps with amplitude up to
/// magnitude * (beta - beta*), clamps to [beta*, beta], and returns the result
/// only when the perturbed path keeps i <= i_M + 1e-10 and ends with
/// s(t_f) < gamma/beta. magnitude = 0 returns b^opt itself.
std::optional<ControlSchedule> sample_admissible_perturbation(const SynthesisResult& result, double magnitude,
                                                              std::uint64_t seed);

}  // namespace opticon
