#pragma once

// Scenario files and the pipeline stages behind the sir-opticon tool.
//
// Config format: one `key = value` per line, '#' starts a comment, and the
// keys are exactly beta_star, beta, gamma, i_M, lambda1, lambda2, s0, i0,
// t_f, tol, seed.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "opticon/oracle.hpp"
#include "opticon/params.hpp"
#include "opticon/pontryagin.hpp"
#include "opticon/synthesis.hpp"

namespace opticon {

struct Scenario {
    EpidemicParams params;
    CostWeights weights;
    SirState state0;
    double t_f;
    double tol;
    std::uint64_t seed;
    std::filesystem::path outputs;
};

/// Throws ParseError on unknown, repeated, missing or non-numeric keys, and
/// DomainError when the values break a model invariant.
Scenario parse_scenario(const std::string& text, std::filesystem::path outputs = ".");
Scenario load_scenario(const std::filesystem::path& config, std::filesystem::path outputs = ".");

/// Tolerance of the necessary-condition checks run by `verify`.
inline constexpr double kVerifyTol = 1e-6;
inline constexpr int kBaselineIntervals = 250;

struct VerifyOutcome {
    SynthesisResult synthesis;
    CostateTrajectory costates;
    VerificationReport report;
};

struct BaselineOutcome {
    BaselineSolution solution;
    int n_intervals;
    std::uint64_t seed;
    double optimal_cost;
    double relative_gap;  // (J_baseline - J_opt) / |J_opt|, or absolute when J_opt = 0
};

/// zones.csv; with grid_resolution also the grid kernels for B and A as
/// grid_B.pgm/.csv and grid_A.pgm/.csv.
void stage_zones(const Scenario& sc, std::optional<int> grid_resolution = std::nullopt);

/// synthesis.json and trajectory.csv.
SynthesisResult stage_synth(const Scenario& sc);

/// Reads synthesis.json (MissingArtifact "missing trajectory" when absent),
/// writes costates.csv, costates.json, plot.svg and report.json.
VerifyOutcome stage_verify(const Scenario& sc, double tol = kVerifyTol);

/// baseline.csv (trajectory under the transcription control) and baseline.json.
BaselineOutcome stage_baseline(const Scenario& sc, int n_intervals, std::uint64_t seed);

struct AllOutcome {
    VerifyOutcome verify;
    BaselineOutcome baseline;
};

/// zones, synth, verify and baseline in order; report.json gains a baseline
/// section.
AllOutcome stage_all(const Scenario& sc, int n_intervals, std::uint64_t seed, double tol = kVerifyTol);

}  // namespace opticon
