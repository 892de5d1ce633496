#pragma once

// Artifact files: CSV with 17 significant digits, JSON via nlohmann, and a
// hand-drawn SVG of the state, control and costate time series.

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "opticon/dynamics.hpp"
#include "opticon/oracle.hpp"
#include "opticon/pontryagin.hpp"
#include "opticon/synthesis.hpp"

namespace opticon::io {

namespace fs = std::filesystem;
using nlohmann::json;

/// %.17g; infinities as "inf"/"-inf".
std::string format_double(double x);

/// Rows s = k * step for s in [0, 1] with the clamped and analytic boundaries.
void write_zones_csv(const fs::path& path, const EpidemicParams& params, double step = 1e-3);
void write_trajectory_csv(const fs::path& path, const Trajectory& traj);
/// At each mu atom a left-limit row precedes the right-continuous sample, so
/// the p_i jumps are visible as repeated times.
void write_costates_csv(const fs::path& path, const CostateTrajectory& costates, const Trajectory& traj);

json to_json(const ControlSchedule& schedule);
ControlSchedule schedule_from_json(const json& j, const EpidemicParams& params);
json to_json(const SwitchingTimes& times);
json to_json(const VerificationReport& report);
json to_json(const CostateTrajectory& costates);  // atoms and scalars only
json to_json(const BaselineSolution& baseline);
json to_json(const LengthBounds& bounds);

json to_json(const SynthesisResult& result);
/// Rebuilds a stored synthesis and re-integrates its path with the same
/// integrator settings, so the trajectory matches the original exactly.
/// Throws ParseError for malformed documents.
SynthesisResult synthesis_from_json(const json& j, double tol);

void write_json(const fs::path& path, const json& j);
/// Throws MissingArtifact when the file is absent, ParseError when unreadable.
json read_json(const fs::path& path);

/// Five stacked panels: s, i, b, p_s, p_i against t.
void write_plot_svg(const fs::path& path, const Trajectory& traj, const CostateTrajectory& costates);

}  // namespace opticon::io
