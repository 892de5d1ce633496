#include "opticon/scenario.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "opticon/errors.hpp"
#include "opticon/io.hpp"
#include "opticon/zones.hpp"

namespace opticon {

namespace {

namespace fs = std::filesystem;
using io::json;

constexpr std::array<const char*, 11> kKeys = {"beta_star", "beta", "gamma", "i_M", "lambda1", "lambda2",
                                               "s0",        "i0",   "t_f",   "tol", "seed"};

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

double to_number(const std::string& key, const std::string& v) {
    double x = 0.0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(x))
        throw ParseError("key '" + key + "': not a number: '" + v + "'");
    return x;
}

std::uint64_t to_seed(const std::string& v) {
    std::uint64_t x = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || ptr != v.data() + v.size())
        throw ParseError("key 'seed': not a nonnegative integer: '" + v + "'");
    return x;
}

json scenario_json(const Scenario& sc) {
    return {{"beta_star", sc.params.beta_star()},
            {"beta", sc.params.beta()},
            {"gamma", sc.params.gamma()},
            {"i_M", sc.params.i_M()},
            {"lambda1", sc.weights.lambda1},
            {"lambda2", sc.weights.lambda2},
            {"s0", sc.state0.s},
            {"i0", sc.state0.i},
            {"t_f", sc.t_f},
            {"tol", sc.tol},
            {"seed", sc.seed}};
}

bool same_problem(const SynthesisResult& r, const Scenario& sc) {
    return r.params.beta_star() == sc.params.beta_star() && r.params.beta() == sc.params.beta() &&
           r.params.gamma() == sc.params.gamma() && r.params.i_M() == sc.params.i_M() &&
           r.weights.lambda1 == sc.weights.lambda1 && r.weights.lambda2 == sc.weights.lambda2 &&
           r.state0.s == sc.state0.s && r.state0.i == sc.state0.i && r.t_f == sc.t_f;
}

json report_json(const Scenario& sc, const VerifyOutcome& v, double tol) {
    const SynthesisResult& r = v.synthesis;
    json j{{"scenario", scenario_json(sc)},
           {"zone_label", to_string(r.start_label)},
           {"structure", r.structure},
           {"cost", r.cost},
           {"switching_times", io::to_json(r.switching)},
           {"costates", io::to_json(v.costates)},
           {"verification", io::to_json(v.report)},
           {"verification_tol", tol}};
    if (r.switching.tau0 && r.switching.tau1 && *r.switching.tau1 > *r.switching.tau0) {
        json lb = io::to_json(lockdown_length_bounds(r.state0, r.params));
        lb["length"] = *r.switching.tau1 - *r.switching.tau0;
        j["lockdown_length"] = std::move(lb);
    }
    json notes = json::array();
    for (const auto& n : r.notes) notes.push_back(n);
    j["notes"] = std::move(notes);
    return j;
}

}  // namespace

Scenario parse_scenario(const std::string& text, fs::path outputs) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError("line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (std::find(kKeys.begin(), kKeys.end(), key) == kKeys.end())
            throw ParseError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        if (!kv.emplace(key, value).second)
            throw ParseError("line " + std::to_string(lineno) + ": repeated key '" + key + "'");
    }
    for (const char* k : kKeys)
        if (!kv.count(k)) throw ParseError(std::string("missing key '") + k + "'");

    auto num = [&](const char* k) { return to_number(k, kv.at(k)); };
    const double t_f = num("t_f"), tol = num("tol");
    if (!(t_f > 0.0)) throw DomainError("t_f must be > 0");
    if (!(tol > 0.0)) throw DomainError("tol must be > 0");
    return Scenario{EpidemicParams(num("beta_star"), num("beta"), num("gamma"), num("i_M")),
                    CostWeights(num("lambda1"), num("lambda2")),
                    SirState(num("s0"), num("i0")),
                    t_f,
                    tol,
                    to_seed(kv.at("seed")),
                    std::move(outputs)};
}

Scenario load_scenario(const fs::path& config, fs::path outputs) {
    std::ifstream in(config);
    if (!in) throw ParseError("cannot read config " + config.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str(), std::move(outputs));
}

void stage_zones(const Scenario& sc, std::optional<int> grid_resolution) {
    io::write_zones_csv(sc.outputs / "zones.csv", sc.params);
    if (grid_resolution) {
        const int n = *grid_resolution;
        const BitGrid gB = grid_viability_kernel(sc.params, n, 9);
        const BitGrid gA = grid_viability_kernel(sc.params, n, 1);
        gB.write_pgm((sc.outputs / "grid_B.pgm").string());
        gB.write_csv((sc.outputs / "grid_B.csv").string());
        gA.write_pgm((sc.outputs / "grid_A.pgm").string());
        gA.write_csv((sc.outputs / "grid_A.csv").string());
    }
}

SynthesisResult stage_synth(const Scenario& sc) {
    SynthesisResult r = optimal_open_loop(sc.state0, sc.t_f, sc.params, sc.weights, sc.tol);
    io::write_json(sc.outputs / "synthesis.json", io::to_json(r));
    io::write_trajectory_csv(sc.outputs / "trajectory.csv", r.trajectory);
    return r;
}

VerifyOutcome stage_verify(const Scenario& sc, double tol) {
    const fs::path doc = sc.outputs / "synthesis.json";
    if (!fs::exists(doc) || !fs::exists(sc.outputs / "trajectory.csv"))
        throw MissingArtifact("missing trajectory: run `synth` first");
    SynthesisResult r = io::synthesis_from_json(io::read_json(doc), sc.tol);
    if (!same_problem(r, sc)) throw ParseError("synthesis.json was produced for a different scenario");

    CostateTrajectory c = synthesize_costates(r, sc.weights, sc.params);
    VerificationReport rep = verify_extremal(r, c, sc.weights, sc.params, tol);
    VerifyOutcome out{std::move(r), std::move(c), std::move(rep)};

    io::write_costates_csv(sc.outputs / "costates.csv", out.costates, out.synthesis.trajectory);
    io::write_json(sc.outputs / "costates.json", io::to_json(out.costates));
    io::write_plot_svg(sc.outputs / "plot.svg", out.synthesis.trajectory, out.costates);
    io::write_json(sc.outputs / "report.json", report_json(sc, out, tol));
    return out;
}

BaselineOutcome stage_baseline(const Scenario& sc, int n_intervals, std::uint64_t seed) {
    const TranscriptionProblem pb{n_intervals, sc.t_f, sc.state0, sc.params, sc.weights};
    BaselineSolution sol = solve_transcription(pb, seed);
    const double j_opt = optimal_open_loop(sc.state0, sc.t_f, sc.params, sc.weights, sc.tol).cost;

    const ControlSchedule sch = transcription_schedule(pb, sol.control_values);
    const Trajectory tr = integrate(sc.state0, sch, 0.0, sc.t_f, sc.tol, sc.params);
    io::write_trajectory_csv(sc.outputs / "baseline.csv", tr);

    const double gap = j_opt != 0.0 ? (sol.cost - j_opt) / std::abs(j_opt) : sol.cost - j_opt;
    BaselineOutcome out{std::move(sol), n_intervals, seed, j_opt, gap};
    json j = io::to_json(out.solution);
    j["seed"] = seed;
    j["optimal_cost"] = j_opt;
    j["relative_gap"] = gap;
    io::write_json(sc.outputs / "baseline.json", j);
    return out;
}

AllOutcome stage_all(const Scenario& sc, int n_intervals, std::uint64_t seed, double tol) {
    stage_zones(sc);
    stage_synth(sc);
    VerifyOutcome v = stage_verify(sc, tol);
    BaselineOutcome b = stage_baseline(sc, n_intervals, seed);

    json rep = report_json(sc, v, tol);
    json bj = io::to_json(b.solution);
    bj["seed"] = seed;
    bj["relative_gap"] = b.relative_gap;
    rep["baseline"] = std::move(bj);
    io::write_json(sc.outputs / "report.json", rep);
    return {std::move(v), std::move(b)};
}

}  // namespace opticon
