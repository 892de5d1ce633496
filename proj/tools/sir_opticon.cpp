// sir-opticon: run the zone / synthesis / verification / baseline pipeline on
// a scenario file and write the artifacts into --out.
//
// Exit status: 0 success, 1 verification failed, 2 any error.

#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "opticon/errors.hpp"
#include "opticon/scenario.hpp"
#include "opticon/zones.hpp"

namespace {

using namespace opticon;

void setup_logging() {
    auto logger = spdlog::stderr_color_mt("sir-opticon");
    logger->set_pattern("[%l] %v");
    spdlog::set_default_logger(logger);
    const char* env = std::getenv("SIR_OPTICON_LOG");
    const std::string level = env ? env : "info";
    if (level == "quiet")
        spdlog::set_level(spdlog::level::off);
    else if (level == "debug")
        spdlog::set_level(spdlog::level::debug);
    else {
        spdlog::set_level(spdlog::level::info);
        if (level != "info") spdlog::warn("SIR_OPTICON_LOG='{}' not recognised, using info", level);
    }
}

void log_synthesis(const SynthesisResult& r) {
    spdlog::info("zone {}, structure {}, cost {:.12g}", to_string(r.start_label), r.structure, r.cost);
    const auto& sw = r.switching;
    if (sw.tau0) spdlog::debug("tau0 = {:.12g}", *sw.tau0);
    if (sw.tau1) spdlog::debug("tau1 = {:.12g}", *sw.tau1);
    if (sw.tau2) spdlog::debug("tau2 = {:.12g}", *sw.tau2);
    spdlog::debug("reaching time = {:.12g}", sw.reaching_time);
    for (const auto& n : r.notes) spdlog::info("note: {}", n);
}

int report_verification(const VerificationReport& rep) {
    for (const auto& c : rep.checks)
        spdlog::debug("{:<28} {} residual {:.3e} (tol {:.1e})", c.name, c.passed ? "ok  " : "FAIL", c.residual,
                      c.tolerance);
    if (rep.passed()) {
        spdlog::info("verification passed ({} checks)", rep.checks.size());
        return 0;
    }
    for (const auto& c : rep.checks)
        if (!c.passed) spdlog::error("check {} failed: residual {:.3e} > {:.1e}", c.name, c.residual, c.tolerance);
    return 1;
}

void log_baseline(const BaselineOutcome& b) {
    spdlog::info("baseline n={} seed={}: cost {:.12g} vs optimal {:.12g} (relative gap {:+.3e}, violation {:.2e})",
                 b.n_intervals, b.seed, b.solution.cost, b.optimal_cost, b.relative_gap, b.solution.max_violation);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Optimal lockdown control of an SIR epidemic under an ICU constraint"};
    app.require_subcommand(1, 1);

    std::string config;
    std::string out_dir = ".";
    int n_intervals = kBaselineIntervals;
    std::optional<std::uint64_t> seed;
    std::optional<int> grid;
    double verify_tol = kVerifyTol;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config, "scenario file (key = value)")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", out_dir, "output directory");
    };
    auto* zones = app.add_subcommand("zones", "write zones.csv (Phi_A, Phi_B on a 1e-3 grid)");
    add_common(zones);
    zones->add_option("--grid", grid, "also export the grid viability kernels at this resolution")
        ->check(CLI::Range(8, 4096));
    auto* synth = app.add_subcommand("synth", "synthesize the optimal control (synthesis.json, trajectory.csv)");
    add_common(synth);
    auto* verify = app.add_subcommand("verify", "construct costates and check the necessary conditions");
    add_common(verify);
    verify->add_option("--verify-tol", verify_tol, "tolerance of the checks")->check(CLI::PositiveNumber);
    auto* baseline = app.add_subcommand("baseline", "direct-transcription baseline (baseline.csv)");
    add_common(baseline);
    auto* all = app.add_subcommand("all", "zones, synth, verify and baseline");
    add_common(all);
    all->add_option("--verify-tol", verify_tol, "tolerance of the checks")->check(CLI::PositiveNumber);
    for (auto* sub : {baseline, all}) {
        sub->add_option("--n", n_intervals, "transcription intervals")->check(CLI::Range(10, 100000));
        sub->add_option("--seed", seed, "multistart seed (default: the scenario's seed)");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }
    setup_logging();

    try {
        const Scenario sc = load_scenario(config, out_dir);
        std::filesystem::create_directories(sc.outputs);
        const std::uint64_t s = seed.value_or(sc.seed);
        spdlog::debug("config {}, outputs in {}", config, sc.outputs.string());

        if (zones->parsed()) {
            stage_zones(sc, grid);
            spdlog::info("wrote zones.csv{}", grid ? " and grid kernels" : "");
            return 0;
        }
        if (synth->parsed()) {
            log_synthesis(stage_synth(sc));
            return 0;
        }
        if (verify->parsed()) {
            const VerifyOutcome v = stage_verify(sc, verify_tol);
            return report_verification(v.report);
        }
        if (baseline->parsed()) {
            log_baseline(stage_baseline(sc, n_intervals, s));
            return 0;
        }
        const AllOutcome a = stage_all(sc, n_intervals, s, verify_tol);
        log_synthesis(a.verify.synthesis);
        log_baseline(a.baseline);
        return report_verification(a.verify.report);
    } catch (const InfeasibleStart&) {
        std::fputs("infeasible initial state\n", stderr);
        return 2;
    } catch (const MissingArtifact& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
