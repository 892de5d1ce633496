#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

struct Run {
    int status;
    std::string output;  // stdout and stderr
};

Run run(const std::string& args, const std::string& env = "") {
    const std::string cmd = env + " " + SIR_OPTICON_EXE + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    char buf[512];
    while (fgets(buf, sizeof buf, pipe)) out += buf;
    const int st = pclose(pipe);
    return {WIFEXITED(st) ? WEXITSTATUS(st) : -1, out};
}

std::string data(const std::string& name) { return std::string(OPTICON_TEST_DATA) + "/" + name; }

fs::path fresh(const std::string& name) {
    const fs::path d = fs::temp_directory_path() / ("opticon_cli_" + name);
    fs::remove_all(d);
    return d;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream b;
    b << in.rdbuf();
    return b.str();
}

nlohmann::json report(const fs::path& dir) { return nlohmann::json::parse(slurp(dir / "report.json")); }

}  // namespace

TEST_CASE("all on scenario 1: bang-boundary-bang, verified, reproducible") {
    const fs::path a = fresh("s1a"), b = fresh("s1b");
    const Run r = run("all --config " + data("scenario1.cfg") + " --out " + a.string());
    CHECK(r.status == 0);
    const auto rep = report(a);
    CHECK(rep.at("structure") == "bang-boundary-bang");
    CHECK(rep.at("verification").at("passed") == true);
    CHECK(rep.at("zone_label") == "InB0_NotA");
    CHECK(rep.contains("baseline"));

    const Run q = run("all --config " + data("scenario1.cfg") + " --out " + b.string(), "SIR_OPTICON_LOG=quiet");
    CHECK(q.status == 0);
    CHECK(q.output.empty());
    for (const char* f : {"zones.csv", "trajectory.csv", "costates.csv", "baseline.csv", "report.json",
                          "synthesis.json", "costates.json", "baseline.json", "plot.svg"}) {
        CAPTURE(f);
        REQUIRE(fs::exists(a / f));
        CHECK(slurp(a / f) == slurp(b / f));
    }
}

TEST_CASE("all on scenario 2: bang-bang-boundary-bang with two p_i jumps") {
    const fs::path d = fresh("s2");
    const Run r = run("all --config " + data("scenario2.cfg") + " --out " + d.string(), "SIR_OPTICON_LOG=quiet");
    CHECK(r.status == 0);
    const auto rep = report(d);
    CHECK(rep.at("structure") == "bang-bang-boundary-bang");
    CHECK(rep.at("costates").at("mu_atoms").size() == 2);
    const auto& ll = rep.at("lockdown_length");
    CHECK(ll.at("lower").get<double>() <= ll.at("length").get<double>());
    CHECK(ll.at("length").get<double>() <= ll.at("upper").get<double>());
}

TEST_CASE("infeasible start exits nonzero with a message") {
    const fs::path d = fresh("infeasible");
    const Run r = run("synth --config " + data("infeasible.cfg") + " --out " + d.string());
    CHECK(r.status != 0);
    CHECK(r.output.find("infeasible initial state") != std::string::npos);
    CHECK(run("all --config " + data("infeasible.cfg") + " --out " + d.string()).status != 0);
}

TEST_CASE("verify without synth reports the missing trajectory") {
    const fs::path d = fresh("nosynth");
    const Run r = run("verify --config " + data("scenario1.cfg") + " --out " + d.string());
    CHECK(r.status != 0);
    CHECK(r.output.find("missing trajectory") != std::string::npos);
}

TEST_CASE("zones writes phi_B(0.85) near 0.0139") {
    const fs::path d = fresh("zones");
    REQUIRE(run("zones --config " + data("scenario1.cfg") + " --out " + d.string()).status == 0);
    std::ifstream in(d / "zones.csv");
    std::string line;
    bool found = false;
    while (std::getline(in, line)) {
        if (line.rfind("0.84999999999999998,", 0) != 0) continue;
        std::istringstream ls(line);
        std::string cell;
        std::getline(ls, cell, ',');
        std::getline(ls, cell, ',');
        std::getline(ls, cell, ',');
        CHECK(std::abs(std::stod(cell) - 0.0139) < 1e-4);
        found = true;
    }
    CHECK(found);
}

TEST_CASE("baseline with explicit n and seed is deterministic") {
    const fs::path a = fresh("ba"), b = fresh("bb");
    const std::string args = "baseline --config " + data("scenario2.cfg") + " --n 60 --seed 7 --out ";
    REQUIRE(run(args + a.string(), "SIR_OPTICON_LOG=quiet").status == 0);
    REQUIRE(run(args + b.string(), "SIR_OPTICON_LOG=quiet").status == 0);
    CHECK(slurp(a / "baseline.csv") == slurp(b / "baseline.csv"));
    CHECK(slurp(a / "baseline.csv").rfind("t,s,i,b\n", 0) == 0);
}

TEST_CASE("malformed configs and arguments exit with status 2") {
    const fs::path d = fresh("bad");
    fs::create_directories(d);
    {
        std::ofstream cfg(d / "bad.cfg");
        cfg << slurp(data("scenario1.cfg")) << "rho = 1\n";
    }
    const Run r = run("synth --config " + (d / "bad.cfg").string() + " --out " + d.string());
    CHECK(r.status == 2);
    CHECK(r.output.find("unknown key 'rho'") != std::string::npos);
    CHECK(run("synth --out " + d.string()).status == 2);
    CHECK(run("frobnicate --config " + data("scenario1.cfg")).status == 2);
}
