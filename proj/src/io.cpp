#include "opticon/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "opticon/errors.hpp"
#include "opticon/zones.hpp"

namespace opticon::io {

namespace {

std::ofstream open_out(const fs::path& path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    return out;
}

void write_row(std::ofstream& out, std::initializer_list<double> xs) {
    bool first = true;
    for (double x : xs) {
        if (!first) out << ',';
        out << format_double(x);
        first = false;
    }
    out << '\n';
}

json opt_time(const std::optional<double>& t) { return t ? json(*t) : json(nullptr); }

std::optional<double> opt_from(const json& j) {
    if (j.is_null()) return std::nullopt;
    return j.get<double>();
}

}  // namespace

std::string format_double(double x) {
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    if (std::isnan(x)) return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_zones_csv(const fs::path& path, const EpidemicParams& params, double step) {
    if (!(step > 0.0)) throw DomainError("zone sampling step must be > 0");
    auto out = open_out(path);
    out << "s,phi_A,phi_B,phi_A_analytic,phi_B_analytic\n";
    const auto n = static_cast<long>(std::llround(1.0 / step));
    for (long k = 0; k <= n; ++k) {
        const double s = static_cast<double>(k) / static_cast<double>(n);
        const double aA = s > 0.0 ? phi_A_analytic(s, params) : -std::numeric_limits<double>::infinity();
        const double aB = s > 0.0 ? phi_B_analytic(s, params) : -std::numeric_limits<double>::infinity();
        write_row(out, {s, phi_A(s, params), phi_B(s, params), aA, aB});
    }
}

void write_trajectory_csv(const fs::path& path, const Trajectory& traj) {
    auto out = open_out(path);
    out << "t,s,i,b\n";
    for (std::size_t k = 0; k < traj.size(); ++k)
        write_row(out, {traj.times()[k], traj.states()[k].s, traj.states()[k].i, traj.controls()[k]});
}

void write_costates_csv(const fs::path& path, const CostateTrajectory& c, const Trajectory& traj) {
    auto out = open_out(path);
    out << "t,p_s,p_i,eta,psi,mu_density\n";
    for (std::size_t k = 0; k < c.times.size(); ++k) {
        const double t = c.times[k];
        const double m = c.atom_mass_at(t);
        if (m > 0.0) {
            const SirState x = traj.state_at(t);
            const double eta = c.eta[k] + m;
            write_row(out, {t, c.p_s[k], c.p_i[k] + m, eta, eta * x.s * x.i, c.mu_density_left[k]});
        }
        write_row(out, {t, c.p_s[k], c.p_i[k], c.eta[k], c.psi[k], c.mu_density[k]});
    }
}

json to_json(const ControlSchedule& schedule) {
    json segs = json::array();
    for (const auto& seg : schedule.segments()) {
        json s{{"t_start", seg.t_start}, {"t_end", seg.t_end}};
        if (const auto* c = std::get_if<ConstantLaw>(&seg.law)) {
            s["law"] = "constant";
            s["b"] = c->b;
        } else {
            s["law"] = "singular_arc";
            s["tau2"] = std::get<SingularArcLaw>(seg.law).tau2;
        }
        segs.push_back(std::move(s));
    }
    json j{{"default_rate", schedule.default_rate()}, {"segments", std::move(segs)}};
    if (!schedule.bumps().empty()) {
        json bumps = json::array();
        for (const auto& b : schedule.bumps())
            bumps.push_back({{"center", b.center}, {"half_width", b.half_width}, {"amplitude", b.amplitude}});
        j["bumps"] = std::move(bumps);
    }
    return j;
}

ControlSchedule schedule_from_json(const json& j, const EpidemicParams& params) {
    std::vector<ControlSegment> segs;
    for (const auto& s : j.at("segments")) {
        const std::string law = s.at("law").get<std::string>();
        const double a = s.at("t_start").get<double>(), b = s.at("t_end").get<double>();
        if (law == "constant")
            segs.push_back({a, b, ConstantLaw{s.at("b").get<double>()}});
        else if (law == "singular_arc")
            segs.push_back({a, b, SingularArcLaw{s.at("tau2").get<double>()}});
        else
            throw ParseError("unknown control law '" + law + "'");
    }
    ControlSchedule out(params, std::move(segs), j.at("default_rate").get<double>());
    if (j.contains("bumps")) {
        std::vector<Bump> bumps;
        for (const auto& b : j.at("bumps"))
            bumps.push_back({b.at("center").get<double>(), b.at("half_width").get<double>(),
                             b.at("amplitude").get<double>()});
        out = out.with_bumps(std::move(bumps));
    }
    return out;
}

json to_json(const SwitchingTimes& t) {
    return {{"tau0", opt_time(t.tau0)},
            {"tau1", opt_time(t.tau1)},
            {"tau2", opt_time(t.tau2)},
            {"reaching_time", t.reaching_time}};
}

json to_json(const VerificationReport& report) {
    json checks = json::array();
    for (const auto& c : report.checks)
        checks.push_back(
            {{"name", c.name}, {"passed", c.passed}, {"residual", c.residual}, {"tolerance", c.tolerance}});
    return {{"passed", report.passed()}, {"checks", std::move(checks)}};
}

json to_json(const CostateTrajectory& c) {
    json atoms = json::array();
    for (const auto& a : c.mu_atoms) atoms.push_back({{"time", a.time}, {"mass", a.mass}});
    return {{"p0", c.p0}, {"p1", c.p1}, {"k", c.k}, {"mu_atoms", std::move(atoms)},
            {"total_mu_mass", c.total_mu_mass()}};
}

json to_json(const BaselineSolution& b) {
    return {{"cost", b.cost},
            {"max_violation", b.max_violation},
            {"objective", b.objective},
            {"start_index", b.start_index},
            {"n_intervals", b.control_values.size()}};
}

json to_json(const LengthBounds& b) {
    return {{"lower", b.lower}, {"upper", b.upper}, {"theta0", b.theta0}, {"theta1", b.theta1}, {"theta2", b.theta2}};
}

json to_json(const SynthesisResult& r) {
    json notes = json::array();
    for (const auto& n : r.notes) notes.push_back(n);
    return {{"params",
             {{"beta_star", r.params.beta_star()},
              {"beta", r.params.beta()},
              {"gamma", r.params.gamma()},
              {"i_M", r.params.i_M()}}},
            {"weights", {{"lambda1", r.weights.lambda1}, {"lambda2", r.weights.lambda2}}},
            {"state0", {{"s", r.state0.s}, {"i", r.state0.i}}},
            {"t_f", r.t_f},
            {"zone_label", to_string(r.start_label)},
            {"structure", r.structure},
            {"cost", r.cost},
            {"switching_times", to_json(r.switching)},
            {"schedule", to_json(r.schedule)},
            {"notes", std::move(notes)}};
}

SynthesisResult synthesis_from_json(const json& j, double tol) {
    try {
        const auto& p = j.at("params");
        const EpidemicParams params(p.at("beta_star").get<double>(), p.at("beta").get<double>(),
                                    p.at("gamma").get<double>(), p.at("i_M").get<double>());
        const CostWeights weights(j.at("weights").at("lambda1").get<double>(),
                                  j.at("weights").at("lambda2").get<double>());
        const SirState x0(j.at("state0").at("s").get<double>(), j.at("state0").at("i").get<double>());
        const double t_f = j.at("t_f").get<double>();
        ControlSchedule schedule = schedule_from_json(j.at("schedule"), params);

        const auto& sw = j.at("switching_times");
        SwitchingTimes times{opt_from(sw.at("tau0")), opt_from(sw.at("tau1")), opt_from(sw.at("tau2")),
                             sw.at("reaching_time").get<double>()};

        Trajectory traj = open_loop_trajectory(x0, schedule, t_f, params, tol);
        if (times.tau0) traj.add_event("tau0", *times.tau0);
        if (times.tau1) traj.add_event("tau1", *times.tau1);
        if (times.tau2) traj.add_event("tau2", *times.tau2);
        traj.add_event("reaching", times.reaching_time);

        std::vector<std::string> notes;
        for (const auto& n : j.at("notes")) notes.push_back(n.get<std::string>());

        return SynthesisResult{params,
                               weights,
                               x0,
                               t_f,
                               classify(x0, params),
                               std::move(schedule),
                               times,
                               std::move(traj),
                               j.at("cost").get<double>(),
                               j.at("structure").get<std::string>(),
                               std::move(notes)};
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed synthesis document: ") + e.what());
    }
}

void write_json(const fs::path& path, const json& j) {
    auto out = open_out(path);
    out << j.dump(2) << '\n';
}

json read_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw MissingArtifact("missing " + path.filename().string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ParseError(path.filename().string() + ": " + e.what());
    }
}

namespace {

struct Series {
    std::string title;
    std::vector<double> t;
    std::vector<double> y;
};

void draw_panel(std::ofstream& out, const Series& s, double t_lo, double t_hi, double top) {
    constexpr double left = 70, width = 760, height = 120;
    double lo = *std::min_element(s.y.begin(), s.y.end());
    double hi = *std::max_element(s.y.begin(), s.y.end());
    if (hi - lo < 1e-12 * std::max(1.0, std::abs(hi))) {
        lo -= 0.5;
        hi += 0.5;
    }
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;
    auto X = [&](double t) { return left + width * (t - t_lo) / (t_hi - t_lo); };
    auto Y = [&](double y) { return top + height * (hi - y) / (hi - lo); };

    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "<rect x=\"%.1f\" y=\"%.1f\" width=\"%.1f\" height=\"%.1f\" fill=\"none\" stroke=\"#888\"/>\n", left,
                  top, width, height);
    out << buf;
    std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" font-size=\"13\">%s</text>\n", 8.0,
                  top + height / 2, s.title.c_str());
    out << buf;
    std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" font-size=\"10\" text-anchor=\"end\">%.4g</text>\n",
                  left - 4, top + 10, hi - pad);
    out << buf;
    std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" font-size=\"10\" text-anchor=\"end\">%.4g</text>\n",
                  left - 4, top + height, lo + pad);
    out << buf;

    out << "<polyline fill=\"none\" stroke=\"#1f4e9c\" stroke-width=\"1.2\" points=\"";
    for (std::size_t k = 0; k < s.t.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%s%.2f,%.2f", k ? " " : "", X(s.t[k]), Y(s.y[k]));
        out << buf;
    }
    out << "\"/>\n";
}

}  // namespace

void write_plot_svg(const fs::path& path, const Trajectory& traj, const CostateTrajectory& c) {
    if (traj.empty()) throw DomainError("cannot plot an empty trajectory");
    std::vector<Series> panels(5);
    panels[0].title = "s";
    panels[1].title = "i";
    panels[2].title = "b";
    panels[3].title = "p_s";
    panels[4].title = "p_i";
    for (std::size_t k = 0; k < traj.size(); ++k) {
        const double t = traj.times()[k];
        panels[0].t.push_back(t);
        panels[0].y.push_back(traj.states()[k].s);
        panels[1].t.push_back(t);
        panels[1].y.push_back(traj.states()[k].i);
        // Step plot for the control.
        if (k > 0) {
            panels[2].t.push_back(t);
            panels[2].y.push_back(traj.controls()[k - 1]);
        }
        panels[2].t.push_back(t);
        panels[2].y.push_back(traj.controls()[k]);
    }
    for (std::size_t k = 0; k < c.times.size(); ++k) {
        const double t = c.times[k];
        const double m = c.atom_mass_at(t);
        if (m > 0.0) {
            panels[4].t.push_back(t);
            panels[4].y.push_back(c.p_i[k] + m);
        }
        panels[3].t.push_back(t);
        panels[3].y.push_back(c.p_s[k]);
        panels[4].t.push_back(t);
        panels[4].y.push_back(c.p_i[k]);
    }

    auto out = open_out(path);
    constexpr double panel_h = 140, top0 = 20;
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"850\" height=\"%.0f\" "
                  "font-family=\"sans-serif\">\n",
                  top0 + panel_h * 5 + 30);
    out << buf;
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    const double t_lo = traj.t_begin(), t_hi = traj.t_end();
    for (std::size_t p = 0; p < panels.size(); ++p) {
        if (panels[p].t.empty()) continue;
        draw_panel(out, panels[p], t_lo, t_hi, top0 + panel_h * static_cast<double>(p));
    }
    std::snprintf(buf, sizeof buf,
                  "<text x=\"450\" y=\"%.0f\" font-size=\"12\" text-anchor=\"middle\">t (days), %.4g to %.4g</text>\n",
                  top0 + panel_h * 5 + 10, t_lo, t_hi);
    out << buf;
    out << "</svg>\n";
}

}  // namespace opticon::io
