#include "opticon/synthesis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "opticon/errors.hpp"

namespace opticon {

namespace {

// Switching times drive the 1e-8 arc checks downstream, so the phase
// integrations run well below the user tolerance.
constexpr double kInnerTol = 1e-11;
constexpr double kMaxStep = 0.5;
constexpr double kSearchHorizon = 1e5;
constexpr double kArcBand = 1e-9;
constexpr double kOmegaFloor = 1e-10;

struct Plan {
    ZoneLabel label;
    bool in_A = false;
    SwitchingTimes times;
    double s_tau1 = 0.0;
    double i_reach = 0.0;  // infected level when s reaches gamma/beta
};

bool on_arc_line(const SirState& x, const EpidemicParams& p, double band) {
    return std::abs(x.i - p.i_M()) <= band && x.s > p.herd() && x.s <= p.lock() + band;
}

Plan make_plan(const SirState& state0, const EpidemicParams& p) {
    if (!(state0.i > 0.0)) throw DomainError("synthesis requires i0 > 0");
    Plan plan;
    plan.label = classify(state0, p);
    if (plan.label == ZoneLabel::OutsideB) throw InfeasibleStart();

    const double H = p.herd(), L = p.lock(), iM = p.i_M();
    const IntegrationOptions opt{kInnerTol, kMaxStep};
    const StateLaw beta = [&](double, const SirState&) { return p.beta(); };

    if (in_A(plan.label)) {
        plan.in_A = true;
        if (state0.s <= H) {
            plan.times.reaching_time = 0.0;
            plan.i_reach = state0.i;
            return plan;
        }
        Trajectory scratch;
        const EventFunction reach = [&](const SirState& x) { return x.s - H; };
        const RunResult r = append_run(scratch, state0, 0.0, kSearchHorizon, beta, p, opt, &reach);
        if (!r.event_fired) throw IntegrationFailure("reaching time not found within search horizon", r.t_end);
        plan.times.reaching_time = r.t_end;
        plan.i_reach = r.state.i;
        return plan;
    }

    double t0 = 0.0, t1 = 0.0, s1 = state0.s;
    if (on_arc_line(state0, p, kArcBand)) {
        // Already on i = i_M between the thresholds: the arc starts now.
    } else {
        SirState x0 = state0;
        if (!(plan.label == ZoneLabel::BoundaryB && state0.s > L)) {
            Trajectory scratch;
            const EventFunction hit = [&](const SirState& x) { return x.i - phi_B(x.s, p); };
            const RunResult r = append_run(scratch, state0, 0.0, kSearchHorizon, beta, p, opt, &hit);
            if (!r.event_fired) throw IntegrationFailure("boundary of B not met within search horizon", r.t_end);
            t0 = r.t_end;
            x0 = r.state;
        }
        t1 = t0;
        s1 = x0.s;
        if (x0.s > L) {
            // Along the boundary i reaches i_M tangentially; s = gamma/beta* is
            // the well-conditioned event for the same point.
            Trajectory scratch;
            const StateLaw lock = [&](double, const SirState&) { return p.beta_star(); };
            const EventFunction reach = [&](const SirState& x) { return x.s - L; };
            const RunResult r = append_run(scratch, x0, t0, t0 + kSearchHorizon, lock, p, opt, &reach);
            if (!r.event_fired) throw IntegrationFailure("beta* phase did not reach gamma/beta*", r.t_end);
            t1 = r.t_end;
            s1 = r.state.s;
        }
    }
    s1 = std::max(s1, H);
    plan.times.tau0 = t0;
    plan.times.tau1 = t1;
    plan.times.tau2 = t1 + (s1 - H) / (p.gamma() * iM);
    plan.times.reaching_time = *plan.times.tau2;
    plan.s_tau1 = s1;
    plan.i_reach = iM;
    return plan;
}

double omega_from(double i_r, double tau, const EpidemicParams& p) {
    if (tau < 0.0) throw DomainError("omega requires tau >= 0");
    if (tau == 0.0) return 0.0;
    const SirState start = SirState::unchecked(p.herd(), i_r);
    const Trajectory tr = integrate(start, ControlSchedule::constant(p, p.beta()), 0.0, tau, 1e-12, p, 1.0);
    return p.herd() - tr.back().s;
}

std::string structure_of(const ControlSchedule& schedule) {
    std::string out;
    for (const auto& seg : schedule.segments()) {
        if (!out.empty()) out += '-';
        out += std::holds_alternative<SingularArcLaw>(seg.law) ? "boundary" : "bang";
    }
    return out;
}

}  // namespace

SwitchingTimes switching_times(const SirState& state0, double t_f, const EpidemicParams& params) {
    if (!(t_f > 0.0)) throw DomainError("switching_times requires t_f > 0");
    return make_plan(state0, params).times;
}

double reaching_time(const SirState& state0, const EpidemicParams& params) {
    return make_plan(state0, params).times.reaching_time;
}

double omega(const SirState& state0, double tau, const EpidemicParams& params) {
    return omega_from(make_plan(state0, params).i_reach, tau, params);
}

SynthesisResult optimal_open_loop(const SirState& state0, double t_f, const EpidemicParams& params,
                                  const CostWeights& weights, double tol) {
    if (!(tol > 0.0)) throw DomainError("optimal_open_loop requires tol > 0");
    const Plan plan = make_plan(state0, params);
    const double reach = plan.times.reaching_time;
    if (!(t_f > reach) || omega_from(plan.i_reach, t_f - reach, params) <= kOmegaFloor) {
        std::ostringstream msg;
        msg.precision(10);
        msg << "horizon t_f = " << t_f << " does not exceed the reaching time " << reach;
        throw HorizonError(msg.str());
    }

    const double b = params.beta();
    std::vector<ControlSegment> segs;
    std::vector<std::string> notes;
    if (plan.in_A) {
        segs.push_back({0.0, t_f, ConstantLaw{b}});
        if (plan.label == ZoneLabel::BoundaryA && state0.s > params.herd())
            notes.push_back("start on the boundary of A with s > gamma/beta: the optimal control is not unique there; beta chosen");
    } else {
        const double t0 = *plan.times.tau0, t1 = *plan.times.tau1, t2 = *plan.times.tau2;
        if (t0 > 0.0) segs.push_back({0.0, t0, ConstantLaw{b}});
        if (t1 > t0) segs.push_back({t0, t1, ConstantLaw{params.beta_star()}});
        if (t2 > t1) segs.push_back({t1, t2, SingularArcLaw{t2}});
        segs.push_back({t2, t_f, ConstantLaw{b}});
        if (t1 == 0.0 && t0 == 0.0 && on_arc_line(state0, params, kArcBand))
            notes.push_back(std::abs(state0.s - params.lock()) <= kArcBand
                                ? "corner start (gamma/beta*, i_M): boundary arc from t = 0"
                                : "start on i = i_M: boundary arc from t = 0");
    }
    ControlSchedule schedule(params, std::move(segs), b);

    Trajectory traj = open_loop_trajectory(state0, schedule, t_f, params, tol);
    if (plan.times.tau0) traj.add_event("tau0", *plan.times.tau0);
    if (plan.times.tau1) traj.add_event("tau1", *plan.times.tau1);
    if (plan.times.tau2) traj.add_event("tau2", *plan.times.tau2);
    traj.add_event("reaching", reach);

    SynthesisResult out{params,  weights, state0,   t_f,  plan.label, schedule, plan.times,
                        std::move(traj), 0.0, "", std::move(notes)};
    out.cost = cost(out.schedule, t_f, weights);
    out.structure = structure_of(out.schedule);
    return out;
}

Trajectory open_loop_trajectory(const SirState& state0, const ControlSchedule& schedule, double t_f,
                                const EpidemicParams& params, double tol) {
    return integrate(state0, schedule, 0.0, t_f, std::min(tol, kInnerTol), params, kMaxStep);
}

double optimal_feedback(const SirState& state, const EpidemicParams& params, double band) {
    if (state.i > phi_B(state.s, params) + band) throw InfeasibleStart();
    if (on_arc_line(state, params, band)) return std::clamp(params.gamma() / state.s, params.beta_star(), params.beta());
    if (state.s > params.lock() && std::abs(state.i - phi_B_analytic(state.s, params)) <= band) return params.beta_star();
    return params.beta();
}

Trajectory simulate_feedback(const SirState& state0, double t_f, const EpidemicParams& params, double tol) {
    if (!(state0.i > 0.0)) throw DomainError("simulate_feedback requires i0 > 0");
    if (!(t_f > 0.0)) throw DomainError("simulate_feedback requires t_f > 0");
    const ZoneLabel label = classify(state0, params);
    if (label == ZoneLabel::OutsideB) throw InfeasibleStart();

    const double H = params.herd(), L = params.lock();
    const IntegrationOptions opt{tol, kMaxStep};
    const StateLaw beta = [&](double, const SirState&) { return params.beta(); };
    const StateLaw lock = [&](double, const SirState&) { return params.beta_star(); };
    const StateLaw arc = [&](double, const SirState& x) {
        return std::clamp(params.gamma() / x.s, params.beta_star(), params.beta());
    };
    const EventFunction hit = [&](const SirState& x) { return x.i - phi_B(x.s, params); };
    const EventFunction to_lock = [&](const SirState& x) { return x.s - L; };
    const EventFunction to_herd = [&](const SirState& x) { return x.s - H; };

    Trajectory traj;
    if (in_A(label)) {
        append_run(traj, state0, 0.0, t_f, beta, params, opt);
        return traj;
    }

    enum class Mode { Beta, Lock, Arc, Final };
    Mode mode = Mode::Beta;
    if (on_arc_line(state0, params, kArcBand)) mode = Mode::Arc;
    else if (label == ZoneLabel::BoundaryB && state0.s > L) mode = Mode::Lock;
    if (mode != Mode::Beta) traj.add_event("tau0", 0.0);
    if (mode == Mode::Arc) traj.add_event("tau1", 0.0);

    double t = 0.0;
    SirState x = state0;
    while (t < t_f) {
        RunResult r{};
        switch (mode) {
            case Mode::Beta:
                r = append_run(traj, x, t, t_f, beta, params, opt, &hit);
                if (r.event_fired) {
                    traj.add_event("tau0", r.t_end);
                    mode = r.state.s > L ? Mode::Lock : Mode::Arc;
                    if (mode == Mode::Arc) traj.add_event("tau1", r.t_end);
                }
                break;
            case Mode::Lock:
                r = append_run(traj, x, t, t_f, lock, params, opt, &to_lock);
                if (r.event_fired) {
                    traj.add_event("tau1", r.t_end);
                    mode = Mode::Arc;
                }
                break;
            case Mode::Arc:
                r = append_run(traj, x, t, t_f, arc, params, opt, &to_herd);
                if (r.event_fired) {
                    traj.add_event("tau2", r.t_end);
                    mode = Mode::Final;
                }
                break;
            case Mode::Final:
                r = append_run(traj, x, t, t_f, beta, params, opt);
                break;
        }
        t = r.t_end;
        x = r.state;
        if (!r.event_fired) break;
    }
    return traj;
}

double cost(const ControlSchedule& schedule, double t_f, const CostWeights& weights) {
    if (!(t_f > 0.0)) throw DomainError("cost requires t_f > 0");
    const EpidemicParams& p = schedule.params();
    const double beta = p.beta(), iM = p.i_M();
    double int_b = 0.0;

    if (!schedule.bumps().empty()) {
        // Five-point Gauss-Legendre on panels of at most a quarter day between breakpoints.
        static constexpr std::array<double, 5> x{0.0, -0.5384693101056831, 0.5384693101056831, -0.9061798459386640,
                                                 0.9061798459386640};
        static constexpr std::array<double, 5> w{0.5688888888888889, 0.4786286704993665, 0.4786286704993665,
                                                 0.2369268850561891, 0.2369268850561891};
        std::vector<double> cuts{0.0, t_f};
        for (double b : schedule.breakpoints())
            if (b > 0.0 && b < t_f) cuts.push_back(b);
        std::sort(cuts.begin(), cuts.end());
        cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
        for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
            const double a = cuts[k], c = cuts[k + 1];
            const auto idx = schedule.segment_index(0.5 * (a + c));
            const int panels = std::max(1, static_cast<int>(std::ceil((c - a) / 0.25)));
            const double h = (c - a) / panels;
            for (int j = 0; j < panels; ++j) {
                const double mid = a + (j + 0.5) * h;
                for (std::size_t q = 0; q < x.size(); ++q) int_b += 0.5 * h * w[q] * schedule.value_on(idx, mid + 0.5 * h * x[q]);
            }
        }
    } else {
        const auto& segs = schedule.segments();
        double covered_lo = t_f, covered_hi = 0.0;
        for (const auto& seg : segs) {
            const double a = std::max(seg.t_start, 0.0), c = std::min(seg.t_end, t_f);
            if (!(c > a)) continue;
            covered_lo = std::min(covered_lo, a);
            covered_hi = std::max(covered_hi, c);
            if (const auto* k = std::get_if<ConstantLaw>(&seg.law)) {
                int_b += k->b * (c - a);
            } else {
                const double t2 = std::get<SingularArcLaw>(seg.law).tau2;
                int_b += (std::log1p(beta * iM * (t2 - a)) - std::log1p(beta * iM * (t2 - c))) / iM;
            }
        }
        if (covered_hi <= covered_lo) {
            int_b += schedule.default_rate() * t_f;
        } else {
            int_b += schedule.default_rate() * (covered_lo + (t_f - covered_hi));
        }
    }
    return weights.lambda1 * t_f + weights.lambda2 * (beta * t_f - int_b);
}

LengthBounds lockdown_length_bounds(const SirState& state0, const EpidemicParams& params) {
    const ZoneLabel label = classify(state0, params);
    if (label == ZoneLabel::OutsideB) throw InfeasibleStart();
    const double bs = params.beta_star(), b = params.beta(), g = params.gamma(), iM = params.i_M();
    const double H = params.herd(), L = params.lock();

    const double C = state0.s + state0.i - H * std::log(state0.s);
    LengthBounds out{};
    out.theta0 = iM + L - L * std::log(L);
    out.theta1 = std::exp((C - out.theta0) / (L - H));
    out.theta2 = C / (1.0 - bs / b) - bs / (b - bs) * out.theta0 - out.theta1;
    if (in_A(label) || out.theta1 <= L) return out;  // no beta* phase
    out.lower = (bs * out.theta1 - g) / (bs * b * state0.s * iM);
    out.upper = (bs * out.theta1 - g) / (bs * g * out.theta2);
    return out;
}

}  // namespace opticon
