#include "opticon/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "opticon/errors.hpp"
#include "opticon/zones.hpp"

namespace opticon {

Rates vector_field(const SirState& state, double b, const EpidemicParams& params) {
    if (!params.admissible(b)) {
        std::ostringstream msg;
        msg << "vector_field: control " << b << " outside [" << params.beta_star() << ", " << params.beta() << "]";
        throw DomainError(msg.str());
    }
    const double inf = b * state.s * state.i;
    return {-inf, inf - params.gamma() * state.i};
}

double conserved_quantity(const SirState& state, double b, const EpidemicParams& params) {
    if (!(state.s > 0.0)) throw DomainError("conserved_quantity: requires s > 0");
    return state.i + state.s - params.gamma() / b * std::log(state.s);
}

// ---------------------------------------------------------------------------

SirState Trajectory::state_at(double t) const {
    if (times_.empty()) throw DomainError("Trajectory::state_at on empty trajectory");
    const double lo = times_.front(), hi = times_.back();
    const double span = std::max(1.0, hi - lo);
    if (t < lo - 1e-12 * span || t > hi + 1e-12 * span) throw DomainError("Trajectory::state_at: t outside range");
    if (spans_.empty()) return states_.front();
    t = std::clamp(t, lo, hi);
    auto it = std::upper_bound(spans_.begin(), spans_.end(), t, [](double x, const Span& sp) { return x < sp.lo; });
    if (it != spans_.begin()) --it;
    const auto y = it->piece.eval(std::clamp(t, it->lo, it->hi));
    return SirState::unchecked(y[0], y[1]);
}

double Trajectory::max_i() const {
    double m = -std::numeric_limits<double>::infinity();
    for (const auto& s : states_) m = std::max(m, s.i);
    return m;
}

std::optional<double> Trajectory::event_time(const std::string& label) const {
    for (const auto& e : events_)
        if (e.label == label) return e.time;
    return std::nullopt;
}

void Trajectory::add_event(std::string label, double time) { events_.push_back({std::move(label), time}); }

void Trajectory::push_knot(double t, const SirState& s, double b) {
    times_.push_back(t);
    states_.push_back(s);
    controls_.push_back(b);
}

void Trajectory::set_last_control(double b) { controls_.back() = b; }

void Trajectory::push_piece(double lo, double hi, const ode::DensePiece<2>& piece) {
    spans_.push_back({std::min(lo, hi), std::max(lo, hi), piece});
}

void Trajectory::truncate_after(double t, const SirState& s, double b) {
    while (!times_.empty() && times_.back() >= t) {
        times_.pop_back();
        states_.pop_back();
        controls_.pop_back();
    }
    while (!spans_.empty() && spans_.back().lo >= t) spans_.pop_back();
    if (!spans_.empty()) spans_.back().hi = std::min(spans_.back().hi, t);
    push_knot(t, s, b);
}

void Trajectory::reverse() {
    std::reverse(times_.begin(), times_.end());
    std::reverse(states_.begin(), states_.end());
    std::reverse(controls_.begin(), controls_.end());
    std::reverse(spans_.begin(), spans_.end());
}

// ---------------------------------------------------------------------------

namespace {

int sign_of(double x) { return (x > 0.0) - (x < 0.0); }

// Core engine: integrates in the direction of `dir` (+1 forward, -1 backward)
// from t_from to t_to, evaluating the field at real time t_from + dir * tau.
// Knots are appended in integration order.
RunResult run_directed(Trajectory& traj, const SirState& start, double t_from, double t_to, int dir,
                       const StateLaw& law, const EpidemicParams& params, const IntegrationOptions& opt,
                       const EventFunction* stop, bool overwrite_control) {
    const double length = std::abs(t_to - t_from);
    auto real_time = [&](double tau) { return t_from + dir * tau; };

    if (traj.empty()) {
        traj.push_knot(t_from, start, law(t_from, start));
    } else if (overwrite_control) {
        traj.set_last_control(law(t_from, start));
    }

    const int sign0 = stop ? sign_of((*stop)(start)) : 0;
    if (stop && sign0 == 0) return {t_from, start, true};

    auto rhs = [&](double tau, const ode::Vec<2>& y) {
        const auto st = SirState::unchecked(y[0], y[1]);
        const double b = law(real_time(tau), st);
        const Rates r = vector_field(st, b, params);
        return ode::Vec<2>{dir * r.ds_dt, dir * r.di_dt};
    };

    ode::StepOptions so;
    so.rtol = opt.tol;
    so.atol = opt.tol;
    so.max_step = opt.max_step;

    RunResult out{t_to, start, false};
    try {
        ode::integrate_dp5<2>(rhs, 0.0, ode::Vec<2>{start.s, start.i}, length, so,
                              [&](const ode::DensePiece<2>& p, const ode::Vec<2>& y) {
                                  ode::DensePiece<2> real = p;
                                  real.t0 = real_time(p.t0);
                                  real.t1 = real_time(p.t1);
                                  const auto st = SirState::unchecked(y[0], y[1]);
                                  if (stop) {
                                      const double g1 = (*stop)(st);
                                      if (sign_of(g1) != sign0) {
                                          auto g_at = [&](double tau) {
                                              const auto v = p.eval(tau);
                                              return (*stop)(SirState::unchecked(v[0], v[1]));
                                          };
                                          const double g0 = g_at(p.t0);
                                          const double tau_e = ode::refine_root(g_at, p.t0, g0, p.t1, g1, kEventTol);
                                          const auto ye = p.eval(tau_e);
                                          const auto se = SirState::unchecked(ye[0], ye[1]);
                                          const double te = real_time(tau_e);
                                          traj.push_piece(real.t0, te, real);
                                          traj.push_knot(te, se, law(te, se));
                                          out = {te, se, true};
                                          return false;
                                      }
                                  }
                                  traj.push_piece(real.t0, real.t1, real);
                                  const double t = real_time(p.t1);
                                  traj.push_knot(t, st, law(t, st));
                                  out = {t, st, false};
                                  return true;
                              });
    } catch (const IntegrationFailure& e) {
        throw IntegrationFailure(e.what(), real_time(e.last_time()));
    }
    return out;
}

}  // namespace

RunResult append_run(Trajectory& traj, const SirState& start, double t_from, double t_to, const StateLaw& law,
                     const EpidemicParams& params, const IntegrationOptions& opt, const EventFunction* stop) {
    if (!(t_to > t_from)) throw DomainError("append_run: requires t_to > t_from");
    return run_directed(traj, start, t_from, t_to, +1, law, params, opt, stop, true);
}

Trajectory integrate(const SirState& state0, const ControlSchedule& schedule, double t0, double t1, double tol,
                     const EpidemicParams& params, double max_step) {
    if (t0 == t1) throw DomainError("integrate: requires t0 != t1");
    if (!(tol > 0.0)) throw DomainError("integrate: requires tol > 0");
    const int dir = t1 > t0 ? +1 : -1;
    const double lo = std::min(t0, t1), hi = std::max(t0, t1);

    std::vector<double> cuts{lo, hi};
    for (double b : schedule.breakpoints())
        if (b > lo && b < hi) cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    if (dir < 0) std::reverse(cuts.begin(), cuts.end());

    const IntegrationOptions opt{tol, max_step};
    Trajectory traj;
    SirState state = state0;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        const double a = cuts[k], b = cuts[k + 1];
        // One law per piece, selected at the piece midpoint, so stages that sit
        // on the piece ends never see the neighbouring segment.
        const auto idx = schedule.segment_index(0.5 * (a + b));
        const StateLaw law = [&schedule, idx](double t, const SirState&) { return schedule.value_on(idx, t); };
        // Going backward, the knot shared with the previous piece already holds
        // the value from its right, which is the right-continuous one.
        state = run_directed(traj, state, a, b, dir, law, params, opt, nullptr, dir > 0).state;
    }
    if (dir < 0) traj.reverse();
    return traj;
}

EventFunction EventSpec::function(const EpidemicParams& params) const {
    switch (kind) {
        case Kind::SReaches: {
            const double c = level;
            return [c](const SirState& x) { return x.s - c; };
        }
        case Kind::IReaches: {
            const double c = level;
            return [c](const SirState& x) { return x.i - c; };
        }
        case Kind::HitsBoundaryB:
            return [params](const SirState& x) { return x.i - phi_B(x.s, params); };
    }
    throw DomainError("EventSpec: unknown kind");
}

std::optional<double> crossing_time(const SirState& state0, const ControlSchedule& schedule, const EventSpec& event,
                                    double t_max, const EpidemicParams& params, double tol) {
    if (!(t_max > 0.0)) throw DomainError("crossing_time: requires t_max > 0");
    const EventFunction g = event.function(params);
    if (g(state0) == 0.0) return 0.0;

    std::vector<double> cuts{0.0, t_max};
    for (double b : schedule.breakpoints())
        if (b > 0.0 && b < t_max) cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    const int sign0 = sign_of(g(state0));

    const IntegrationOptions opt{tol, 0.5};
    Trajectory traj;
    SirState state = state0;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        const double a = cuts[k], b = cuts[k + 1];
        const auto idx = schedule.segment_index(0.5 * (a + b));
        const StateLaw law = [&schedule, idx](double t, const SirState&) { return schedule.value_on(idx, t); };
        // Measure sign changes relative to the initial sign, not the piece start.
        const EventFunction stop = [&](const SirState& x) {
            const double v = g(x);
            return sign0 > 0 ? v : -v;
        };
        const RunResult r = run_directed(traj, state, a, b, +1, law, params, opt, &stop, true);
        if (r.event_fired) return r.t_end;
        state = r.state;
    }
    return std::nullopt;
}

double sup_distance(const Trajectory& a, const Trajectory& b) {
    const double lo = std::max(a.t_begin(), b.t_begin());
    const double hi = std::min(a.t_end(), b.t_end());
    if (lo > hi) throw DomainError("sup_distance: trajectories do not overlap");
    double d = 0.0;
    auto probe = [&](double t) {
        if (t < lo || t > hi) return;
        const SirState x = a.state_at(t), y = b.state_at(t);
        d = std::max({d, std::abs(x.s - y.s), std::abs(x.i - y.i)});
    };
    for (double t : a.times()) probe(t);
    for (double t : b.times()) probe(t);
    return d;
}

}  // namespace opticon
