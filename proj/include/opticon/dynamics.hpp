#pragma once

// Controlled SIR field ds/dt = -b s i, di/dt = b s i - gamma i, integration
// under piecewise or state-feedback control laws, and event location.

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "opticon/control.hpp"
#include "opticon/ode.hpp"
#include "opticon/params.hpp"

namespace opticon {

struct Rates {
    double ds_dt;
    double di_dt;
};

/// Throws DomainError when b is outside [beta_star, beta].
Rates vector_field(const SirState& state, double b, const EpidemicParams& params);

/// i + s - (gamma/b) ln s, a first integral of the field under constant b.
double conserved_quantity(const SirState& state, double b, const EpidemicParams& params);

struct TrajectoryEvent {
    std::string label;
    double time;
};

/// Time-sampled path (t, s, i, b) with the integrator's continuous extension.
///
/// Times are strictly increasing regardless of the integration direction.
/// Controls are right-continuous: at a switching time the new value is stored.
class Trajectory {
public:
    const std::vector<double>& times() const noexcept { return times_; }
    const std::vector<SirState>& states() const noexcept { return states_; }
    const std::vector<double>& controls() const noexcept { return controls_; }
    const std::vector<TrajectoryEvent>& events() const noexcept { return events_; }

    std::size_t size() const noexcept { return times_.size(); }
    bool empty() const noexcept { return times_.empty(); }
    double t_begin() const { return times_.front(); }
    double t_end() const { return times_.back(); }
    const SirState& front() const { return states_.front(); }
    const SirState& back() const { return states_.back(); }

    /// State at any t in [t_begin, t_end] from the dense output.
    SirState state_at(double t) const;
    double max_i() const;
    std::optional<double> event_time(const std::string& label) const;

    void add_event(std::string label, double time);

    // Construction interface used by the integration engine.
    void push_knot(double t, const SirState& s, double b);
    void set_last_control(double b);
    void push_piece(double lo, double hi, const ode::DensePiece<2>& piece);
    void truncate_after(double t, const SirState& s, double b);
    void reverse();

private:
    struct Span {
        double lo;
        double hi;
        ode::DensePiece<2> piece;
    };

    std::vector<double> times_;
    std::vector<SirState> states_;
    std::vector<double> controls_;
    std::vector<TrajectoryEvent> events_;
    std::vector<Span> spans_;
};

struct IntegrationOptions {
    double tol = kDefaultTol;
    double max_step = std::numeric_limits<double>::infinity();
};

/// Control as a function of time and state.
using StateLaw = std::function<double(double t, const SirState& state)>;
/// Event function; an event fires when its sign differs from the sign at the
/// start of the run (or it is exactly zero).
using EventFunction = std::function<double(const SirState& state)>;

struct RunResult {
    double t_end;
    SirState state;
    bool event_fired;
};

/// Integrates forward from (t_from, start) to t_to under `law`, appending to
/// `traj`. Stops early at the first firing of `stop` (located to kEventTol).
RunResult append_run(Trajectory& traj, const SirState& start, double t_from, double t_to,
                     const StateLaw& law, const EpidemicParams& params, const IntegrationOptions& opt,
                     const EventFunction* stop = nullptr);

/// Dense trajectory from t0 to t1 under a schedule. t1 < t0 integrates the
/// negated field (backward in time). Segment boundaries of the schedule are
/// grid points; no step straddles a switch.
Trajectory integrate(const SirState& state0, const ControlSchedule& schedule, double t0, double t1,
                     double tol, const EpidemicParams& params,
                     double max_step = std::numeric_limits<double>::infinity());

struct EventSpec {
    enum class Kind { SReaches, IReaches, HitsBoundaryB };
    Kind kind;
    double level = 0.0;

    static EventSpec s_reaches(double c) { return {Kind::SReaches, c}; }
    static EventSpec i_reaches(double c) { return {Kind::IReaches, c}; }
    static EventSpec hits_boundary_B() { return {Kind::HitsBoundaryB, 0.0}; }

    EventFunction function(const EpidemicParams& params) const;
};

/// First t in [0, t_max] at which the event function crosses zero, or nullopt.
std::optional<double> crossing_time(const SirState& state0, const ControlSchedule& schedule,
                                    const EventSpec& event, double t_max, const EpidemicParams& params,
                                    double tol = kDefaultTol);

/// Sup-norm distance in (s, i) between two trajectories over their common
/// time range, sampled at the union of both grids.
double sup_distance(const Trajectory& a, const Trajectory& b);

}  // namespace opticon
