#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "opticon/params.hpp"

namespace opticon {

/// b(t) = b on the segment.
struct ConstantLaw {
    double b;
};

/// Boundary (singular) arc keeping i = i_M: b(t) = beta / (1 + beta i_M (tau2 - t)).
struct SingularArcLaw {
    double tau2;
};

using ControlLaw = std::variant<ConstantLaw, SingularArcLaw>;

struct ControlSegment {
    double t_start;
    double t_end;
    ControlLaw law;
};

/// Smooth compactly supported additive perturbation
/// amplitude * cos^2(pi (t - center) / (2 half_width)) on |t - center| < half_width.
struct Bump {
    double center;
    double half_width;
    double amplitude;

    double value(double t) const noexcept;
};

/// Piecewise control law: contiguous segments followed by a default rate,
/// optionally with additive bumps (projected back onto [beta_star, beta]).
///
/// Evaluation is right-continuous: at a segment boundary the next segment's
/// law applies. Before the first segment and after the last one the default
/// rate applies.
class ControlSchedule {
public:
    ControlSchedule(EpidemicParams params, std::vector<ControlSegment> segments, double default_rate);

    /// b identically equal to `rate` for all t.
    static ControlSchedule constant(const EpidemicParams& params, double rate);

    const EpidemicParams& params() const noexcept { return params_; }
    const std::vector<ControlSegment>& segments() const noexcept { return segments_; }
    double default_rate() const noexcept { return default_; }
    const std::vector<Bump>& bumps() const noexcept { return bumps_; }

    ControlSchedule with_bumps(std::vector<Bump> bumps) const;
    ControlSchedule with_default(double rate) const;

    double value(double t) const;
    /// Value of the unperturbed law of segment `index` at t (t may sit on either end).
    double segment_value(std::size_t index, double t) const;
    /// Index of the segment active at t (right-continuous), or nullopt past the last one.
    std::optional<std::size_t> segment_index(double t) const;
    /// Value with the segment fixed to `idx` (nullopt = default rate), bumps
    /// included. Used by integrators so a step never sees the next segment.
    double value_on(std::optional<std::size_t> idx, double t) const;

    /// Times where the law is not smooth: segment boundaries and bump supports.
    std::vector<double> breakpoints() const;

private:
    double law_value(const ControlLaw& law, double t) const;

    EpidemicParams params_;
    std::vector<ControlSegment> segments_;
    double default_;
    std::vector<Bump> bumps_;
};

/// Right-hand end of the arc law, used by the cost integral and validation.
double singular_arc_value(const EpidemicParams& params, double tau2, double t) noexcept;

}  // namespace opticon
