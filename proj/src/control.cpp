#include "opticon/control.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "opticon/errors.hpp"

namespace opticon {

double singular_arc_value(const EpidemicParams& params, double tau2, double t) noexcept {
    return params.beta() / (1.0 + params.beta() * params.i_M() * (tau2 - t));
}

double Bump::value(double t) const noexcept {
    const double x = (t - center) / half_width;
    if (std::abs(x) >= 1.0) return 0.0;
    const double c = std::cos(0.5 * std::numbers::pi * x);
    return amplitude * c * c;
}

ControlSchedule::ControlSchedule(EpidemicParams params, std::vector<ControlSegment> segments,
                                 double default_rate)
    : params_(params), segments_(std::move(segments)), default_(default_rate) {
    if (!params_.admissible(default_))
        throw DomainError("ControlSchedule: default rate outside [beta_star, beta]");
    for (std::size_t k = 0; k < segments_.size(); ++k) {
        const auto& seg = segments_[k];
        if (!(seg.t_start < seg.t_end)) throw DomainError("ControlSchedule: segment with t_start >= t_end");
        if (k > 0 && seg.t_start != segments_[k - 1].t_end)
            throw DomainError("ControlSchedule: segments are not contiguous");
        if (const auto* c = std::get_if<ConstantLaw>(&seg.law)) {
            if (!params_.admissible(c->b)) throw DomainError("ControlSchedule: constant rate outside [beta_star, beta]");
        } else {
            const auto& arc = std::get<SingularArcLaw>(seg.law);
            // The arc law is increasing in t, so the endpoints bound it.
            if (seg.t_end > arc.tau2 * (1.0 + 1e-12) + 1e-12)
                throw DomainError("ControlSchedule: singular arc extends past tau2");
            if (!params_.admissible(singular_arc_value(params_, arc.tau2, seg.t_start), 1e-9) ||
                !params_.admissible(singular_arc_value(params_, arc.tau2, seg.t_end), 1e-9))
                throw DomainError("ControlSchedule: singular arc leaves [beta_star, beta]");
        }
    }
}

ControlSchedule ControlSchedule::constant(const EpidemicParams& params, double rate) {
    return ControlSchedule(params, {}, rate);
}

ControlSchedule ControlSchedule::with_bumps(std::vector<Bump> bumps) const {
    ControlSchedule out = *this;
    out.bumps_ = std::move(bumps);
    return out;
}

ControlSchedule ControlSchedule::with_default(double rate) const {
    return ControlSchedule(params_, segments_, rate).with_bumps(bumps_);
}

double ControlSchedule::law_value(const ControlLaw& law, double t) const {
    if (const auto* c = std::get_if<ConstantLaw>(&law)) return c->b;
    const double v = singular_arc_value(params_, std::get<SingularArcLaw>(law).tau2, t);
    return std::clamp(v, params_.beta_star(), params_.beta());
}

std::optional<std::size_t> ControlSchedule::segment_index(double t) const {
    if (segments_.empty() || t < segments_.front().t_start || t >= segments_.back().t_end) return std::nullopt;
    auto it = std::upper_bound(segments_.begin(), segments_.end(), t,
                               [](double x, const ControlSegment& s) { return x < s.t_start; });
    return static_cast<std::size_t>(std::distance(segments_.begin(), it) - 1);
}

double ControlSchedule::segment_value(std::size_t index, double t) const {
    return law_value(segments_.at(index).law, t);
}

double ControlSchedule::value(double t) const { return value_on(segment_index(t), t); }

double ControlSchedule::value_on(std::optional<std::size_t> idx, double t) const {
    double b = idx ? law_value(segments_.at(*idx).law, t) : default_;
    if (!bumps_.empty()) {
        for (const auto& bump : bumps_) b += bump.value(t);
        b = std::clamp(b, params_.beta_star(), params_.beta());
    }
    return b;
}

std::vector<double> ControlSchedule::breakpoints() const {
    std::vector<double> out;
    for (const auto& seg : segments_) {
        out.push_back(seg.t_start);
        out.push_back(seg.t_end);
    }
    for (const auto& b : bumps_) {
        out.push_back(b.center - b.half_width);
        out.push_back(b.center);
        out.push_back(b.center + b.half_width);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

}  // namespace opticon
