#include "opticon/zones.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "opticon/dynamics.hpp"
#include "opticon/errors.hpp"

namespace opticon {

std::string to_string(ZoneLabel label) {
    switch (label) {
        case ZoneLabel::InteriorA: return "InteriorA";
        case ZoneLabel::BoundaryA: return "BoundaryA";
        case ZoneLabel::InB0_NotA: return "InB0_NotA";
        case ZoneLabel::InB_NotB0: return "InB_NotB0";
        case ZoneLabel::BoundaryB: return "BoundaryB";
        case ZoneLabel::OutsideB: return "OutsideB";
        case ZoneLabel::StationaryLine: return "StationaryLine";
    }
    return "unknown";
}

bool in_B(ZoneLabel label) { return label != ZoneLabel::OutsideB; }

bool in_A(ZoneLabel label) {
    return label == ZoneLabel::InteriorA || label == ZoneLabel::BoundaryA || label == ZoneLabel::StationaryLine;
}

double phi_B_analytic(double s, const EpidemicParams& params) {
    const double L = params.lock();
    return params.i_M() - s + L + L * std::log(s / L);
}

double phi_A_analytic(double s, const EpidemicParams& params) {
    const double H = params.herd();
    return params.i_M() - s + H + H * std::log(s / H);
}

// The analytic branches are strictly decreasing above their threshold, so the
// clamp at 0 reproduces the "0 after the root" case without locating it.
double phi_B(double s, const EpidemicParams& params) {
    if (s <= params.lock()) return params.i_M();
    return std::max(0.0, phi_B_analytic(s, params));
}

double phi_A(double s, const EpidemicParams& params) {
    if (s <= params.herd()) return params.i_M();
    return std::max(0.0, phi_A_analytic(s, params));
}

namespace {

template <class F>
double decreasing_root(F&& f, double lo) {
    double hi = std::max(1.0, 2.0 * lo);
    while (f(hi) > 0.0) {
        hi *= 2.0;
        if (hi > 1e6) throw DomainError("zones: boundary root not bracketed");
    }
    while (hi - lo > 1e-13) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

double s_m(const EpidemicParams& params) {
    return decreasing_root([&](double s) { return phi_A_analytic(s, params); }, params.herd());
}

double s_m_star(const EpidemicParams& params) {
    const double r = decreasing_root([&](double s) { return phi_B_analytic(s, params); }, params.lock());
    if (r > 1.0) throw DomainError("s_M* > 1 violates the standing assumption s_M* <= 1");
    return r;
}

ZoneBoundaries ZoneBoundaries::compute(const EpidemicParams& params) {
    return {s_m(params), s_m_star(params), params};
}

ZoneLabel classify(const SirState& state, const EpidemicParams& params) {
    const double s = state.s, i = state.i;
    if (i == 0.0) return ZoneLabel::StationaryLine;
    const double fb = phi_B(s, params);
    if (i > fb + kZoneBand) return ZoneLabel::OutsideB;
    const double fa = phi_A(s, params);
    if (i < fa - kZoneBand) return ZoneLabel::InteriorA;
    if (std::abs(i - fa) <= kZoneBand) return ZoneLabel::BoundaryA;
    if (std::abs(i - fb) <= kZoneBand) return ZoneLabel::BoundaryB;
    if (s <= params.lock() && i <= params.i_M()) return ZoneLabel::InB0_NotA;
    return ZoneLabel::InB_NotB0;
}

bool capture_basin_check(const SirState& state, const EpidemicParams& params, double t_max) {
    if (!(state.i > 0.0)) throw DomainError("capture_basin_check: requires i > 0");
    const double L = params.lock(), iM = params.i_M();
    if (state.i > phi_B(state.s, params) + kZoneBand) return false;
    if (state.s <= L && state.i <= iM) return true;

    const IntegrationOptions opt{1e-11, 0.5};
    Trajectory traj;
    SirState x = state;
    double t = 0.0;

    // Phase 1: beta, unless already on (or numerically above) the boundary.
    if (state.i < phi_B_analytic(state.s, params)) {
        const EventFunction hit = [&](const SirState& y) {
            return std::max(y.i - phi_B_analytic(y.s, params), L - y.s);
        };
        const StateLaw beta = [&](double, const SirState&) { return params.beta(); };
        const RunResult r = append_run(traj, x, 0.0, t_max, beta, params, opt, &hit);
        if (!r.event_fired) return false;
        x = r.state;
        t = r.t_end;
    }
    // Phase 2: beta* along the boundary down to the lockdown threshold.
    if (x.s > L) {
        if (!(t < t_max)) return false;
        const EventFunction reach = [&](const SirState& y) { return y.s - L; };
        const StateLaw lock = [&](double, const SirState&) { return params.beta_star(); };
        const RunResult r = append_run(traj, x, t, t_max, lock, params, opt, &reach);
        if (!r.event_fired) return false;
        x = r.state;
    }
    return traj.max_i() <= iM + 1e-8 && x.i <= iM + 1e-8;
}

// ---------------------------------------------------------------------------

BitGrid::BitGrid(int nx, int ny, double i_max)
    : nx_(nx), ny_(ny), i_max_(i_max), bits_(static_cast<std::size_t>(nx) * ny, 0) {
    if (nx <= 0 || ny <= 0 || !(i_max > 0.0)) throw DomainError("BitGrid: invalid dimensions");
}

std::size_t BitGrid::count() const { return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), 1)); }

void BitGrid::write_pgm(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "P5\n" << nx_ << ' ' << ny_ << "\n255\n";
    for (int iy = ny_ - 1; iy >= 0; --iy)
        for (int ix = 0; ix < nx_; ++ix) out.put(static_cast<char>(get(ix, iy) ? 255 : 0));
}

void BitGrid::write_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out.precision(17);
    out << "s,i,member\n";
    for (int iy = 0; iy < ny_; ++iy)
        for (int ix = 0; ix < nx_; ++ix) out << s_center(ix) << ',' << i_center(iy) << ',' << (get(ix, iy) ? 1 : 0) << '\n';
}

GridComparison compare_with_closed_form(const BitGrid& grid, const std::function<double(double)>& phi, int band) {
    const int nx = grid.nx(), ny = grid.ny();
    std::vector<std::uint8_t> truth(static_cast<std::size_t>(nx) * ny);
    std::vector<double> phis(nx);
    for (int ix = 0; ix < nx; ++ix) phis[ix] = phi(grid.s_center(ix));
    for (int iy = 0; iy < ny; ++iy)
        for (int ix = 0; ix < nx; ++ix) truth[static_cast<std::size_t>(iy) * nx + ix] = grid.i_center(iy) <= phis[ix];

    GridComparison out;
    for (int iy = 0; iy < ny; ++iy) {
        for (int ix = 0; ix < nx; ++ix) {
            // Cells past the simplex edge s + i = 1 are outside the constraint set.
            if (grid.s_center(ix) + grid.i_center(iy) > 1.0) continue;
            ++out.cells;
            const bool t = truth[static_cast<std::size_t>(iy) * nx + ix];
            if (t == grid.get(ix, iy)) continue;
            ++out.disagreements;
            bool near = false;
            for (int dy = -band; dy <= band && !near; ++dy)
                for (int dx = -band; dx <= band && !near; ++dx) {
                    const int jx = std::clamp(ix + dx, 0, nx - 1), jy = std::clamp(iy + dy, 0, ny - 1);
                    near = truth[static_cast<std::size_t>(jy) * nx + jx] != t;
                }
            if (!near) ++out.outside_band;
        }
    }
    return out;
}

}  // namespace opticon
