#pragma once

// Closed-form zones of the ICU-constrained SIR model:
//   A  (no-effort zone)  = {i <= Phi_A(s)}
//   A0 (all-control zone) = [0, gamma/beta] x [0, i_M]
//   B  (feasible zone)   = {i <= Phi_B(s)},  B0 = [0, gamma/beta*] x [0, i_M]
// and a grid-based viability oracle that recomputes B (or A) without the
// closed form.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "opticon/params.hpp"

namespace opticon {

enum class ZoneLabel { InteriorA, BoundaryA, InB0_NotA, InB_NotB0, BoundaryB, OutsideB, StationaryLine };

std::string to_string(ZoneLabel label);
/// True for every label that denotes a point of B (the stationary line included).
bool in_B(ZoneLabel label);
bool in_A(ZoneLabel label);

inline constexpr double kZoneBand = 1e-12;

/// Piecewise Phi_B: i_M on [0, gamma/beta*], the analytic branch up to s_M*, 0 after.
double phi_B(double s, const EpidemicParams& params);
/// Piecewise Phi_A: i_M on [0, gamma/beta], the analytic branch up to s_M, 0 after.
double phi_A(double s, const EpidemicParams& params);
/// i_M - s + gamma/beta* + (gamma/beta*) ln(beta* s / gamma) for any s > 0.
double phi_B_analytic(double s, const EpidemicParams& params);
/// i_M - s + gamma/beta + (gamma/beta) ln(beta s / gamma) for any s > 0.
double phi_A_analytic(double s, const EpidemicParams& params);

double s_m(const EpidemicParams& params);
/// Throws DomainError if the root exceeds 1.
double s_m_star(const EpidemicParams& params);

struct ZoneBoundaries {
    double s_M;
    double s_M_star;
    EpidemicParams params;

    static ZoneBoundaries compute(const EpidemicParams& params);
};

ZoneLabel classify(const SirState& state, const EpidemicParams& params);

/// Drives the state with beta until it meets the boundary of B, then with
/// beta* until s <= gamma/beta*, and reports whether B0 was reached within
/// t_max with i <= i_M throughout.
bool capture_basin_check(const SirState& state, const EpidemicParams& params, double t_max);

// ---------------------------------------------------------------------------
// Grid oracle

/// Cell set over [0,1] x [0, i_M]; cell (ix, iy) has center
/// ((ix + 0.5)/nx, i_M (iy + 0.5)/ny).
class BitGrid {
public:
    BitGrid(int nx, int ny, double i_max);

    int nx() const noexcept { return nx_; }
    int ny() const noexcept { return ny_; }
    double i_max() const noexcept { return i_max_; }
    double s_center(int ix) const noexcept { return (ix + 0.5) / nx_; }
    double i_center(int iy) const noexcept { return i_max_ * (iy + 0.5) / ny_; }

    bool get(int ix, int iy) const { return bits_[index(ix, iy)] != 0; }
    void set(int ix, int iy, bool v) { bits_[index(ix, iy)] = v ? 1 : 0; }
    std::size_t count() const;

    bool operator==(const BitGrid& other) const = default;

    /// Binary PGM, row 0 at the top (largest i); members are white.
    void write_pgm(const std::string& path) const;
    /// s,i,member
    void write_csv(const std::string& path) const;

private:
    std::size_t index(int ix, int iy) const { return static_cast<std::size_t>(iy) * nx_ + ix; }

    int nx_;
    int ny_;
    double i_max_;
    std::vector<std::uint8_t> bits_;
};

struct GridOptions {
    int resolution = 512;
    int control_samples = 9;     // evenly spaced in [beta*, beta]; 1 means {beta} only
    bool parallel = true;        // OpenMP over the cells of a column
};

/// Discrete viability kernel of [0,1] x [0, i_M] (see viability_grid.cpp).
BitGrid grid_viability_kernel(const EpidemicParams& params, int resolution, int control_samples);
BitGrid grid_viability_kernel(const EpidemicParams& params, const GridOptions& opt);

struct GridComparison {
    std::size_t disagreements = 0;          // cells whose membership differs from i <= phi(s)
    std::size_t outside_band = 0;           // of those, cells farther than `band` cells from the boundary
    std::size_t cells = 0;
};

/// Compares a grid against {i <= phi(s)}. A cell is within the band when the
/// closed-form membership is not constant over its (2 band + 1)^2 neighbourhood.
GridComparison compare_with_closed_form(const BitGrid& grid, const std::function<double(double)>& phi, int band);

}  // namespace opticon
