// Grid viability oracle.
//
// Works on the value function W(x) = min over controls of the largest
// normalised excess i/i_M - 1 seen along the future path; the kernel is
// {W <= 0}. Controls are held constant until s has dropped by one cell width,
// and the path is followed with RK4 substeps, so W at column ix only depends
// on column ix-1 (s never increases). One left-to-right sweep is therefore
// the fixpoint, and the cells of a column can be processed independently.
//
// Under a held control b, once s <= gamma/b the infected fraction only
// decreases, so holding b forever is optimal from there and the option value
// is the running maximum alone.

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <limits>
#include <vector>

#include "opticon/errors.hpp"
#include "opticon/zones.hpp"

namespace opticon {

namespace {

struct Field {
    double b;
    double gamma;
    std::array<double, 2> operator()(double s, double i) const {
        const double inf = b * s * i;
        return {-inf, inf - gamma * i};
    }
};

constexpr double kGiveUp = 0.5;            // normalised excess beyond which the option is hopeless
constexpr long kMaxSubsteps = 2'000'000;

double interp_column(const std::vector<double>& w, double v, int ny) {
    const double r = std::clamp(v * ny - 0.5, 0.0, static_cast<double>(ny - 1));
    const int k = std::min(static_cast<int>(r), ny - 2);
    const double f = r - k;
    return (1.0 - f) * w[k] + f * w[k + 1];
}

double option_value(double s0, double i0, double b, double s_target, const std::vector<double>* prev,
                    const EpidemicParams& p, int ny, double ds_cell, double di_cell) {
    const double iM = p.i_M();
    double gmax = i0 / iM - 1.0;
    if (s0 <= p.gamma() / b || prev == nullptr) return gmax;

    const Field f{b, p.gamma()};
    double s = s0, i = i0;
    for (long n = 0; n < kMaxSubsteps; ++n) {
        const auto k1 = f(s, i);
        const double speed = std::max(std::abs(k1[0]) / ds_cell, std::abs(k1[1]) / di_cell);
        const double dt = std::clamp(0.25 / std::max(speed, 1e-300), 1e-4, 2.0);
        const auto k2 = f(s + 0.5 * dt * k1[0], i + 0.5 * dt * k1[1]);
        const auto k3 = f(s + 0.5 * dt * k2[0], i + 0.5 * dt * k2[1]);
        const auto k4 = f(s + dt * k3[0], i + dt * k3[1]);
        const double s1 = s + dt / 6.0 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]);
        const double i1 = i + dt / 6.0 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]);

        if (s1 <= s_target) {
            const double theta = (s - s_target) / (s - s1);
            const double ie = i + theta * (i1 - i);
            gmax = std::max(gmax, ie / iM - 1.0);
            return std::max(gmax, interp_column(*prev, ie / iM, ny));
        }
        s = s1;
        i = i1;
        gmax = std::max(gmax, i / iM - 1.0);
        if (gmax > kGiveUp || s <= p.gamma() / b) return gmax;
    }
    throw OracleFailure("grid_viability_kernel: substep budget exhausted");
}

}  // namespace

BitGrid grid_viability_kernel(const EpidemicParams& params, const GridOptions& opt) {
    const int n = opt.resolution;
    if (n < 64) throw DomainError("grid_viability_kernel: resolution must be >= 64");
    if (opt.control_samples < 1) throw DomainError("grid_viability_kernel: control_samples must be >= 1");

    std::vector<double> controls;
    if (opt.control_samples == 1) {
        controls.push_back(params.beta());
    } else {
        for (int k = 0; k < opt.control_samples; ++k)
            controls.push_back(params.beta_star() +
                               (params.beta() - params.beta_star()) * k / (opt.control_samples - 1));
    }

    BitGrid grid(n, n, params.i_M());
    const double ds_cell = 1.0 / n;
    const double di_cell = params.i_M() / n;
    std::vector<double> prev(n), cur(n);
    std::atomic<bool> failed{false};

    for (int ix = 0; ix < n; ++ix) {
        const double s0 = grid.s_center(ix);
        const double s_target = ix > 0 ? grid.s_center(ix - 1) : 0.0;
        const std::vector<double>* left = ix > 0 ? &prev : nullptr;
#pragma omp parallel for schedule(dynamic, 8) if (opt.parallel)
        for (int iy = 0; iy < n; ++iy) {
            const double i0 = grid.i_center(iy);
            double best = std::numeric_limits<double>::infinity();
            try {
                for (double b : controls)
                    best = std::min(best, option_value(s0, i0, b, s_target, left, params, n, ds_cell, di_cell));
            } catch (const OracleFailure&) {
                failed = true;
            }
            cur[iy] = best;
        }
        if (failed) throw OracleFailure("grid_viability_kernel: substep budget exhausted");
        for (int iy = 0; iy < n; ++iy) grid.set(ix, iy, cur[iy] <= 0.0 && s0 + grid.i_center(iy) <= 1.0);
        std::swap(prev, cur);
    }
    return grid;
}

BitGrid grid_viability_kernel(const EpidemicParams& params, int resolution, int control_samples) {
    GridOptions opt;
    opt.resolution = resolution;
    opt.control_samples = control_samples;
    return grid_viability_kernel(params, opt);
}

}  // namespace opticon
