#pragma once

// Dormand-Prince 5(4) with the standard free 4th-order continuous extension.
// The stepper only advances forward in time; callers that need negative time
// integrate the negated field (see dynamics.cpp).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>

#include "opticon/errors.hpp"

namespace opticon::ode {

template <std::size_t N>
using Vec = std::array<double, N>;

/// Continuous extension over one accepted step [t0, t1].
template <std::size_t N>
struct DensePiece {
    double t0 = 0.0;
    double t1 = 0.0;
    std::array<Vec<N>, 5> r{};

    Vec<N> eval(double t) const {
        const double h = t1 - t0;
        const double th = h == 0.0 ? 0.0 : (t - t0) / h;
        const double th1 = 1.0 - th;
        Vec<N> y;
        for (std::size_t k = 0; k < N; ++k)
            y[k] = r[0][k] + th * (r[1][k] + th1 * (r[2][k] + th * (r[3][k] + th1 * r[4][k])));
        return y;
    }
};

struct StepOptions {
    double rtol = 1e-9;
    double atol = 1e-9;
    double max_step = std::numeric_limits<double>::infinity();
    double initial_step = 0.0;  // 0 picks one from the local scale of the field
    std::size_t max_steps = 50'000'000;
};

namespace detail {

// Butcher tableau.
inline constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
inline constexpr double a21 = 1.0 / 5.0;
inline constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
inline constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
inline constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                        a54 = -212.0 / 729.0;
inline constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                        a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
inline constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                        a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
// Embedded error weights (5th minus 4th order).
inline constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                        e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
// Dense output.
inline constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                        d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                        d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

template <std::size_t N>
Vec<N> axpy(const Vec<N>& y, double h, std::initializer_list<std::pair<double, const Vec<N>*>> terms) {
    Vec<N> out = y;
    for (const auto& [c, k] : terms)
        for (std::size_t j = 0; j < N; ++j) out[j] += h * c * (*k)[j];
    return out;
}

template <std::size_t N>
double scaled_norm(const Vec<N>& v, const Vec<N>& ya, const Vec<N>& yb, const StepOptions& o) {
    double acc = 0.0;
    for (std::size_t j = 0; j < N; ++j) {
        const double sc = o.atol + o.rtol * std::max(std::abs(ya[j]), std::abs(yb[j]));
        const double q = v[j] / sc;
        acc += q * q;
    }
    return std::sqrt(acc / static_cast<double>(N));
}

}  // namespace detail

/// Integrates y' = f(t, y) from t0 to t1 > t0 with local error control.
///
/// `on_step(piece, y_end)` is called after every accepted step; returning
/// false stops the integration at the end of that step. Returns the time
/// reached. Throws IntegrationFailure when the step size underflows.
template <std::size_t N, class Rhs, class OnStep>
double integrate_dp5(Rhs&& f, double t0, Vec<N> y, double t1, const StepOptions& opt,
                     OnStep&& on_step) {
    using namespace detail;
    if (!(t1 > t0)) return t0;
    double t = t0;
    Vec<N> k1 = f(t, y);

    double h = opt.initial_step;
    if (h <= 0.0) {
        const double d0 = scaled_norm<N>(y, y, y, opt);
        const double d1n = scaled_norm<N>(k1, y, y, opt);
        h = (d0 < 1e-5 || d1n < 1e-5) ? 1e-6 : 0.01 * d0 / d1n;
        h = std::min({h, opt.max_step, t1 - t0});
    }

    Vec<N> k2, k3, k4, k5, k6, k7, y1, err;
    std::size_t steps = 0;
    while (t < t1) {
        if (++steps > opt.max_steps) throw IntegrationFailure("dp5: step budget exhausted", t);
        bool last = false;
        if (t + h >= t1 || t1 - (t + h) < 1e-12 * std::max(1.0, std::abs(t1))) {
            h = t1 - t;
            last = true;
        }
        const double hmin = 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t));
        if (h < hmin) throw IntegrationFailure("dp5: step size underflow", t);

        k2 = f(t + c2 * h, axpy<N>(y, h, {{a21, &k1}}));
        k3 = f(t + c3 * h, axpy<N>(y, h, {{a31, &k1}, {a32, &k2}}));
        k4 = f(t + c4 * h, axpy<N>(y, h, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
        k5 = f(t + c5 * h, axpy<N>(y, h, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
        k6 = f(t + h, axpy<N>(y, h, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
        y1 = axpy<N>(y, h, {{a71, &k1}, {a73, &k3}, {a74, &k4}, {a75, &k5}, {a76, &k6}});
        k7 = f(t + h, y1);
        for (std::size_t j = 0; j < N; ++j)
            err[j] = h * (e1 * k1[j] + e3 * k3[j] + e4 * k4[j] + e5 * k5[j] + e6 * k6[j] + e7 * k7[j]);
        const double en = scaled_norm<N>(err, y, y1, opt);

        if (!(en <= 1.0) || !std::isfinite(en)) {
            const double fac = std::isfinite(en) ? std::max(0.2, 0.9 * std::pow(en, -0.2)) : 0.2;
            h *= fac;
            continue;
        }

        DensePiece<N> piece;
        piece.t0 = t;
        piece.t1 = last ? t1 : t + h;
        for (std::size_t j = 0; j < N; ++j) {
            const double dy = y1[j] - y[j];
            const double bspl = h * k1[j] - dy;
            piece.r[0][j] = y[j];
            piece.r[1][j] = dy;
            piece.r[2][j] = bspl;
            piece.r[3][j] = dy - h * k7[j] - bspl;
            piece.r[4][j] = h * (d1 * k1[j] + d3 * k3[j] + d4 * k4[j] + d5 * k5[j] + d6 * k6[j] + d7 * k7[j]);
        }
        t = piece.t1;
        y = y1;
        k1 = k7;  // FSAL
        if (!on_step(piece, y)) return t;

        const double fac = en == 0.0 ? 10.0 : std::clamp(0.9 * std::pow(en, -0.2), 0.2, 10.0);
        h = std::min(h * fac, opt.max_step);
    }
    return t;
}

/// Locates a sign change of g in [a, b] (g(a), g(b) of opposite sign or zero)
/// by bisection refined with secant steps, to a bracket width of tol.
/// Returns the bracket end on the side of b, i.e. where the sign has flipped.
template <class G>
double refine_root(G&& g, double a, double ga, double b, double gb, double tol) {
    if (ga == 0.0) return a;
    if (gb == 0.0) return b;
    double width = std::abs(b - a);
    bool use_secant = true;
    for (int it = 0; it < 400 && std::abs(b - a) > tol; ++it) {
        double c = use_secant ? (a * gb - b * ga) / (gb - ga) : 0.5 * (a + b);
        if (!(c > std::min(a, b) && c < std::max(a, b))) c = 0.5 * (a + b);
        const double gc = g(c);
        if (gc == 0.0) return c;
        if ((gc > 0.0) == (gb > 0.0)) {
            b = c;
            gb = gc;
        } else {
            a = c;
            ga = gc;
        }
        const double w = std::abs(b - a);
        // Secant steps that fail to halve the bracket are replaced by bisection.
        use_secant = w <= 0.5 * width;
        width = w;
    }
    return b;
}

}  // namespace opticon::ode
