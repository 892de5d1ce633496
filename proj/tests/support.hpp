#pragma once

// Shared helpers for the test binaries: a seeded case generator and a
// fixed-step RK4 integrator that shares no code with the library, used as an
// independent oracle.

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "opticon/params.hpp"
#include "opticon/zones.hpp"

namespace testkit {

inline opticon::EpidemicParams ref() { return opticon::EpidemicParams(0.08, 0.16, 0.06, 0.02); }

class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}
    double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng_); }
    int integer(int a, int b) { return std::uniform_int_distribution<int>(a, b)(rng_); }

    /// Point of B with i > 0, s in [s_lo, s_hi].
    opticon::SirState feasible(const opticon::EpidemicParams& p, double s_lo = 0.05, double s_hi = 0.99,
                               double i_lo = 1e-4) {
        for (;;) {
            const double s = uniform(s_lo, s_hi);
            const double top = std::min(opticon::phi_B(s, p), 1.0 - s);
            if (top <= i_lo) continue;
            return {s, uniform(i_lo, top)};
        }
    }

    /// Point strictly inside A with i > 0.
    opticon::SirState inside_A(const opticon::EpidemicParams& p, double i_lo = 1e-5) {
        for (;;) {
            const double s = uniform(0.02, 0.98);
            const double top = std::min(opticon::phi_A(s, p), 1.0 - s) * 0.999;
            if (top <= i_lo) continue;
            return {s, uniform(i_lo, top)};
        }
    }

private:
    std::mt19937_64 rng_;
};

struct Sample {
    double t, s, i;
};

using Law = std::function<double(double t, double s, double i)>;

/// Classical RK4 with step h from t0 to t1 (t1 > t0); the control is frozen
/// at its value at the start of each step.
inline std::vector<Sample> rk4(double s, double i, const Law& law, double t0, double t1, double h, double gamma) {
    std::vector<Sample> out{{t0, s, i}};
    double t = t0;
    while (t < t1 - 1e-12) {
        const double dt = std::min(h, t1 - t);
        const double b = law(t, s, i);
        auto f = [&](double ss, double ii, double& ds, double& di) {
            ds = -b * ss * ii;
            di = b * ss * ii - gamma * ii;
        };
        double a1, c1, a2, c2, a3, c3, a4, c4;
        f(s, i, a1, c1);
        f(s + 0.5 * dt * a1, i + 0.5 * dt * c1, a2, c2);
        f(s + 0.5 * dt * a2, i + 0.5 * dt * c2, a3, c3);
        f(s + dt * a3, i + dt * c3, a4, c4);
        s += dt / 6 * (a1 + 2 * a2 + 2 * a3 + a4);
        i += dt / 6 * (c1 + 2 * c2 + 2 * c3 + c4);
        t += dt;
        out.push_back({t, s, i});
    }
    return out;
}

/// First time g(s, i) changes sign along an RK4 path, linearly interpolated.
inline double first_crossing(const std::vector<Sample>& path, const std::function<double(double, double)>& g) {
    const double g0 = g(path[0].s, path[0].i);
    for (std::size_t k = 1; k < path.size(); ++k) {
        const double g1 = g(path[k].s, path[k].i);
        if ((g1 > 0) != (g0 > 0) || g1 == 0.0) {
            const double ga = g(path[k - 1].s, path[k - 1].i);
            const double w = ga / (ga - g1);
            return path[k - 1].t + w * (path[k].t - path[k - 1].t);
        }
    }
    return NAN;
}

}  // namespace testkit
