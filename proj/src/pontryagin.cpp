#include "opticon/pontryagin.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "opticon/errors.hpp"
#include "opticon/ode.hpp"

namespace opticon {

double singular_arc_control(double s, const EpidemicParams& params) {
    const double slack = 1e-12;
    if (s < params.herd() - slack || s > params.lock() + slack)
        throw DomainError("singular_arc_control: s outside [gamma/beta, gamma/beta*]");
    return std::clamp(params.gamma() / s, params.beta_star(), params.beta());
}

double CostateTrajectory::total_mu_mass() const {
    double m = 0.0;
    for (const auto& a : mu_atoms) m += a.mass;
    for (std::size_t k = 0; k + 1 < times.size(); ++k)
        m += 0.5 * (mu_density[k] + mu_density_left[k + 1]) * (times[k + 1] - times[k]);
    return m;
}

double CostateTrajectory::atom_mass_at(double t, double tol) const {
    double m = 0.0;
    for (const auto& a : mu_atoms)
        if (std::abs(a.time - t) <= tol * std::max(1.0, std::abs(t))) m += a.mass;
    return m;
}

namespace {

std::size_t knot_index(const std::vector<double>& times, double t) {
    auto it = std::lower_bound(times.begin(), times.end(), t);
    std::size_t best = std::numeric_limits<std::size_t>::max();
    double gap = std::numeric_limits<double>::infinity();
    for (auto cand : {it, it == times.begin() ? it : std::prev(it)}) {
        if (cand == times.end()) continue;
        const double d = std::abs(*cand - t);
        if (d < gap) {
            gap = d;
            best = static_cast<std::size_t>(cand - times.begin());
        }
    }
    if (!(gap <= 1e-8 * std::max(1.0, std::abs(t)))) throw DomainError("trajectory grid has no knot at a switching time");
    return best;
}

// Backward run of the mu-free adjoint system under a constant control, over
// [t_lo, t_hi], in reversed time tau = t_hi - t.
struct AdjointRun {
    double t_hi;
    std::vector<ode::DensePiece<2>> pieces;
    ode::Vec<2> end;

    ode::Vec<2> at(double t) const {
        const double tau = t_hi - t;
        if (pieces.empty()) return end;
        auto it = std::upper_bound(pieces.begin(), pieces.end(), tau,
                                   [](double x, const ode::DensePiece<2>& p) { return x < p.t0; });
        if (it != pieces.begin()) --it;
        return it->eval(std::clamp(tau, it->t0, it->t1));
    }
};

AdjointRun adjoint_backward(const Trajectory& tr, double b, double t_hi, double t_lo, ode::Vec<2> p_hi,
                            const EpidemicParams& params) {
    AdjointRun run{t_hi, {}, p_hi};
    if (!(t_hi > t_lo)) return run;
    const double g = params.gamma();
    auto rhs = [&](double tau, const ode::Vec<2>& p) {
        const SirState x = tr.state_at(t_hi - tau);
        const double eta = p[1] - p[0];
        const double dps = -eta * b * x.i;
        const double dpi = -(eta * b * x.s - g * p[1]);
        return ode::Vec<2>{-dps, -dpi};
    };
    ode::StepOptions so;
    so.rtol = 1e-12;
    so.atol = 1e-12;
    so.max_step = 0.5;
    ode::integrate_dp5<2>(rhs, 0.0, p_hi, t_hi - t_lo, so, [&](const ode::DensePiece<2>& piece, const ode::Vec<2>& y) {
        run.pieces.push_back(piece);
        run.end = y;
        return true;
    });
    return run;
}

}  // namespace

CostateTrajectory synthesize_costates(const SynthesisResult& result, const CostWeights& weights,
                                      const EpidemicParams& params) {
    if (!(weights.lambda2 > 0.0)) throw DomainError("synthesize_costates requires lambda2 > 0");
    const Trajectory& tr = result.trajectory;
    const std::size_t n = tr.size();
    CostateTrajectory c;
    c.times = tr.times();
    c.p_s.assign(n, 0.0);
    c.p_i.assign(n, 0.0);
    c.eta.assign(n, 0.0);
    c.psi.assign(n, 0.0);
    c.mu_density.assign(n, 0.0);
    c.mu_density_left.assign(n, 0.0);
    c.p0 = 1.0;
    c.p1 = 0.0;
    c.k = weights.lambda1;
    if (!result.switching.tau2) return c;

    const double l2 = weights.lambda2, beta = params.beta(), g = params.gamma(), iM = params.i_M();
    const double P = l2 * beta / (g * iM);
    const std::size_t k0 = knot_index(c.times, *result.switching.tau0);
    const std::size_t k1 = knot_index(c.times, *result.switching.tau1);
    const std::size_t k2 = knot_index(c.times, *result.switching.tau2);
    auto arc_ps = [&](double s) { return l2 / iM * (beta / g - 1.0 / s); };

    for (std::size_t k = k1; k <= k2; ++k) {
        const double ps = arc_ps(tr.states()[k].s);
        if (k < k2) {
            c.p_s[k] = ps;
            c.p_i[k] = P;
            c.mu_density[k] = g * ps;
        }
        if (k > k1) c.mu_density_left[k] = g * ps;
    }

    if (k1 > 0) {
        const double t1 = c.times[k1], t0 = c.times[k0];
        const double ps1 = arc_ps(tr.states()[k1].s);
        double m = 0.0;
        AdjointRun plateau{t1, {}, {ps1, P}};
        if (k1 > k0) {
            auto psi_at_t0 = [&](double mass) {
                const AdjointRun r = adjoint_backward(tr, params.beta_star(), t1, t0, {ps1, P + mass}, params);
                const SirState x = tr.states()[k0];
                return (r.end[1] - r.end[0]) * x.s * x.i;
            };
            // The adjoint system is linear, so psi(tau0) is affine in the mass.
            const double a = psi_at_t0(0.0), b1 = psi_at_t0(1.0);
            m = (l2 - a) / (b1 - a);
            plateau = adjoint_backward(tr, params.beta_star(), t1, t0, {ps1, P + m}, params);
            c.mu_atoms.push_back({t1, m});
        }
        for (std::size_t k = k0; k < k1; ++k) {
            const auto p = plateau.at(c.times[k]);
            c.p_s[k] = p[0];
            c.p_i[k] = p[1];
        }
        const AdjointRun head = adjoint_backward(tr, beta, t0, 0.0, plateau.at(t0), params);
        for (std::size_t k = 0; k < k0; ++k) {
            const auto p = head.at(c.times[k]);
            c.p_s[k] = p[0];
            c.p_i[k] = p[1];
        }
    }
    c.mu_atoms.push_back({c.times[k2], P});

    for (std::size_t k = 0; k < n; ++k) {
        c.eta[k] = c.p_i[k] - c.p_s[k];
        c.psi[k] = c.eta[k] * tr.states()[k].s * tr.states()[k].i;
    }
    return c;
}

// ---------------------------------------------------------------------------

bool VerificationReport::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

const CheckResult& VerificationReport::at(const std::string& name) const {
    for (const auto& c : checks)
        if (c.name == name) return c;
    throw std::out_of_range("no verification check named " + name);
}

namespace {

// Integral over [t[j], t[j+1]] of the cubic through up to four neighbouring
// samples inside [lo, hi] (indices), by 3-point Gauss-Legendre.
template <class F>
double local_integral(const std::vector<double>& t, std::size_t j, std::size_t lo, std::size_t hi, F&& f) {
    std::size_t start = j > lo ? j - 1 : lo;
    std::size_t count = std::min<std::size_t>(4, hi - lo + 1);
    if (start + count - 1 > hi) start = hi + 1 - count;
    std::array<double, 4> xs{}, ys{};
    for (std::size_t q = 0; q < count; ++q) {
        xs[q] = t[start + q];
        ys[q] = f(start + q);
    }
    auto poly = [&](double x) {
        double acc = 0.0;
        for (std::size_t a = 0; a < count; ++a) {
            double l = 1.0;
            for (std::size_t b = 0; b < count; ++b)
                if (b != a) l *= (x - xs[b]) / (xs[a] - xs[b]);
            acc += ys[a] * l;
        }
        return acc;
    };
    static constexpr double r = 0.7745966692414834;
    const double a = t[j], b = t[j + 1], mid = 0.5 * (a + b), half = 0.5 * (b - a);
    return half * (5.0 / 9.0 * poly(mid - r * half) + 8.0 / 9.0 * poly(mid) + 5.0 / 9.0 * poly(mid + r * half));
}

}  // namespace

VerificationReport verify_extremal(const SynthesisResult& result, const CostateTrajectory& c,
                                   const CostWeights& weights, const EpidemicParams& params, double tol) {
    const Trajectory& tr = result.trajectory;
    const std::size_t n = tr.size();
    if (c.times.size() != n) throw DomainError("verify_extremal: costate grid does not match trajectory");
    for (std::size_t k = 0; k < n; ++k)
        if (c.times[k] != tr.times()[k]) throw DomainError("verify_extremal: costate grid does not match trajectory");

    const ControlSchedule& sch = result.schedule;
    const double l1 = weights.lambda1, l2 = weights.lambda2;
    const double beta = params.beta(), bstar = params.beta_star(), g = params.gamma(), iM = params.i_M();
    const auto& t = c.times;
    const auto& X = tr.states();

    auto ham = [&](double b, double psi, double p_i, double i) {
        return c.p0 * (l1 + l2 * (beta - b)) + psi * b - g * p_i * i;
    };

    VerificationReport rep;
    auto add = [&](std::string name, double residual, double limit, bool ok) {
        rep.checks.push_back({std::move(name), ok, residual, limit});
    };

    // (P1)
    const double mass = c.total_mu_mass();
    add("P1_nondegeneracy", c.p0 + mass + c.p1, 0.0, c.p0 + mass + c.p1 > 0.0);

    // (P2)
    double comp = 0.0;
    for (const auto& a : c.mu_atoms) comp += a.mass * (tr.state_at(a.time).i - iM);
    for (std::size_t k = 0; k + 1 < n; ++k)
        comp += 0.5 * ((X[k].i - iM) * c.mu_density[k] + (X[k + 1].i - iM) * c.mu_density_left[k + 1]) * (t[k + 1] - t[k]);
    add("P2_complementarity", std::abs(comp), tol, std::abs(comp) <= tol);

    // Pieces between control switches and atoms.
    std::vector<std::size_t> cuts{0, n - 1};
    for (double bp : sch.breakpoints())
        if (bp > t.front() && bp < t.back()) cuts.push_back(knot_index(t, bp));
    for (const auto& a : c.mu_atoms)
        if (a.time > t.front() && a.time < t.back()) cuts.push_back(knot_index(t, a.time));
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    double r_ps = 0.0, r_pi = 0.0, r_psi = 0.0;
    for (std::size_t q = 0; q + 1 < cuts.size(); ++q) {
        const std::size_t lo = cuts[q], hi = cuts[q + 1];
        const auto idx = sch.segment_index(0.5 * (t[lo] + t[hi]));
        // Samples seen from inside the piece: left limits at its right end.
        auto pi_in = [&](std::size_t j) { return j == hi ? c.p_i[j] + c.atom_mass_at(t[j]) : c.p_i[j]; };
        auto mu_in = [&](std::size_t j) { return j == hi ? c.mu_density_left[j] : c.mu_density[j]; };
        auto eta_in = [&](std::size_t j) { return pi_in(j) - c.p_s[j]; };
        auto psi_in = [&](std::size_t j) { return eta_in(j) * X[j].s * X[j].i; };
        auto b_in = [&](std::size_t j) { return sch.value_on(idx, t[j]); };

        for (std::size_t j = lo; j < hi; ++j) {
            const double ips = local_integral(t, j, lo, hi, [&](std::size_t k) { return -eta_in(k) * b_in(k) * X[k].i; });
            const double ipi = local_integral(t, j, lo, hi, [&](std::size_t k) {
                return -(eta_in(k) * b_in(k) * X[k].s - g * pi_in(k)) - mu_in(k);
            });
            const double ipsi = local_integral(t, j, lo, hi, [&](std::size_t k) {
                return X[k].s * X[k].i * (g * c.p_s[k] - mu_in(k));
            });
            r_ps = std::max(r_ps, std::abs(c.p_s[j + 1] - c.p_s[j] - ips));
            r_pi = std::max(r_pi, std::abs(pi_in(j + 1) - pi_in(j) - ipi));
            r_psi = std::max(r_psi, std::abs(psi_in(j + 1) - psi_in(j) - ipsi));
        }
    }
    const double r_adj = std::max(r_ps, r_pi);
    add("P3_adjoint", r_adj, tol, r_adj <= tol);

    // (P4), (P5), switching law, signs.
    double margin = 0.0, drift = 0.0, sw = 0.0, eta_neg = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double b = sch.value(t[k]);
        const double h = ham(b, c.psi[k], c.p_i[k], X[k].i);
        double hmin = std::numeric_limits<double>::infinity();
        for (int q = 0; q <= 100; ++q) hmin = std::min(hmin, ham(bstar + (beta - bstar) * q / 100.0, c.psi[k], c.p_i[k], X[k].i));
        margin = std::max(margin, h - hmin);
        drift = std::max(drift, std::abs(h - c.k));
        if (c.psi[k] < c.p0 * l2 - tol) sw = std::max(sw, std::abs(b - beta));
        if (c.psi[k] > c.p0 * l2 + tol) sw = std::max(sw, std::abs(b - bstar));
        eta_neg = std::max(eta_neg, -c.eta[k]);
    }
    add("P4_minimality", margin, tol, margin <= tol);
    add("P5_hamiltonian", drift, tol, drift <= tol);

    const double trans = std::max(std::abs(c.p_s.back() - c.p1), std::abs(c.p_i.back()));
    add("transversality", trans, tol, trans <= tol);
    add("eta_sign", eta_neg, tol, eta_neg <= tol);
    add("switching_law", sw, tol, sw <= tol);
    add("dpsi_identity", r_psi, tol, r_psi <= tol);

    double mu_neg = 0.0, off_support = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        mu_neg = std::max({mu_neg, -c.mu_density[k], -c.mu_density_left[k]});
        if (X[k].i < iM - 1e-8) off_support = std::max({off_support, c.mu_density[k], c.mu_density_left[k]});
    }
    for (const auto& a : c.mu_atoms) {
        mu_neg = std::max(mu_neg, -a.mass);
        if (std::abs(tr.state_at(a.time).i - iM) > 1e-8) off_support = std::max(off_support, a.mass);
    }
    add("mu_nonnegative", mu_neg, tol, mu_neg <= tol);
    add("mu_support", off_support, tol, off_support <= tol);

    double ps_bad = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        ps_bad = std::max(ps_bad, -c.p_s[k]);
        if (k + 1 < n) ps_bad = std::max(ps_bad, c.p_s[k + 1] - c.p_s[k]);
    }
    add("p_s_monotone_nonnegative", ps_bad, tol, ps_bad <= tol);

    // H is continuous across atoms once p_i is taken from the left.
    double atom_gap = 0.0;
    for (const auto& a : c.mu_atoms) {
        const std::size_t k = knot_index(t, a.time);
        if (k == 0) continue;
        const double b_left = sch.value_on(sch.segment_index(0.5 * (t[k - 1] + t[k])), t[k]);
        const double pi_left = c.p_i[k] + a.mass;
        const double psi_left = (pi_left - c.p_s[k]) * X[k].s * X[k].i;
        atom_gap = std::max(atom_gap, std::abs(ham(b_left, psi_left, pi_left, X[k].i) - c.k));
    }
    add("atom_hamiltonian_continuity", atom_gap, tol, atom_gap <= tol);
    return rep;
}

}  // namespace opticon
