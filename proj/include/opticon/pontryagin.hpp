#pragma once

// Costates along a synthesized optimal trajectory and a numerical check of
// the necessary conditions. Conventions: H = lambda1 + lambda2 (beta - b)
// + psi b - gamma p_i i with psi = eta s i, eta = p_i - p_s, and
//   dp_s = -eta b i dt,  dp_i = -(eta b s - gamma p_i) dt - dmu.
// All costate samples are right-continuous.

#include <string>
#include <vector>

#include "opticon/params.hpp"
#include "opticon/synthesis.hpp"

namespace opticon {

struct MuAtom {
    double time;
    double mass;
};

struct CostateTrajectory {
    std::vector<double> times;
    std::vector<double> p_s;
    std::vector<double> p_i;
    std::vector<double> eta;
    std::vector<double> psi;
    std::vector<double> mu_density;       // dmu/dt, right limit
    std::vector<double> mu_density_left;  // dmu/dt, left limit (differs at switching times)
    std::vector<MuAtom> mu_atoms;
    double p0 = 1.0;
    double p1 = 0.0;
    double k = 0.0;

    /// Sum of atoms plus the integral of the density (trapezoid on the grid).
    double total_mu_mass() const;
    double atom_mass_at(double t, double tol = 1e-9) const;
};

/// p0 = 1, p1 = 0, k = lambda1. Zero costates after tau2 and an atom of mass
/// lambda2 beta / (gamma i_M) there; on the boundary arc p_i is constant and
/// dmu = gamma p_s dt; before tau1 the adjoint system is integrated backward
/// with mu = 0. When a beta* phase precedes the arc, a second atom sits at
/// tau1 with the mass that makes psi(tau0) = lambda2.
/// Pure-beta solutions get the zero costate (psi = 0 < lambda2, mu = 0).
CostateTrajectory synthesize_costates(const SynthesisResult& result, const CostWeights& weights,
                                      const EpidemicParams& params);

struct CheckResult {
    std::string name;
    bool passed;
    double residual;
    double tolerance;
};

struct VerificationReport {
    std::vector<CheckResult> checks;

    bool passed() const;
    /// Throws std::out_of_range for an unknown name.
    const CheckResult& at(const std::string& name) const;
};

/// Checks, each against `tol`:
///   P1 nondegeneracy, P2 complementarity, P3 adjoint residual, P4 minimality
///   (101-point scan of b), P5 Hamiltonian drift, transversality, eta sign,
///   switching law, dpsi identity, mu sign, mu support, p_s monotone and
///   nonnegative, Hamiltonian continuity across atoms.
/// The control is read from result.schedule, so a corrupted schedule shows up
/// in P4 and the switching law.
VerificationReport verify_extremal(const SynthesisResult& result, const CostateTrajectory& costates,
                                   const CostWeights& weights, const EpidemicParams& params, double tol);

/// gamma / s on [gamma/beta, gamma/beta*]; DomainError outside.
double singular_arc_control(double s, const EpidemicParams& params);

}  // namespace opticon
