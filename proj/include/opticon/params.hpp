#pragma once

// Model constants and the phase-space point of the ICU-constrained SIR problem.

namespace opticon {

/// Default mixed relative/absolute integration tolerance.
inline constexpr double kDefaultTol = 1e-9;
/// Time tolerance used when locating events.
inline constexpr double kEventTol = 1e-10;

/// Rates beta_star < beta (1/day), recovery gamma (1/day), ICU capacity i_M.
///
/// Construction validates 0 < beta_star < beta, gamma > 0, 0 < i_M < 1 and
/// the standing assumption s_M* <= 1 (the feasible boundary reaches i = 0
/// inside the unit interval).
class EpidemicParams {
public:
    EpidemicParams(double beta_star, double beta, double gamma, double i_M);

    double beta_star() const noexcept { return beta_star_; }
    double beta() const noexcept { return beta_; }
    double gamma() const noexcept { return gamma_; }
    double i_M() const noexcept { return i_M_; }

    /// Herd-immunity threshold gamma/beta.
    double herd() const noexcept { return gamma_ / beta_; }
    /// Lockdown threshold gamma/beta_star.
    double lock() const noexcept { return gamma_ / beta_star_; }

    bool admissible(double b, double slack = 1e-12) const noexcept;

    /// beta=0.16, gamma=0.06, beta_star=0.08, i_M=0.02.
    static EpidemicParams reference();

private:
    double beta_star_;
    double beta_;
    double gamma_;
    double i_M_;
};

/// Running cost lambda1 + lambda2 (beta - b).
struct CostWeights {
    double lambda1 = 0.0;
    double lambda2 = 1.0;

    CostWeights() = default;
    CostWeights(double l1, double l2);
};

/// A point of the simplex s, i >= 0, s + i <= 1.
struct SirState {
    double s = 0.0;
    double i = 0.0;

    SirState() = default;
    SirState(double s_, double i_);

    /// Build without the simplex check; used for intermediate numerical states.
    static SirState unchecked(double s_, double i_) noexcept;
};

}  // namespace opticon
