#include "opticon/params.hpp"

#include <cmath>
#include <sstream>

#include "opticon/errors.hpp"

namespace opticon {

EpidemicParams::EpidemicParams(double beta_star, double beta, double gamma, double i_M)
    : beta_star_(beta_star), beta_(beta), gamma_(gamma), i_M_(i_M) {
    if (!(beta_star > 0.0 && beta_star < beta))
        throw DomainError("EpidemicParams: require 0 < beta_star < beta");
    if (!(gamma > 0.0)) throw DomainError("EpidemicParams: require gamma > 0");
    if (!(i_M > 0.0 && i_M < 1.0)) throw DomainError("EpidemicParams: require 0 < i_M < 1");
    // s_M* <= 1 iff the feasible-boundary branch is already non-positive at s = 1;
    // the branch is decreasing above gamma/beta_star.
    const double L = lock();
    const double at_one = i_M - 1.0 + L + L * std::log(1.0 / L);
    if (!(L < 1.0) || at_one > 0.0) {
        std::ostringstream msg;
        msg << "EpidemicParams: standing assumption s_M* <= 1 violated (gamma/beta_star = " << L
            << ", boundary value at s=1 is " << at_one << ")";
        throw DomainError(msg.str());
    }
}

bool EpidemicParams::admissible(double b, double slack) const noexcept {
    const double pad = slack * beta_;
    return b >= beta_star_ - pad && b <= beta_ + pad;
}

EpidemicParams EpidemicParams::reference() { return {0.08, 0.16, 0.06, 0.02}; }

CostWeights::CostWeights(double l1, double l2) : lambda1(l1), lambda2(l2) {
    if (!(l1 >= 0.0 && l2 >= 0.0) || (l1 == 0.0 && l2 == 0.0))
        throw DomainError("CostWeights: need lambda1, lambda2 >= 0, one strictly positive");
}

SirState::SirState(double s_, double i_) : s(s_), i(i_) {
    if (!(s_ >= 0.0 && i_ >= 0.0 && s_ + i_ <= 1.0 + 1e-12))
        throw DomainError("SirState: point outside the simplex s, i >= 0, s + i <= 1");
}

SirState SirState::unchecked(double s_, double i_) noexcept {
    SirState out;
    out.s = s_;
    out.i = i_;
    return out;
}

}  // namespace opticon
