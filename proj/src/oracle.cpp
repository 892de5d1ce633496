#include "opticon/oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>

#include "opticon/errors.hpp"

namespace opticon {

void TranscriptionProblem::validate() const {
    if (n_intervals < 10) throw DomainError("transcription requires n_intervals >= 10");
    if (!(t_f > 0.0)) throw DomainError("transcription requires t_f > 0");
    if (!(penalty_weight > 0.0)) throw DomainError("transcription requires penalty_weight > 0");
}

ControlSchedule transcription_schedule(const TranscriptionProblem& problem, const std::vector<double>& values) {
    const double dt = problem.t_f / static_cast<double>(values.size());
    std::vector<ControlSegment> segs;
    segs.reserve(values.size());
    for (std::size_t k = 0; k < values.size(); ++k) {
        const double a = dt * static_cast<double>(k);
        const double b = k + 1 == values.size() ? problem.t_f : dt * static_cast<double>(k + 1);
        segs.push_back({a, b, ConstantLaw{values[k]}});
    }
    return ControlSchedule(problem.params, std::move(segs), problem.params.beta());
}

namespace {

// Fixed-step RK4 model of the transcription with cached interval states, so
// changing control k only re-simulates intervals k..n-1.
class Evaluator {
public:
    Evaluator(const TranscriptionProblem& pb, int substeps)
        : pb_(pb),
          n_(pb.n_intervals),
          sub_(substeps),
          dt_(pb.t_f / pb.n_intervals),
          h_(dt_ / substeps),
          target_(pb.params.herd() - kTerminalMargin),
          x_(n_ + 1),
          pen_(n_ + 1),
          xs_(n_ + 1),
          ps_(n_ + 1) {}

    double dt() const { return dt_; }

    void reset(const std::vector<double>& u) {
        x_[0] = pb_.state0;
        pen_[0] = 0.0;
        for (int k = 0; k < n_; ++k) {
            x_[k + 1] = x_[k];
            pen_[k + 1] = pen_[k] + interval(x_[k + 1], u[k], nullptr);
        }
    }

    double penalty() const { return pen_[n_] + terminal(x_[n_]); }

    /// Penalty if u[k] is replaced by b; the path is kept in scratch. The
    /// running penalty only grows, so the trial stops (returning a value
    /// above `budget`) as soon as it exceeds the budget.
    double trial(const std::vector<double>& u, int k, double b, double budget) {
        xs_[k] = x_[k];
        ps_[k] = pen_[k];
        for (int j = k; j < n_; ++j) {
            xs_[j + 1] = xs_[j];
            ps_[j + 1] = ps_[j] + interval(xs_[j + 1], j == k ? b : u[j], nullptr);
            if (ps_[j + 1] > budget) return ps_[j + 1];
        }
        return ps_[n_] + terminal(xs_[n_]);
    }

    void commit(int k) {
        std::copy(xs_.begin() + k + 1, xs_.end(), x_.begin() + k + 1);
        std::copy(ps_.begin() + k + 1, ps_.end(), pen_.begin() + k + 1);
    }

    double violation(const std::vector<double>& u) const {
        SirState x = pb_.state0;
        double peak = x.i;
        for (int k = 0; k < n_; ++k) interval(x, u[k], &peak);
        return std::max({0.0, peak - pb_.params.i_M(), x.s - pb_.params.herd()});
    }

private:
    double interval(SirState& x, double b, double* peak) const {
        const double g = pb_.params.gamma(), iM = pb_.params.i_M();
        auto f = [&](double s, double i) { return std::array<double, 2>{-b * s * i, b * s * i - g * i}; };
        double pen = 0.0;
        for (int q = 0; q < sub_; ++q) {
            const auto k1 = f(x.s, x.i);
            const auto k2 = f(x.s + 0.5 * h_ * k1[0], x.i + 0.5 * h_ * k1[1]);
            const auto k3 = f(x.s + 0.5 * h_ * k2[0], x.i + 0.5 * h_ * k2[1]);
            const auto k4 = f(x.s + h_ * k3[0], x.i + h_ * k3[1]);
            x.s += h_ / 6.0 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]);
            x.i += h_ / 6.0 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]);
            const double v = std::max(0.0, (x.i - iM) / iM);
            pen += h_ * v * v;
            if (peak) *peak = std::max(*peak, x.i);
        }
        return pen;
    }

    double terminal(const SirState& x) const {
        const double v = std::max(0.0, (x.s - target_) / pb_.params.herd());
        return pb_.t_f * v * v;
    }

    const TranscriptionProblem& pb_;
    int n_;
    int sub_;
    double dt_;
    double h_;
    double target_;
    std::vector<SirState> x_;
    std::vector<double> pen_;
    std::vector<SirState> xs_;
    std::vector<double> ps_;
};

double control_cost(const TranscriptionProblem& pb, const std::vector<double>& u, double dt) {
    double acc = 0.0;
    for (double b : u) acc += pb.params.beta() - b;
    return pb.weights.lambda1 * pb.t_f + pb.weights.lambda2 * acc * dt;
}

BaselineSolution descend(const TranscriptionProblem& pb, std::vector<double> u, const TranscriptionOptions& opt,
                         int index) {
    const double lo = pb.params.beta_star(), hi = pb.params.beta();
    Evaluator ev(pb, opt.substeps);
    ev.reset(u);
    const double dt = ev.dt();
    double w = pb.penalty_weight;
    double J = control_cost(pb, u, dt);
    double F = J + w * ev.penalty();

    for (int round = 0; round < opt.rounds; ++round) {
        if (round > 0) {
            w *= opt.escalation;
            F = J + w * ev.penalty();
        }
        double step = (hi - lo) / (round == 0 ? 4.0 : 16.0);
        for (int sweep = 0; sweep < opt.max_sweeps && step > 1e-8 * (hi - lo); ++sweep) {
            bool improved = false;
            for (int k = 0; k < pb.n_intervals; ++k) {
                for (double dir : {+1.0, -1.0}) {
                    const double cand = std::clamp(u[k] + dir * step, lo, hi);
                    if (cand == u[k]) continue;
                    const double Jn = J - pb.weights.lambda2 * (cand - u[k]) * dt;
                    const double bar = F - 1e-15 * std::abs(F);
                    if (Jn >= bar) continue;
                    const double Fn = Jn + w * ev.trial(u, k, cand, (bar - Jn) / w);
                    if (Fn < bar) {
                        ev.commit(k);
                        u[k] = cand;
                        J = Jn;
                        F = Fn;
                        improved = true;
                        break;
                    }
                }
            }
            if (!improved) step *= 0.5;
        }
    }
    BaselineSolution out;
    out.cost = control_cost(pb, u, dt);
    out.max_violation = ev.violation(u);
    out.objective = F;
    out.start_index = index;
    out.control_values = std::move(u);
    return out;
}

std::vector<double> interval_averages(const ControlSchedule& sch, int n, double t_f) {
    const double dt = t_f / n;
    constexpr int kSamples = 32;
    std::vector<double> u(n);
    for (int k = 0; k < n; ++k) {
        double acc = 0.0;
        for (int q = 0; q < kSamples; ++q) acc += sch.value(dt * (k + (q + 0.5) / kSamples));
        u[k] = std::clamp(acc / kSamples, sch.params().beta_star(), sch.params().beta());
    }
    return u;
}

}  // namespace

BaselineSolution solve_transcription(const TranscriptionProblem& problem, std::uint64_t seed,
                                     const TranscriptionOptions& opt) {
    problem.validate();
    const int n = problem.n_intervals;
    const double lo = problem.params.beta_star(), hi = problem.params.beta();

    std::vector<double> bopt(n, 0.5 * (lo + hi));
    try {
        const SynthesisResult r = optimal_open_loop(problem.state0, problem.t_f, problem.params, problem.weights);
        bopt = interval_averages(r.schedule, n, problem.t_f);
    } catch (const std::exception&) {
        // No synthesized control for this start: the b^opt starts fall back to the midpoint.
    }

    std::vector<std::vector<double>> starts;
    starts.push_back(bopt);
    starts.emplace_back(n, hi);
    starts.emplace_back(n, lo);
    starts.emplace_back(n, 0.5 * (lo + hi));
    for (std::uint64_t j = 0; j < 4; ++j) {
        std::seed_seq seq{seed, j};
        std::mt19937_64 rng(seq);
        std::uniform_real_distribution<double> jitter(-0.1 * (hi - lo), 0.1 * (hi - lo));
        std::vector<double> u = bopt;
        for (double& b : u) b = std::clamp(b + jitter(rng), lo, hi);
        starts.push_back(std::move(u));
    }

    const int m = static_cast<int>(starts.size());
    std::vector<BaselineSolution> results(m);
#pragma omp parallel for schedule(dynamic, 1) if (opt.parallel)
    for (int k = 0; k < m; ++k) results[k] = descend(problem, starts[k], opt, k);

    std::size_t best = 0;
    for (std::size_t k = 1; k < results.size(); ++k)
        if (results[k].objective < results[best].objective) best = k;
    return results[best];
}

std::optional<ControlSchedule> sample_admissible_perturbation(const SynthesisResult& result, double magnitude,
                                                              std::uint64_t seed) {
    if (magnitude < 0.0) throw DomainError("perturbation magnitude must be >= 0");
    if (magnitude == 0.0) return result.schedule;

    const EpidemicParams& p = result.params;
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> count(1, 3);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::uniform_real_distribution<double> width(2.0, 30.0);
    const double horizon = std::min(result.t_f, result.switching.reaching_time + 30.0);
    std::uniform_real_distribution<double> center(0.0, horizon);

    std::vector<Bump> bumps;
    const int nb = count(rng);
    for (int k = 0; k < nb; ++k) {
        const double c = center(rng);
        const double hw = width(rng);
        const double amp = unit(rng) * magnitude * (p.beta() - p.beta_star());
        bumps.push_back({c, hw, amp});
    }
    ControlSchedule sch = result.schedule.with_bumps(std::move(bumps));

    const Trajectory tr = integrate(result.state0, sch, 0.0, result.t_f, 1e-11, p, 0.5);
    double peak = tr.max_i();
    for (std::size_t k = 0; k + 1 < tr.size(); ++k)
        peak = std::max(peak, tr.state_at(0.5 * (tr.times()[k] + tr.times()[k + 1])).i);
    if (peak > p.i_M() + 1e-10) return std::nullopt;
    if (!(tr.back().s < p.herd())) return std::nullopt;
    return sch;
}

}  // namespace opticon
