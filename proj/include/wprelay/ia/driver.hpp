#pragma once

// Two-phase iterative driver: successively solve the feasibility-phase
// program until the AC-computing margin is nonnegative, then refine the
// max-min rate until the objective stalls. Each iteration solves one cone
// program built at the current expansion point.

#include <chrono>
#include <cmath>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "wprelay/conic/solver.hpp"
#include "wprelay/ia/expansion.hpp"
#include "wprelay/ia/subproblem.hpp"
#include "wprelay/model.hpp"

namespace wprelay::ia {

class feasibility_phase_failed : public numerical_error {
public:
    using numerical_error::numerical_error;
};

class solver_failure : public numerical_error {
public:
    using numerical_error::numerical_error;
};

enum class Phase { Feasibility, Refinement };

struct IterationTrace {
    struct Row {
        int iter = 0;
        Phase phase = Phase::Refinement;
        double objective = 0.0;        // eta (feasibility) or r (refinement)
        conic::SolveStatus status = conic::SolveStatus::Optimal;
        double tangency_residual = 0.0;
        double millis = 0.0;
    };
    std::vector<Row> rows;
    bool truncated = false;  // stopped early on a numerical failure

    void to_csv(std::ostream& os) const {
        os << "iter,phase,objective,status,tangency_residual,millis\n";
        for (const auto& r : rows)
            os << r.iter << ',' << (r.phase == Phase::Feasibility ? "feasibility" : "refinement")
               << ',' << r.objective << ',' << conic::to_string(r.status) << ','
               << r.tangency_residual << ',' << r.millis << '\n';
    }
    int count(Phase p) const {
        int c = 0;
        for (const auto& r : rows) c += r.phase == p ? 1 : 0;
        return c;
    }
};

struct IaOptions {
    ComputingMode mode = ComputingMode::ACC;
    bool sic = true;
    Pins pins;
    double rate_tol_abs = 1e-4;   // stop when |r' - r| <= max(abs, rel |r|)
    double rate_tol_rel = 1e-3;
    int max_refinement_iters = 100;
    int max_feasibility_iters = 20;
    conic::SolverSettings solver;
};

struct IaResult {
    Allocation alloc;
    RateReport rates;
    PowerReport powers;
    IterationTrace trace;
    ExpansionPoint final_point;
    double objective = 0.0;  // converged reformulated rate r [nats/s/Hz]
};

namespace detail {

/// Largest relative tangency gap across all surrogates at `ep` — a cheap
/// per-iteration diagnostic that the linearizations are consistent.
inline double tangency_residual(const ExpansionPoint& ep, const ChannelSet& chan,
                                const SystemParams& params, bool sic) {
    double worst = 0.0;
    auto rel = [](double approx, double exact) {
        return std::abs(approx - exact) / std::max(1.0, std::abs(exact));
    };
    for (int k = 0; k < chan.num_pairs(); ++k) {
        const RateSurrogate r1 = surrogate_rate(ep, 0, k);
        const RateSurrogate r2 = surrogate_rate(ep, 1, k);
        worst = std::max(worst, rel(r1.eval(ep.psi1[k], ep.tau1),
                                    RateSurrogate::exact(ep.psi1[k], ep.tau1)));
        worst = std::max(worst, rel(r2.eval(ep.psi2[k], ep.tau2),
                                    RateSurrogate::exact(ep.psi2[k], ep.tau2)));
        const SinrSurrogate hs = surrogate_h(ep, chan, params, k, sic);
        worst = std::max(worst, rel(hs.eval(ep.p, ep.alpha1, k),
                                    exact_h(chan, params, ep.p, ep.alpha1, k, sic)));
    }
    const HarvestSurrogate hv = surrogate_harvest(ep, chan);
    worst = std::max(worst, rel(hv.eval(ep.p, ep.alpha2),
                                HarvestSurrogate::exact(chan, ep.p, ep.alpha2)));
    const FtildeSurrogate ft = surrogate_ftilde(ep);
    worst = std::max(worst, rel(ft.eval(ep.vartheta, ep.beta),
                                FtildeSurrogate::exact(ep.vartheta, ep.beta)));
    return worst;
}

inline double now_ms() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double, std::milli>(clock::now().time_since_epoch())
        .count();
}

}  // namespace detail

/// Residuals of the constraint-activeness argument of the reformulation:
/// no SINR or rate row may be violated, the bottleneck pair's rows must
/// bind, and the time / power splits must be used up entirely. For a single
/// pair every row is a bottleneck row, so this reduces to the equalities of
/// the equivalence lemma.
struct ActivenessReport {
    double rate_rows = 0.0;      // |min_k,hop f(psi,tau) - r| / max(|r|, eps)
    double sinr1 = 0.0;          // violation + bottleneck gap of gamma1 psi1 = 1
    double sinr2 = 0.0;          // violation + bottleneck gap of gamma2 psi2 = 1
    double time_split = 0.0;     // |1/tau1 + 1/tau2 - 1|
    double power_split = 0.0;    // |1/alpha1 + 1/alpha2 - 1|

    double worst() const {
        return std::max({rate_rows, sinr1, sinr2, time_split, power_split});
    }
    bool active(double tol = 1e-4) const { return worst() <= tol; }
};

inline ActivenessReport verify_lemma1(const ExpansionPoint& ep, const ChannelSet& chan,
                                      const SystemParams& params, double r,
                                      bool sic = true) {
    ActivenessReport rep;
    const double rscale = std::max(std::abs(r), 1e-8);
    double min_rate_row = std::numeric_limits<double>::infinity();
    double viol1 = 0.0, viol2 = 0.0;        // worst one-sided violation
    double tight1 = std::numeric_limits<double>::infinity();  // bottleneck gap
    double tight2 = std::numeric_limits<double>::infinity();
    for (int k = 0; k < chan.num_pairs(); ++k) {
        min_rate_row = std::min({min_rate_row,
                                 RateSurrogate::exact(ep.psi1[k], ep.tau1),
                                 RateSurrogate::exact(ep.psi2[k], ep.tau2)});
        const double prod1 =
            gamma1(chan, params, ep.p, 1.0 / ep.alpha1, k, sic) * ep.psi1[k];
        const double prod2 = gamma2(chan, params, ep.w, k) * ep.psi2[k];
        viol1 = std::max(viol1, 1.0 - prod1);
        viol2 = std::max(viol2, 1.0 - prod2);
        tight1 = std::min(tight1, std::abs(prod1 - 1.0));
        tight2 = std::min(tight2, std::abs(prod2 - 1.0));
    }
    rep.rate_rows = std::abs(min_rate_row - r) / rscale;
    rep.sinr1 = std::max(viol1, tight1);
    rep.sinr2 = std::max(viol2, tight2);
    rep.time_split = std::abs(1.0 / ep.tau1 + 1.0 / ep.tau2 - 1.0);
    rep.power_split = std::abs(1.0 / ep.alpha1 + 1.0 / ep.alpha2 - 1.0);
    return rep;
}

/// Runs both phases of the iterative algorithm and returns the best point
/// found, evaluated against the exact model.
inline IaResult run(const ChannelSet& chan, const SystemParams& params,
                    const NonlinearEhParams& eh, const IaOptions& options = {}) {
    params.validate();
    eh.validate();
    chan.validate();
    const bool dcc = options.mode == ComputingMode::DCC;
    const double tau0 = options.pins.tau.value_or(0.5);
    // The balanced split starting point quarters the EH input power; when
    // the link budget is tight that can place the whole first subproblem
    // outside the feasible set even though the instance is solvable, so
    // fall back to an EH-favouring start (most of the received power and
    // almost the whole energy split routed into harvesting).
    auto make_start = [&](double alpha_def, double beta_def) {
        const double beta0 =
            dcc ? kMinFraction : options.pins.beta.value_or(beta_def);
        const double alpha0 = options.pins.alpha.value_or(alpha_def);
        return initialize(chan, params, eh, options.sic, tau0, alpha0, beta0,
                          dcc ? params.p_dcc_min : 0.0);
    };
    ExpansionPoint ep = make_start(0.5, 0.5);
    {
        const double pin0 =
            p_in_reformulated(chan, ep.p, ep.alpha2, ep.beta);
        if (pin0 < 1.5 * eh.threshold) {
            ExpansionPoint alt = make_start(0.15, 0.05);
            if (p_in_reformulated(chan, alt.p, alt.alpha2, alt.beta) > pin0)
                ep = alt;
        }
    }

    IaResult result;
    conic::ConeSolver solver(options.solver);
    conic::SolverSettings relaxed = options.solver;
    relaxed.tol = std::max(options.solver.tol, 1e-6);
    conic::ConeSolver fallback(relaxed);

    auto solve_once = [&](const conic::ConeProgram& prog, const VarMap& vm) {
        // The expansion point predicts the solution's magnitudes; renormalize
        // the program around it so the IPM iterates stay O(1).
        const Eigen::VectorXd hint =
            embed_point(ep, vm, prog.n, chan, params, eh);
        conic::ConeSolution sol = solver.solve(prog, hint);
        if (sol.status != conic::SolveStatus::Optimal) {
            conic::ConeSolution retry = fallback.solve(prog, hint);
            if (retry.status == conic::SolveStatus::Optimal) return retry;
        }
        return sol;
    };

    // --- Phase 1: push the AC-computing margin nonnegative (ACC only).
    if (!dcc) {
        bool feasible = false;
        for (int it = 0; it < options.max_feasibility_iters && !feasible; ++it) {
            auto [prog, vm] =
                build_feasibility(ep, chan, params, eh, options.sic, options.pins);
            const double t0 = detail::now_ms();
            conic::ConeSolution sol = solve_once(prog, vm);
            IterationTrace::Row row;
            row.iter = it;
            row.phase = Phase::Feasibility;
            row.status = sol.status;
            row.millis = detail::now_ms() - t0;
            row.tangency_residual =
                detail::tangency_residual(ep, chan, params, options.sic);
            if (sol.status != conic::SolveStatus::Optimal) {
                result.trace.rows.push_back(row);
                throw solver_failure("feasibility-phase subproblem returned " +
                                     std::string(conic::to_string(sol.status)));
            }
            row.objective = sol.obj;
            result.trace.rows.push_back(row);
            ep = extract(sol.x, vm, ep, options.pins, options.mode);
            feasible = sol.obj >= 0.0;
        }
        if (!feasible)
            throw feasibility_phase_failed(
                "AC-computing margin still negative after " +
                std::to_string(options.max_feasibility_iters) + " iterations");
    }

    // --- Phase 2: refine the max-min rate.
    double best_r = -1.0;
    ExpansionPoint best_ep = ep;
    double prev_r = -1.0;
    for (int it = 0; it < options.max_refinement_iters; ++it) {
        auto [prog, vm] = build_subproblem(ep, chan, params, eh, options.mode,
                                           options.sic, options.pins);
        const double t0 = detail::now_ms();
        conic::ConeSolution sol = solve_once(prog, vm);
        IterationTrace::Row row;
        row.iter = it;
        row.phase = Phase::Refinement;
        row.status = sol.status;
        row.millis = detail::now_ms() - t0;
        row.tangency_residual = detail::tangency_residual(ep, chan, params, options.sic);
        if (sol.status != conic::SolveStatus::Optimal) {
            // IA theory keeps the previous iterate feasible, so a failure
            // here is numerical: keep the best point found so far.
            result.trace.truncated = true;
            result.trace.rows.push_back(row);
            if (best_r >= 0.0) break;
            throw solver_failure("refinement subproblem returned " +
                                 std::string(conic::to_string(sol.status)));
        }
        const double r = sol.x[vm.r];
        row.objective = r;
        result.trace.rows.push_back(row);
        ep = extract(sol.x, vm, ep, options.pins, options.mode);
        if (r > best_r) {
            best_r = r;
            best_ep = ep;
        }
        if (prev_r >= 0.0 && std::abs(r - prev_r) <=
                                 std::max(options.rate_tol_abs,
                                          options.rate_tol_rel * std::abs(prev_r)))
            break;
        prev_r = r;
    }

    result.final_point = best_ep;
    result.objective = best_r;
    result.alloc = from_reformulated(best_ep);
    if (dcc) result.alloc.beta = options.pins.beta.value_or(0.0);

    // Numerical repair: if the relay power budget is overshot by solver
    // slack, shrink the beamformers onto the budget boundary (this can only
    // lower second-hop rates, never break any other constraint).
    {
        const double tau = result.alloc.tau;
        const double dc =
            p_dc(chan, eh, result.alloc.p, tau, result.alloc.alpha,
                 dcc ? kMinFraction : result.alloc.beta);
        const double reserve = dcc ? params.p_dcc_min : 0.0;
        const double budget = (dc - params.p_static - reserve) / (1.0 - tau);
        double used = 0.0;
        for (const auto& wk : result.alloc.w) used += wk.squaredNorm();
        if (budget > 0.0 && used > budget) {
            const double scale = std::sqrt(budget / used) * (1.0 - 1e-12);
            for (auto& wk : result.alloc.w) wk *= scale;
        }
    }
    Allocation eval_alloc = result.alloc;
    if (dcc) eval_alloc.beta = kMinFraction;
    auto [rr, pr] = evaluate(chan, params, eh, eval_alloc, options.mode, options.sic);
    result.rates = rr;
    result.powers = pr;
    // Return the equality-tightened reformulation of the output allocation:
    // the solver's iterate can carry slack in the redundant coordinates
    // (psi above 1/gamma, split sums below 1) without changing the
    // allocation, and Lemma 1 says the equality form attains the same
    // objective. The allocation itself is untouched.
    result.final_point = to_reformulated(eval_alloc, chan, params, eh, options.sic);
    // Report the achieved rate of the returned allocation, not the solver's
    // surrogate value: reduced-accuracy subproblem solutions and the w-budget
    // repair can leave the two ~0.1% apart, and the allocation is the output.
    result.objective = rr.min_rate;
    return result;
}

}  // namespace wprelay::ia
