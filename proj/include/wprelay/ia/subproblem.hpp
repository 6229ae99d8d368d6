#pragma once

// Assembly of the per-iteration convex subproblem (rate maximization) and
// of the feasibility-phase variant (AC-computing margin maximization) as
// cone programs, with an explicit variable map for solution extraction.
// Scheme restrictions (fixed tau / alpha / beta) are applied by constant
// substitution: pinned quantities get no columns.

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "wprelay/conic/program.hpp"
#include "wprelay/ia/expansion.hpp"
#include "wprelay/ia/surrogates.hpp"

namespace wprelay::ia {

/// Values held fixed in every subproblem (in original coordinates).
struct Pins {
    std::optional<double> tau;
    std::optional<double> alpha;
    std::optional<double> beta;  // DCC pins beta = 0
};

/// Column index of each reformulated quantity, or -1 when pinned.
struct VarMap {
    int r = -1;
    std::vector<int> p;                      // size K
    std::vector<std::vector<int>> w_re, w_im;  // K x N
    int tau1 = -1, tau2 = -1;
    int alpha1 = -1, alpha2 = -1;
    int beta = -1;
    std::vector<int> psi1, psi2;             // size K
    int vartheta = -1, theta = -1;
    // Slack columns of the SOC transformation and the (17a) right-hand side.
    int t_tau1 = -1, t_tau2 = -1, t_alpha1 = -1, t_alpha2 = -1;
    std::vector<int> t_psi1;
    int t_beta = -1;
    int u_eh = -1;   // epigraph of ab/(1-beta)
    int eta = -1;    // feasibility-phase objective
    // Tallies at the formulation level: beamformers counted as KN complex
    // scalars and constraints counted before the slack splitting.
    int paper_scalar_vars = 0;
    int paper_conic_constraints = 0;
};

namespace detail {

/// A reformulated scalar that is either a program column or a pinned value.
struct Scalar {
    int idx = -1;
    double value = 0.0;  // used when idx < 0

    bool pinned() const { return idx < 0; }
    conic::LinExpr expr(double coef = 1.0) const {
        return pinned() ? conic::LinExpr::make(coef * value)
                        : conic::LinExpr::var(idx, coef);
    }
};

/// Affine expression for Re{g_k w_l} over the real/imag columns of w_l.
inline conic::LinExpr re_gw(const ChannelSet& chan, const VarMap& vm, int k, int l) {
    conic::LinExpr e;
    for (int i = 0; i < chan.num_antennas(); ++i) {
        const std::complex<double> g = chan.downlink[k][i];
        e.add(vm.w_re[l][i], g.real());
        e.add(vm.w_im[l][i], -g.imag());
    }
    return e;
}

inline conic::LinExpr im_gw(const ChannelSet& chan, const VarMap& vm, int k, int l) {
    conic::LinExpr e;
    for (int i = 0; i < chan.num_antennas(); ++i) {
        const std::complex<double> g = chan.downlink[k][i];
        e.add(vm.w_re[l][i], g.imag());
        e.add(vm.w_im[l][i], g.real());
    }
    return e;
}

}  // namespace detail

/// Assembles the convex program at expansion point `ep`. With
/// `feasibility_phase` the AC-computing floor is dropped and the margin
/// eta is maximized instead of the rate r.
inline std::pair<conic::ConeProgram, VarMap> build_program(
    const ExpansionPoint& ep, const ChannelSet& chan, const SystemParams& params,
    const NonlinearEhParams& eh, ComputingMode mode, bool sic, const Pins& pins,
    bool feasibility_phase) {
    using conic::LinExpr;
    using detail::Scalar;
    ep.validate();
    const int k_pairs = chan.num_pairs();
    const int n_ant = chan.num_antennas();
    const bool dcc = mode == ComputingMode::DCC;
    const bool acc_floor = !dcc;  // constraint (AC floor) exists only in ACC mode

    conic::ConeProgram prog(0);
    VarMap vm;
    auto scalar = [&](std::optional<double> pin, double lo, double hi,
                      int& slot) -> Scalar {
        if (pin) {
            slot = -1;
            return {-1, *pin};
        }
        slot = prog.add_var(lo, hi);
        return {slot, 0.0};
    };
    const double inf = conic::ConeProgram::kInf;

    // Pinned original values map to pinned reformulated values.
    std::optional<double> pin_tau1, pin_tau2, pin_alpha1, pin_alpha2, pin_beta;
    if (pins.tau) {
        pin_tau1 = 1.0 / *pins.tau;
        pin_tau2 = 1.0 / (1.0 - *pins.tau);
    }
    if (pins.alpha) {
        pin_alpha1 = 1.0 / *pins.alpha;
        pin_alpha2 = 1.0 / (1.0 - *pins.alpha);
    }
    if (pins.beta || dcc) pin_beta = pins.beta.value_or(0.0);

    // --- Decision variables.
    vm.r = prog.add_var(0.0, inf);
    const Scalar r{vm.r, 0.0};
    vm.p.resize(k_pairs);
    std::vector<Scalar> p(k_pairs);
    for (int k = 0; k < k_pairs; ++k) {
        vm.p[k] = prog.add_var(0.0, std::sqrt(params.p_src_max[k]));  // (10i) p-cap
        p[k] = {vm.p[k], 0.0};
    }
    vm.w_re.assign(k_pairs, std::vector<int>(n_ant));
    vm.w_im.assign(k_pairs, std::vector<int>(n_ant));
    for (int k = 0; k < k_pairs; ++k)
        for (int i = 0; i < n_ant; ++i) {
            vm.w_re[k][i] = prog.add_var();
            vm.w_im[k][i] = prog.add_var();
        }
    const Scalar tau1 = scalar(pin_tau1, kMinRatio, inf, vm.tau1);
    const Scalar tau2 = scalar(pin_tau2, kMinRatio, inf, vm.tau2);
    const Scalar alpha1 = scalar(pin_alpha1, kMinRatio, inf, vm.alpha1);
    const Scalar alpha2 = scalar(pin_alpha2, kMinRatio, inf, vm.alpha2);
    const Scalar beta =
        scalar(pin_beta, kMinFraction, 1.0 - kMinFraction, vm.beta);  // (10i) beta
    vm.psi1.resize(k_pairs);
    vm.psi2.resize(k_pairs);
    std::vector<Scalar> psi1(k_pairs), psi2(k_pairs);
    for (int k = 0; k < k_pairs; ++k) {
        vm.psi1[k] = prog.add_var(kMinPsi, inf);
        vm.psi2[k] = prog.add_var(kMinPsi, inf);
        psi1[k] = {vm.psi1[k], 0.0};
        psi2[k] = {vm.psi2[k], 0.0};
    }
    // No explicit upper bound: the EH-exponent rows bound vartheta from
    // above, and a huge bound constant would wreck the problem scaling.
    const Scalar vartheta = scalar(std::nullopt, kMinVartheta, inf, vm.vartheta);
    const Scalar theta = scalar(std::nullopt, kMinPsi, inf, vm.theta);
    vm.paper_scalar_vars = k_pairs * n_ant + 3 * k_pairs + 3 +
                           (tau1.pinned() ? 0 : 2) + (alpha1.pinned() ? 0 : 2) +
                           (beta.pinned() ? 0 : 1);

    // --- Per-hop rate minorants (one row per hop and pair).
    for (int k = 0; k < k_pairs; ++k)
        for (int i = 0; i < 2; ++i) {
            const RateSurrogate rs = surrogate_rate(ep, i, k);
            const Scalar& psi = i == 0 ? psi1[k] : psi2[k];
            const Scalar& taui = i == 0 ? tau1 : tau2;
            LinExpr row = r.expr();
            row.add(psi.idx, -rs.b);  // psi is never pinned
            if (taui.pinned())
                row.add_const(-rs.c * taui.value);
            else
                row.add(taui.idx, -rs.c);
            prog.add_le(std::move(row), rs.a, "rate[" + std::to_string(i) + "," +
                                                  std::to_string(k) + "]");
            ++vm.paper_conic_constraints;
        }

    // --- First-hop SINR minorant >= split slack, plus psi1 * slack >= 1.
    vm.t_psi1.resize(k_pairs);
    for (int k = 0; k < k_pairs; ++k) {
        vm.t_psi1[k] = prog.add_var(0.0, inf);
        const SinrSurrogate hs = surrogate_h(ep, chan, params, k, sic);
        LinExpr lhs = p[k].expr(hs.c_p);
        if (alpha1.pinned())
            lhs.add_const(hs.c_alpha1 * alpha1.value);
        else
            lhs.add(alpha1.idx, hs.c_alpha1);
        lhs.add_const(hs.c_0);
        lhs.add(vm.t_psi1[k], -1.0);
        std::vector<LinExpr> u;
        for (const auto& [l, wgt] : hs.q) u.push_back(p[l].expr(std::sqrt(wgt)));
        prog.add_rsoc(std::move(lhs), LinExpr::make(0.5), std::move(u),
                      "sinr1[" + std::to_string(k) + "]");
        ++vm.paper_conic_constraints;
        prog.add_hyperbolic(LinExpr::var(vm.psi1[k]), LinExpr::var(vm.t_psi1[k]), 1.0,
                            "split-psi1[" + std::to_string(k) + "]");
    }

    // --- Second-hop beam-gain minorant: psi2 * g^(k)(w_k) >= interference.
    for (int k = 0; k < k_pairs; ++k) {
        const BeamSurrogate gs = surrogate_g(ep, chan, k);
        LinExpr half_g = detail::re_gw(chan, vm, k, k);
        for (auto& [i, c] : half_g.terms) c *= gs.re0;
        half_g.add_const(-0.5 * gs.re0 * gs.re0);
        std::vector<LinExpr> u;
        for (int l = 0; l < k_pairs; ++l) {
            if (l == k) continue;
            u.push_back(detail::re_gw(chan, vm, k, l));
            u.push_back(detail::im_gw(chan, vm, k, l));
        }
        u.push_back(LinExpr::make(std::sqrt(params.sigma_k2[k])));
        prog.add_rsoc(LinExpr::var(vm.psi2[k]), std::move(half_g), std::move(u),
                      "sinr2[" + std::to_string(k) + "]");
        ++vm.paper_conic_constraints;

        // Sign condition keeping the minorant valid.
        LinExpr re = detail::re_gw(chan, vm, k, k);
        for (auto& [i, c] : re.terms) c = -c;
        prog.add_le(std::move(re), 0.0, "beam-sign[" + std::to_string(k) + "]");
        ++vm.paper_conic_constraints;
    }

    // --- (10i) source power caps were emitted as bounds on p.
    vm.paper_conic_constraints += k_pairs;

    // --- Fractional-time and power-split couplings via product slacks.
    auto couple = [&](const Scalar& x1, const Scalar& x2, int& s1, int& s2,
                      const char* tag) {
        ++vm.paper_conic_constraints;
        if (x1.pinned()) return;  // both halves pinned together
        s1 = prog.add_var(0.0, 1.0);
        s2 = prog.add_var(0.0, 1.0);
        prog.add_le(LinExpr::var(s1).add(s2, 1.0), 1.0, tag);
        prog.add_hyperbolic(LinExpr::var(s1), LinExpr::var(x1.idx), 1.0, tag);
        prog.add_hyperbolic(LinExpr::var(s2), LinExpr::var(x2.idx), 1.0, tag);
    };
    couple(tau1, tau2, vm.t_tau1, vm.t_tau2, "time-split");
    couple(alpha1, alpha2, vm.t_alpha1, vm.t_alpha2, "power-split");
    ++vm.paper_conic_constraints;  // beta interval (bounds or pin)

    // --- Relay power budget: xi theta - xi Omega (tau2 - 1) - tau2 P_sta
    //     >= sum ||w_k||^2, with the DC-computing floor folded in for DCC.
    const double xi = eh.xi();
    const double omega = eh.omega();
    const double p_sta_eff = params.p_static + (dcc ? params.p_dcc_min : 0.0);
    {
        LinExpr lhs = theta.expr(xi);
        if (tau2.pinned())
            lhs.add_const((-xi * omega - p_sta_eff) * tau2.value);
        else
            lhs.add(tau2.idx, -xi * omega - p_sta_eff);
        lhs.add_const(xi * omega);
        std::vector<LinExpr> u;
        for (int k = 0; k < k_pairs; ++k)
            for (int i = 0; i < n_ant; ++i) {
                u.push_back(LinExpr::var(vm.w_re[k][i]));
                u.push_back(LinExpr::var(vm.w_im[k][i]));
            }
        prog.add_rsoc(std::move(lhs), LinExpr::make(0.5), std::move(u), "dc-budget");
        ++vm.paper_conic_constraints;
    }

    // --- EH turn-on: a H^(k)(p, alpha2) + ftilde(vartheta, beta) >= ab/(1-beta).
    const HarvestSurrogate hv = surrogate_harvest(ep, chan);
    auto harvest_expr = [&](double scale) {
        LinExpr e;
        for (int k = 0; k < k_pairs; ++k) e.add(vm.p[k], scale * hv.c_p[k]);
        if (alpha2.pinned())
            e.add_const(scale * hv.c_alpha2 * alpha2.value);
        else
            e.add(alpha2.idx, scale * hv.c_alpha2);
        return e;
    };
    {
        const FtildeSurrogate ft = surrogate_ftilde(ep);
        LinExpr lhs = harvest_expr(eh.steepness);
        lhs.add(vartheta.idx, ft.a_vartheta);
        lhs.add_const(ft.a0 + ft.a_one_minus_beta);
        if (!beta.pinned()) lhs.add(beta.idx, -ft.a_one_minus_beta);
        const double ab = eh.steepness * eh.threshold;
        if (beta.pinned()) {
            lhs.add_const(-ab / (1.0 - beta.value));
        } else {
            vm.u_eh = prog.add_var(ab, inf);
            lhs.add(vm.u_eh, -1.0);
            LinExpr omb = LinExpr::make(1.0).add(beta.idx, -1.0);
            prog.add_hyperbolic(LinExpr::var(vm.u_eh), std::move(omb), ab, "eh-turnon");
        }
        for (auto& [i, c] : lhs.terms) c = -c;
        lhs.constant = -lhs.constant;
        prog.add_le(std::move(lhs), 0.0, "eh-turnon");
        ++vm.paper_conic_constraints;
    }

    // --- EH budget coupling: (tau2 - 1) vartheta >= bound((1+vartheta) theta).
    {
        const BilinearBound bb{1.0 + ep.vartheta, ep.theta};
        LinExpr x = tau2.expr();
        x.add_const(-1.0);
        LinExpr half_vt = vartheta.expr(0.5);
        std::vector<LinExpr> u;
        u.push_back(theta.expr(std::sqrt(bb.coeff_y2())));
        LinExpr one_plus_vt = vartheta.expr(std::sqrt(bb.coeff_x2()));
        one_plus_vt.add_const(std::sqrt(bb.coeff_x2()));
        u.push_back(std::move(one_plus_vt));
        prog.add_rsoc(std::move(x), std::move(half_vt), std::move(u), "eh-couple");
        ++vm.paper_conic_constraints;
    }

    // --- AC-computing floor (and the feasibility-phase margin objective).
    if (acc_floor) {
        vm.t_beta = prog.add_var(1.0, inf);  // 1/beta >= 1
        prog.add_hyperbolic(beta.expr(), LinExpr::var(vm.t_beta), 1.0, "split-beta");
        const BilinearBound bb{ep.tau1, 1.0 / ep.beta};
        std::vector<LinExpr> u;
        u.push_back(
            LinExpr::var(vm.t_beta, std::sqrt(params.p_acc_min * bb.coeff_y2())));
        u.push_back(tau1.expr(std::sqrt(params.p_acc_min * bb.coeff_x2())));
        LinExpr lhs = harvest_expr(1.0);
        if (feasibility_phase) {
            vm.eta = prog.add_var();
            lhs.add(vm.eta, -1.0);
        }
        prog.add_rsoc(std::move(lhs), LinExpr::make(0.5), std::move(u),
                      feasibility_phase ? "acc-margin" : "acc-floor");
        if (!feasibility_phase) ++vm.paper_conic_constraints;
    }

    // --- Objective.
    if (feasibility_phase) {
        if (!acc_floor)
            throw invalid_input("build_program: feasibility phase applies to ACC only");
        prog.objective[vm.eta] = 1.0;
    } else {
        prog.objective[vm.r] = 1.0;
    }
    return {std::move(prog), std::move(vm)};
}

inline std::pair<conic::ConeProgram, VarMap> build_subproblem(
    const ExpansionPoint& ep, const ChannelSet& chan, const SystemParams& params,
    const NonlinearEhParams& eh, ComputingMode mode = ComputingMode::ACC,
    bool sic = true, const Pins& pins = {}) {
    return build_program(ep, chan, params, eh, mode, sic, pins, false);
}

inline std::pair<conic::ConeProgram, VarMap> build_feasibility(
    const ExpansionPoint& ep, const ChannelSet& chan, const SystemParams& params,
    const NonlinearEhParams& eh, bool sic = true, const Pins& pins = {}) {
    return build_program(ep, chan, params, eh, ComputingMode::ACC, sic, pins, true);
}

/// Writes the expansion point into program coordinates (the inverse of
/// `extract`, with slack columns set by their defining equalities). The
/// result is feasible up to the interior clamps and doubles as a magnitude
/// hint for the solver.
inline Eigen::VectorXd embed_point(const ExpansionPoint& ep, const VarMap& vm,
                                   int n_vars, const ChannelSet& chan,
                                   const SystemParams& params,
                                   const NonlinearEhParams& eh) {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n_vars);
    auto set = [&](int idx, double v) {
        if (idx >= 0) x[idx] = v;
    };
    const int k_pairs = ep.num_pairs();
    for (int k = 0; k < k_pairs; ++k) {
        x[vm.p[k]] = ep.p[k];
        for (std::size_t i = 0; i < vm.w_re[k].size(); ++i) {
            x[vm.w_re[k][i]] = ep.w[k][i].real();
            x[vm.w_im[k][i]] = ep.w[k][i].imag();
        }
        x[vm.psi1[k]] = ep.psi1[k];
        x[vm.psi2[k]] = ep.psi2[k];
        set(vm.t_psi1[k], 1.0 / ep.psi1[k]);
    }
    set(vm.tau1, ep.tau1);
    set(vm.tau2, ep.tau2);
    set(vm.alpha1, ep.alpha1);
    set(vm.alpha2, ep.alpha2);
    set(vm.beta, ep.beta);
    set(vm.vartheta, ep.vartheta);
    set(vm.theta, ep.theta);
    set(vm.t_tau1, 1.0 / ep.tau1);
    set(vm.t_tau2, 1.0 / ep.tau2);
    set(vm.t_alpha1, 1.0 / ep.alpha1);
    set(vm.t_alpha2, 1.0 / ep.alpha2);
    set(vm.t_beta, 1.0 / ep.beta);
    set(vm.u_eh, eh.steepness * eh.threshold / (1.0 - ep.beta));
    if (vm.r >= 0) {
        double r = std::numeric_limits<double>::infinity();
        for (int k = 0; k < k_pairs; ++k)
            r = std::min({r, RateSurrogate::exact(ep.psi1[k], ep.tau1),
                          RateSurrogate::exact(ep.psi2[k], ep.tau2)});
        x[vm.r] = std::max(r, 0.0);
    }
    if (vm.eta >= 0) {
        const HarvestSurrogate hv = surrogate_harvest(ep, chan);
        const BilinearBound bb{ep.tau1, 1.0 / ep.beta};
        set(vm.eta, hv.eval(ep.p, ep.alpha2) -
                        params.p_acc_min * bb.eval(ep.tau1, 1.0 / ep.beta));
    }
    return x;
}

/// Reads the next iterate out of a solver point, clamping each coordinate
/// back into its open domain.
inline ExpansionPoint extract(const Eigen::VectorXd& x, const VarMap& vm,
                              const ExpansionPoint& prev, const Pins& pins,
                              ComputingMode mode) {
    ExpansionPoint ep = prev;  // pinned fields keep their values
    const int k_pairs = prev.num_pairs();
    for (int k = 0; k < k_pairs; ++k) ep.p[k] = std::max(x[vm.p[k]], 0.0);
    for (int k = 0; k < k_pairs; ++k)
        for (std::size_t i = 0; i < vm.w_re[k].size(); ++i)
            ep.w[k][i] = std::complex<double>(x[vm.w_re[k][i]], x[vm.w_im[k][i]]);
    auto ratio = [&](int idx, double pinned) {
        return idx >= 0 ? std::max(x[idx], kMinRatio) : pinned;
    };
    ep.tau1 = ratio(vm.tau1, ep.tau1);
    ep.tau2 = ratio(vm.tau2, ep.tau2);
    ep.alpha1 = ratio(vm.alpha1, ep.alpha1);
    ep.alpha2 = ratio(vm.alpha2, ep.alpha2);
    // Reduced-accuracy solves can overshoot the split couplings by a hair;
    // scaling both ratios up restores 1/x1 + 1/x2 <= 1 exactly.
    auto repair_split = [](double& x1, double& x2) {
        const double sum = 1.0 / x1 + 1.0 / x2;
        if (sum > 1.0) {
            x1 *= sum;
            x2 *= sum;
        }
    };
    if (vm.tau1 >= 0) repair_split(ep.tau1, ep.tau2);
    if (vm.alpha1 >= 0) repair_split(ep.alpha1, ep.alpha2);
    if (vm.beta >= 0)
        ep.beta = std::clamp(x[vm.beta], kMinFraction, 1.0 - kMinFraction);
    else if (mode == ComputingMode::DCC)
        ep.beta = pins.beta.value_or(0.0) <= 0.0 ? kMinFraction
                                                 : pins.beta.value_or(0.0);
    for (int k = 0; k < k_pairs; ++k) {
        ep.psi1[k] = std::max(x[vm.psi1[k]], kMinPsi);
        ep.psi2[k] = std::max(x[vm.psi2[k]], kMinPsi);
    }
    ep.vartheta = std::clamp(x[vm.vartheta], kMinVartheta, kMaxVartheta);
    ep.theta = std::max(x[vm.theta], kMinPsi);
    return ep;
}

}  // namespace wprelay::ia
