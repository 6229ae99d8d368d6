#pragma once

// Comparison schemes around the iterative algorithm: fixed-split baselines
// (EBT, EPS, EBT-EPS), the no-SIC and DC-computing variants, an exhaustive
// single-pair grid oracle, and an independent feasibility checker used by
// the tests.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "wprelay/channel.hpp"
#include "wprelay/common.hpp"
#include "wprelay/ia.hpp"
#include "wprelay/model.hpp"

namespace wprelay::baselines {

enum class SchemeId { Alg1, EBT, EPS, EBT_EPS, NonSIC, DCC, OracleGrid };

/// How one comparison scheme restricts the full problem: pinned fractions,
/// the SIC switch and the computing mode. Everything else runs through the
/// same iterative machinery as Algorithm 1.
struct SchemeSpec {
    SchemeId id = SchemeId::Alg1;
    ia::Pins pins;                          // fixed tau and/or alpha (and beta for DCC)
    bool sic = true;
    ComputingMode mode = ComputingMode::ACC;
    int oracle_density = 64;                // grid points per dimension (OracleGrid)
};

/// Canonical spec for each scheme of the comparison set.
inline SchemeSpec scheme_spec(SchemeId id) {
    SchemeSpec s;
    s.id = id;
    switch (id) {
        case SchemeId::Alg1:
        case SchemeId::OracleGrid:
            break;
        case SchemeId::EBT:
            s.pins.tau = 0.5;
            break;
        case SchemeId::EPS:
            s.pins.alpha = 0.5;
            break;
        case SchemeId::EBT_EPS:
            s.pins.tau = 0.5;
            s.pins.alpha = 0.5;
            break;
        case SchemeId::NonSIC:
            s.sic = false;
            break;
        case SchemeId::DCC:
            s.mode = ComputingMode::DCC;
            s.pins.beta = 0.0;
            break;
    }
    return s;
}

inline const char* to_string(SchemeId id) {
    switch (id) {
        case SchemeId::Alg1: return "alg1";
        case SchemeId::EBT: return "ebt";
        case SchemeId::EPS: return "eps";
        case SchemeId::EBT_EPS: return "ebt-eps";
        case SchemeId::NonSIC: return "nonsic";
        case SchemeId::DCC: return "dcc";
        case SchemeId::OracleGrid: return "oracle";
    }
    return "?";
}

inline std::optional<SchemeId> parse_scheme(std::string_view name) {
    for (SchemeId id : {SchemeId::Alg1, SchemeId::EBT, SchemeId::EPS, SchemeId::EBT_EPS,
                        SchemeId::NonSIC, SchemeId::DCC, SchemeId::OracleGrid})
        if (name == to_string(id)) return id;
    return std::nullopt;
}

/// Best feasible point of the K=1 problem on an exhaustive grid, plus a
/// local estimate of how much one grid cell can move the objective.
struct OracleResult {
    Allocation alloc;
    double objective = 0.0;   // max-min rate at the best grid point [nats/s/Hz]
    double cell_slack = 0.0;  // sum over dimensions of the local per-cell change
    bool feasible = false;    // false when no grid point satisfies the constraints
};

/// Exhaustive grid search over (tau, alpha, beta, p) for a single pair. The
/// beamformer is matched to the downlink (optimal at K=1: no inter-pair
/// interference and the rate is monotone in ||w|| along that direction) and
/// its power is set on the relay budget boundary, which is also optimal
/// since nothing else consumes the harvested DC power. Fractions are
/// gridded linearly as j/density (j = 1..density-1), source power
/// logarithmically over two decades below the cap; both grids are nested
/// under density doubling so a denser search can only improve the result.
inline OracleResult oracle_grid_k1(const ChannelSet& chan, const SystemParams& params,
                                   const NonlinearEhParams& eh, int grid_density = 64) {
    params.validate();
    eh.validate();
    chan.validate();
    if (chan.num_pairs() != 1 || params.num_pairs != 1)
        throw invalid_input("oracle_grid_k1: defined only for K = 1");
    if (grid_density < 2) throw invalid_input("oracle_grid_k1: grid_density must be >= 2");

    const int d = grid_density;
    const double gh = chan.gain[0];                    // ||h||^2
    const double gg = chan.downlink[0].squaredNorm();  // ||g||^2
    const double sk2 = params.sigma_k2[0];
    const double xi = eh.xi();
    const double omega = eh.omega();

    std::vector<double> frac(d - 1);
    for (int j = 1; j < d; ++j) frac[j - 1] = static_cast<double>(j) / d;
    std::vector<double> pwr(d);  // source power grid, log over two decades
    for (int i = 1; i <= d; ++i)
        pwr[i - 1] = params.p_src_max[0] * std::pow(10.0, -2.0 * (d - i) / d);

    constexpr double kInfeasible = -std::numeric_limits<double>::infinity();
    // Max-min rate at one grid point, or -inf when infeasible.
    auto eval = [&](double tau, double alpha, double beta, double psq) {
        const double s = psq * gh;
        const double pin = (1.0 - alpha) * (1.0 - beta) * s;
        if (tau * (1.0 - alpha) * beta * s < params.p_acc_min) return kInfeasible;
        const double pdc = tau * xi * (sigmoid(eh.steepness * (pin - eh.threshold)) - omega);
        const double budget = pdc - params.p_static;
        if (budget < 0.0) return kInfeasible;
        const double g1 = psq * gh / (params.sigma_ant2 + params.sigma_r2 / alpha);
        const double g2 = budget / (1.0 - tau) * gg / sk2;
        return std::min(tau * std::log1p(g1), (1.0 - tau) * std::log1p(g2));
    };

    double best = kInfeasible;
    int bt = -1, ba = -1, bb = -1, bp = -1;
    for (int ip = 0; ip < d; ++ip) {
        const double psq = pwr[ip];
        for (int iu = 0; iu < d - 1; ++iu) {
            const double alpha = frac[iu];
            // Everything except tau is fixed here; hoist the shared terms.
            const double g1 = psq * gh / (params.sigma_ant2 + params.sigma_r2 / alpha);
            const double lg1 = std::log1p(g1);
            for (int ib = 0; ib < d - 1; ++ib) {
                const double beta = frac[ib];
                const double s = psq * gh;
                const double pin = (1.0 - alpha) * (1.0 - beta) * s;
                const double acc_factor = (1.0 - alpha) * beta * s;
                const double dc_factor =
                    xi * (sigmoid(eh.steepness * (pin - eh.threshold)) - omega);
                for (int it = 0; it < d - 1; ++it) {
                    const double tau = frac[it];
                    if (tau * acc_factor < params.p_acc_min) continue;
                    const double budget = tau * dc_factor - params.p_static;
                    if (budget < 0.0) continue;
                    const double g2 = budget / (1.0 - tau) * gg / sk2;
                    const double r = std::min(tau * lg1, (1.0 - tau) * std::log1p(g2));
                    if (r > best) {
                        best = r;
                        bt = it;
                        ba = iu;
                        bb = ib;
                        bp = ip;
                    }
                }
            }
        }
    }

    OracleResult out;
    const int n = chan.num_antennas();
    out.alloc.p = Eigen::VectorXd::Constant(1, std::sqrt(pwr.front()));
    out.alloc.w = {Eigen::VectorXcd::Zero(n)};
    if (best == kInfeasible) return out;  // objective 0, nothing harvestable

    out.feasible = true;
    out.objective = best;
    const double tau = frac[bt], alpha = frac[ba], beta = frac[bb], psq = pwr[bp];
    out.alloc.tau = tau;
    out.alloc.alpha = alpha;
    out.alloc.beta = beta;
    out.alloc.p[0] = std::sqrt(psq);
    const double pdc =
        tau * xi *
        (sigmoid(eh.steepness * ((1.0 - alpha) * (1.0 - beta) * psq * gh - eh.threshold)) -
         omega);
    // Tiny back-off from the budget boundary so the reported point stays
    // strictly feasible under re-evaluation in different rounding orders.
    const double w2 = std::max(0.0, (pdc - params.p_static) / (1.0 - tau)) * (1.0 - 1e-9);
    if (gg > 0.0)
        out.alloc.w[0] = chan.downlink[0].adjoint() * (std::sqrt(w2 / gg));

    // Local per-cell sensitivity around the winner: for each dimension take
    // the larger objective change to an adjacent grid point. The true
    // optimum lies within one cell of the grid best, so this bounds how far
    // it can sit above `objective` (up to curvature within the cell).
    auto at = [&](int it, int iu, int ib, int ip) {
        if (it < 0 || it >= d - 1 || iu < 0 || iu >= d - 1 || ib < 0 || ib >= d - 1 ||
            ip < 0 || ip >= d)
            return kInfeasible;
        return eval(frac[it], frac[iu], frac[ib], pwr[ip]);
    };
    auto spread = [&](double lo, double hi) {
        double w = 0.0;
        if (lo != kInfeasible) w = std::max(w, std::abs(best - lo));
        if (hi != kInfeasible) w = std::max(w, std::abs(best - hi));
        return w;
    };
    out.cell_slack = spread(at(bt - 1, ba, bb, bp), at(bt + 1, ba, bb, bp)) +
                     spread(at(bt, ba - 1, bb, bp), at(bt, ba + 1, bb, bp)) +
                     spread(at(bt, ba, bb - 1, bp), at(bt, ba, bb + 1, bp)) +
                     spread(at(bt, ba, bb, bp - 1), at(bt, ba, bb, bp + 1));
    return out;
}

/// Runs one comparison scheme on one channel realization. Pinned variables
/// are substituted as constants into every subproblem; the rest of the
/// machinery is identical to the unrestricted algorithm. OracleGrid runs
/// the exhaustive search instead and reports an empty iteration trace.
inline ia::IaResult run_scheme(const SchemeSpec& spec, const ChannelSet& chan,
                               const SystemParams& params, const NonlinearEhParams& eh,
                               const ia::IaOptions& base = {}) {
    if (spec.id == SchemeId::OracleGrid) {
        OracleResult og = oracle_grid_k1(chan, params, eh, spec.oracle_density);
        ia::IaResult res;
        res.alloc = og.alloc;
        res.objective = og.objective;
        auto [rr, pr] = evaluate(chan, params, eh, og.alloc, spec.mode, spec.sic);
        res.rates = rr;
        res.powers = pr;
        if (og.feasible)
            res.final_point = ia::to_reformulated(og.alloc, chan, params, eh, spec.sic);
        return res;
    }
    ia::IaOptions options = base;
    options.mode = spec.mode;
    options.sic = spec.sic;
    if (spec.pins.tau) options.pins.tau = spec.pins.tau;
    if (spec.pins.alpha) options.pins.alpha = spec.pins.alpha;
    if (spec.pins.beta) options.pins.beta = spec.pins.beta;
    return ia::run(chan, params, eh, options);
}

/// One labelled signed slack; >= 0 means the constraint holds.
struct BruteResidual {
    std::string constraint;
    double slack = 0.0;
};

struct BruteCheck {
    bool feasible = false;
    std::vector<BruteResidual> residuals;
};

/// Re-derives every constraint of the max-min problem directly from the
/// paper formulas with explicit loops — deliberately sharing no code with
/// `model.evaluate` so the two can cross-check each other in tests.
inline BruteCheck brute_check_allocation(const Allocation& alloc, const ChannelSet& chan,
                                         const SystemParams& params,
                                         const NonlinearEhParams& eh,
                                         ComputingMode mode = ComputingMode::ACC) {
    const int k_pairs = static_cast<int>(chan.uplink.size());
    auto clamp01 = [](double v) { return std::min(std::max(v, 1e-6), 1.0 - 1e-6); };
    const double tau = clamp01(alloc.tau);
    const double alpha = clamp01(alloc.alpha);
    const double beta = clamp01(alloc.beta);

    // Received power sum_k p_k^2 ||h_k||^2, entry by entry.
    double recv = 0.0;
    for (int k = 0; k < k_pairs; ++k) {
        double nrm2 = 0.0;
        for (int i = 0; i < chan.uplink[k].size(); ++i) nrm2 += std::norm(chan.uplink[k][i]);
        recv += alloc.p[k] * alloc.p[k] * nrm2;
    }

    const double p_in = (1.0 - alpha) * (1.0 - beta) * recv;
    const double p_acc = tau * (1.0 - alpha) * beta * recv;
    const double omega = 1.0 / (1.0 + std::exp(eh.steepness * eh.threshold));
    const double xi = eh.p_eh_max / (1.0 - omega);
    const double p_dc =
        tau * xi * (1.0 / (1.0 + std::exp(-eh.steepness * (p_in - eh.threshold))) - omega);

    double beam = 0.0;
    for (const auto& wk : alloc.w)
        for (int i = 0; i < wk.size(); ++i) beam += std::norm(wk[i]);
    const double p_tot = (1.0 - tau) * beam + params.p_static;

    BruteCheck out;
    if (mode == ComputingMode::ACC) {
        out.residuals.push_back({"(8b) dc-budget", p_dc - p_tot});
        out.residuals.push_back({"(8c) computing", p_acc - params.p_acc_min});
    } else {
        out.residuals.push_back({"(9) dc-budget", p_dc - p_tot - params.p_dcc_min});
    }
    for (int k = 0; k < k_pairs; ++k)
        out.residuals.push_back({"(8d) src-power[" + std::to_string(k) + "]",
                                 params.p_src_max[k] - alloc.p[k] * alloc.p[k]});
    out.feasible = true;
    for (const auto& r : out.residuals) out.feasible = out.feasible && r.slack >= 0.0;
    return out;
}

}  // namespace wprelay::baselines
