#pragma once

// Reformulated coordinates of the equivalent problem: tau_i = 1/tau and
// 1/(1-tau), alpha_i likewise, plus the slack variables psi, vartheta and
// theta filled in by the equality rules used for initialization.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <vector>

#include "wprelay/channel.hpp"
#include "wprelay/common.hpp"
#include "wprelay/model.hpp"

namespace wprelay::ia {

// Interior clamps implementing the open intervals of the reformulation.
constexpr double kMinRatio = 1.0 + 1e-6;   // tau_i, alpha_i > 1
constexpr double kMinFraction = 1e-6;      // beta in (0,1)
constexpr double kMinPsi = 1e-12;
// The EH sigmoid saturates once vartheta leaves this window (to ~1e-4
// relative precision, understating the harvest, which is the safe side of
// the inequality), and the cone-program iterates scale like vartheta
// itself, so wider clamps only hurt the subproblem conditioning.
constexpr double kMinVartheta = 1e-8;
constexpr double kMaxVartheta = 1e4;

/// Iterate s^(kappa) of the iterative algorithm, in reformulated coordinates.
struct ExpansionPoint {
    Eigen::VectorXd p;                 // source amplitudes, size K
    std::vector<Eigen::VectorXcd> w;   // beamformers, K vectors of length N
    double tau1 = 2.0, tau2 = 2.0;     // 1/tau, 1/(1-tau)
    double alpha1 = 2.0, alpha2 = 2.0; // 1/alpha, 1/(1-alpha)
    double beta = 0.5;
    Eigen::VectorXd psi1, psi2;        // SINR slacks, size K
    double vartheta = 1.0;             // EH-exponential slack
    double theta = 0.5;                // EH-budget slack

    int num_pairs() const { return static_cast<int>(p.size()); }

    void validate() const {
        if (!(tau1 > 1.0 && tau2 > 1.0 && alpha1 > 1.0 && alpha2 > 1.0))
            throw invalid_input("ExpansionPoint: tau_i and alpha_i must exceed 1");
        if (!(beta > 0.0 && beta < 1.0))
            throw invalid_input("ExpansionPoint: beta must be in (0,1)");
        if (!(vartheta > 0.0 && theta > 0.0))
            throw invalid_input("ExpansionPoint: vartheta and theta must be > 0");
        if ((psi1.array() <= 0.0).any() || (psi2.array() <= 0.0).any())
            throw invalid_input("ExpansionPoint: psi must be > 0");
        if (1.0 / tau1 + 1.0 / tau2 > 1.0 + 1e-9 ||
            1.0 / alpha1 + 1.0 / alpha2 > 1.0 + 1e-9)
            throw invalid_input("ExpansionPoint: 1/x1 + 1/x2 must be <= 1");
    }
};

/// EH-circuit input power in reformulated coordinates:
/// (1/alpha2)(1-beta) sum p_k^2 ||h_k||^2.
inline double p_in_reformulated(const ChannelSet& chan, const Eigen::VectorXd& p,
                                double alpha2, double beta) {
    double sum = 0.0;
    for (int k = 0; k < chan.num_pairs(); ++k) sum += p[k] * p[k] * chan.gain[k];
    return (1.0 / alpha2) * (1.0 - beta) * sum;
}

/// Lift an interior allocation into reformulated coordinates. The slacks
/// psi, vartheta and theta are set by the equality rules of the
/// initialization: psi_{1,k} = 1/gamma_{1,k}, psi_{2,k} = 1/gamma_{2,k},
/// vartheta = exp(a (P_IN - b)), theta = (tau2 - 1) vartheta / (1 + vartheta).
inline ExpansionPoint to_reformulated(const Allocation& alloc, const ChannelSet& chan,
                                      const SystemParams& params,
                                      const NonlinearEhParams& eh, bool sic = true) {
    if (!(alloc.tau > 0.0 && alloc.tau < 1.0 && alloc.alpha > 0.0 && alloc.alpha < 1.0 &&
          alloc.beta > 0.0 && alloc.beta < 1.0))
        throw invalid_input("to_reformulated: tau, alpha, beta must be interior");
    ExpansionPoint ep;
    ep.p = alloc.p;
    ep.w = alloc.w;
    ep.tau1 = 1.0 / alloc.tau;
    ep.tau2 = 1.0 / (1.0 - alloc.tau);
    ep.alpha1 = 1.0 / alloc.alpha;
    ep.alpha2 = 1.0 / (1.0 - alloc.alpha);
    ep.beta = alloc.beta;
    const int k_pairs = chan.num_pairs();
    ep.psi1.resize(k_pairs);
    ep.psi2.resize(k_pairs);
    for (int k = 0; k < k_pairs; ++k) {
        ep.psi1[k] = 1.0 / std::max(gamma1(chan, params, alloc.p, alloc.alpha, k, sic),
                                    1.0 / 1e12);
        ep.psi2[k] = 1.0 / std::max(gamma2(chan, params, alloc.w, k), 1.0 / 1e12);
    }
    const double pin = p_in_reformulated(chan, ep.p, ep.alpha2, ep.beta);
    ep.vartheta = std::clamp(std::exp(eh.steepness * (pin - eh.threshold)), kMinVartheta,
                             kMaxVartheta);
    ep.theta = (ep.tau2 - 1.0) * ep.vartheta / (1.0 + ep.vartheta);
    return ep;
}

/// Project an iterate back to original problem variables
/// (p, w, 1/tau1, 1/alpha1, beta).
inline Allocation from_reformulated(const ExpansionPoint& ep) {
    Allocation alloc;
    alloc.p = ep.p;
    alloc.w = ep.w;
    alloc.tau = 1.0 / ep.tau1;
    alloc.alpha = 1.0 / ep.alpha1;
    alloc.beta = ep.beta;
    return alloc;
}

/// Deterministic initial point of the iterative algorithm:
/// p_k = sqrt(P_S^max), tau1 = tau2 = alpha1 = alpha2 = 2, beta = 0.5, and
/// w phase-aligned toward g_k^H, scaled so the relay power budget is met
/// with a factor-2 margin. `dc_reserve` is subtracted from the available DC
/// power before scaling (the DC-computing floor in DCC mode).
inline ExpansionPoint initialize(const ChannelSet& chan, const SystemParams& params,
                                 const NonlinearEhParams& eh, bool sic = true,
                                 double tau0 = 0.5, double alpha0 = 0.5,
                                 double beta0 = 0.5, double dc_reserve = 0.0) {
    const int k_pairs = chan.num_pairs();
    Allocation alloc;
    alloc.tau = tau0;
    alloc.alpha = alpha0;
    alloc.beta = beta0;
    alloc.p.resize(k_pairs);
    for (int k = 0; k < k_pairs; ++k) alloc.p[k] = std::sqrt(params.p_src_max[k]);

    // Direction first, then one global scale against the DC budget.
    alloc.w.resize(k_pairs);
    for (int k = 0; k < k_pairs; ++k) {
        Eigen::VectorXcd dir = chan.downlink[k].adjoint();
        const double nrm = dir.norm();
        alloc.w[k] = nrm > 0.0 ? Eigen::VectorXcd(dir / nrm)
                               : Eigen::VectorXcd::Zero(chan.num_antennas());
        if (nrm == 0.0 && chan.num_antennas() > 0) alloc.w[k][0] = 1.0;
    }
    const double dc = p_dc(chan, eh, alloc.p, alloc.tau, alloc.alpha, alloc.beta);
    const double budget = 0.5 * dc - params.p_static - dc_reserve;
    const double norm2_per_pair =
        budget > 0.0 ? budget / ((1.0 - alloc.tau) * k_pairs) : 1e-12;
    for (int k = 0; k < k_pairs; ++k) alloc.w[k] *= std::sqrt(norm2_per_pair);

    return to_reformulated(alloc, chan, params, eh, sic);
}

}  // namespace wprelay::ia
