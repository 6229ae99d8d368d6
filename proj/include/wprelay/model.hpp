#pragma once

// Physical-layer quantities of the multi-pair wireless-powered DF relay
// network: per-hop SINRs and rates, harvested AC/DC power, relay power
// budget, and exact feasibility checking of a candidate operating point.

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <algorithm>
#include <complex>
#include <vector>

#include "wprelay/common.hpp"

namespace wprelay {

struct SystemParams {
    int num_pairs = 1;              // K
    int num_antennas = 1;           // N
    double sigma_ant2 = 1e-10;      // antenna noise power [W]
    double sigma_r2 = 1e-8;         // ID-circuit noise power [W]
    std::vector<double> sigma_k2;   // destination noise power [W], size K
    double p_static = 1e-6;         // relay static power [W]
    std::vector<double> p_src_max;  // per-source transmit power cap [W], size K
    double p_acc_min = 0.27e-6;     // minimum AC-computing power [W]
    double p_dcc_min = 47.64e-6;    // minimum DC-computing power [W]

    void validate() const {
        if (num_pairs < 1 || num_antennas < 1)
            throw invalid_input("SystemParams: K and N must be >= 1");
        if (sigma_ant2 <= 0 || sigma_r2 <= 0 || p_static <= 0 || p_acc_min <= 0 ||
            p_dcc_min <= 0)
            throw invalid_input("SystemParams: all powers must be > 0");
        if (p_dcc_min <= p_acc_min)
            throw invalid_input("SystemParams: p_dcc_min must exceed p_acc_min");
        if (static_cast<int>(sigma_k2.size()) != num_pairs ||
            static_cast<int>(p_src_max.size()) != num_pairs)
            throw invalid_input("SystemParams: per-user vectors must have size K");
        for (double s : sigma_k2)
            if (s <= 0) throw invalid_input("SystemParams: sigma_k2 must be > 0");
        for (double p : p_src_max)
            if (p <= 0) throw invalid_input("SystemParams: p_src_max must be > 0");
    }
};

/// Sigmoidal rectifier model: harvested DC power saturates at p_eh_max,
/// turns on around input power b, with steepness a.
struct NonlinearEhParams {
    double steepness = 6400.0;  // a [1/W]
    double threshold = 0.003;   // b [W]
    double p_eh_max = 0.2e-3;   // saturation power [W]

    double omega() const { return 1.0 / (1.0 + std::exp(steepness * threshold)); }
    double xi() const { return p_eh_max / (1.0 - omega()); }

    void validate() const {
        if (steepness <= 0 || threshold <= 0 || p_eh_max <= 0)
            throw invalid_input("NonlinearEhParams: a, b, p_eh_max must be > 0");
    }
};

/// Channel realization for all K pairs, pre-ordered so that uplink gains
/// ascend: gain[0] <= gain[1] <= ... <= gain[K-1].
struct ChannelSet {
    std::vector<Eigen::VectorXcd> uplink;      // h_k, length N
    std::vector<Eigen::RowVectorXcd> downlink;  // g_k, length N
    std::vector<double> gain;                   // ||h_k||^2 cached

    int num_pairs() const { return static_cast<int>(uplink.size()); }
    int num_antennas() const {
        return uplink.empty() ? 0 : static_cast<int>(uplink[0].size());
    }

    void validate() const {
        if (uplink.size() != downlink.size() || uplink.size() != gain.size())
            throw invalid_input("ChannelSet: inconsistent sizes");
        for (std::size_t k = 0; k + 1 < gain.size(); ++k)
            if (gain[k] > gain[k + 1])
                throw invalid_input("ChannelSet: gains must ascend");
        for (const auto& h : uplink)
            if (!h.allFinite()) throw invalid_input("ChannelSet: non-finite channel entry");
        for (const auto& g : downlink)
            if (!g.allFinite()) throw invalid_input("ChannelSet: non-finite channel entry");
    }
};

enum class ComputingMode { ACC, DCC };

/// Candidate operating point in original problem variables.
struct Allocation {
    Eigen::VectorXd p;                   // source amplitudes [sqrt(W)], size K
    std::vector<Eigen::VectorXcd> w;     // relay beamformers, K vectors of length N
    double tau = 0.5;                    // SWIPT time fraction
    double alpha = 0.5;                  // ID power split
    double beta = 0.5;                   // ACC split
};

struct RateReport {
    std::vector<double> r1;   // first-hop rates [nats/s/Hz]
    std::vector<double> r2;   // second-hop rates
    std::vector<double> e2e;  // min of the two
    double min_rate = 0.0;    // min over pairs
};

struct PowerReport {
    double p_in = 0.0;   // EH-circuit input power [W]
    double p_dc = 0.0;   // harvested DC power [W]
    double p_acc = 0.0;  // AC-computing supply power [W]
    double p_tot = 0.0;  // relay consumption [W]
    // Signed slacks, >= 0 means satisfied.
    double slack_dc_budget = 0.0;           // (8b): p_dc - p_tot, or (9) in DCC mode
    double slack_computing = 0.0;           // (8c): p_acc - p_acc_min (ACC mode)
    std::vector<double> slack_src_power;    // (8d): p_src_max[k] - p[k]^2
    bool clamped = false;                   // tau/alpha/beta were outside open interval

    bool feasible(double tol = 0.0) const {
        if (slack_dc_budget < -tol || slack_computing < -tol) return false;
        for (double s : slack_src_power)
            if (s < -tol) return false;
        return true;
    }
};

namespace detail {

inline double clamp_fraction(double v, bool& clamped) {
    constexpr double lo = 1e-6, hi = 1.0 - 1e-6;
    if (v < lo || v > hi) {
        clamped = true;
        return std::clamp(v, lo, hi);
    }
    return v;
}

/// Interference-plus-noise covariance Phi_k seen when decoding s_k.
/// With SIC (decoding order s_K..s_1) only l < k interfere; without SIC
/// every other user does.
inline Eigen::MatrixXcd interference_cov(const ChannelSet& chan, const SystemParams& params,
                                         const Eigen::VectorXd& p, double alpha, int k,
                                         bool sic) {
    const int n = chan.num_antennas();
    Eigen::MatrixXcd phi =
        (params.sigma_ant2 + params.sigma_r2 / alpha) * Eigen::MatrixXcd::Identity(n, n);
    for (int l = 0; l < chan.num_pairs(); ++l) {
        const bool interferes = sic ? (l < k) : (l != k);
        if (interferes) phi += p[l] * p[l] * chan.uplink[l] * chan.uplink[l].adjoint();
    }
    return phi;
}

}  // namespace detail

/// First-hop SINR gamma_{1,k} = p_k^2 h_k^H Phi_k^{-1} h_k.
inline double gamma1(const ChannelSet& chan, const SystemParams& params,
                     const Eigen::VectorXd& p, double alpha, int k, bool sic = true) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw invalid_input("gamma1: alpha must be in (0,1)");
    if (!p.allFinite() || (p.array() < 0.0).any())
        throw invalid_input("gamma1: p must be finite and nonnegative");
    chan.validate();
    const Eigen::MatrixXcd phi = detail::interference_cov(chan, params, p, alpha, k, sic);
    // Phi is Hermitian positive definite (noise terms), solve via LLT.
    const Eigen::VectorXcd x = Eigen::LLT<Eigen::MatrixXcd>(phi).solve(chan.uplink[k]);
    return p[k] * p[k] * std::real(chan.uplink[k].dot(x));
}

inline double rate1(const ChannelSet& chan, const SystemParams& params,
                    const Eigen::VectorXd& p, double tau, double alpha, int k,
                    bool sic = true) {
    if (!(tau > 0.0 && tau < 1.0)) throw invalid_input("rate1: tau must be in (0,1)");
    return tau * std::log1p(gamma1(chan, params, p, alpha, k, sic));
}

/// Second-hop SINR gamma_{2,k} = |g_k w_k|^2 / (sum_{l!=k} |g_k w_l|^2 + sigma_k^2).
inline double gamma2(const ChannelSet& chan, const SystemParams& params,
                     const std::vector<Eigen::VectorXcd>& w, int k) {
    if (static_cast<int>(w.size()) != chan.num_pairs())
        throw invalid_input("gamma2: w must have K vectors");
    for (const auto& wk : w)
        if (wk.size() != chan.num_antennas())
            throw invalid_input("gamma2: beamformer length mismatch");
    double interference = params.sigma_k2[k];
    for (int l = 0; l < chan.num_pairs(); ++l) {
        if (l == k) continue;
        interference += std::norm((chan.downlink[k] * w[l])(0));
    }
    return std::norm((chan.downlink[k] * w[k])(0)) / interference;
}

inline double rate2(const ChannelSet& chan, const SystemParams& params,
                    const std::vector<Eigen::VectorXcd>& w, double tau, int k) {
    if (!(tau > 0.0 && tau < 1.0)) throw invalid_input("rate2: tau must be in (0,1)");
    return (1.0 - tau) * std::log1p(gamma2(chan, params, w, k));
}

/// Harvested AC power supplying the ACC logic: tau (1-alpha) beta sum p_k^2 ||h_k||^2.
inline double p_acc(const ChannelSet& chan, const Eigen::VectorXd& p, double tau,
                    double alpha, double beta) {
    double sum = 0.0;
    for (int k = 0; k < chan.num_pairs(); ++k) sum += p[k] * p[k] * chan.gain[k];
    return tau * (1.0 - alpha) * beta * sum;
}

/// EH-circuit input power (1-alpha)(1-beta) sum p_k^2 ||h_k||^2.
inline double p_in(const ChannelSet& chan, const Eigen::VectorXd& p, double alpha,
                   double beta) {
    double sum = 0.0;
    for (int k = 0; k < chan.num_pairs(); ++k) sum += p[k] * p[k] * chan.gain[k];
    return (1.0 - alpha) * (1.0 - beta) * sum;
}

/// Harvested DC power under the sigmoidal rectifier model.
inline double p_dc(const ChannelSet& chan, const NonlinearEhParams& eh,
                   const Eigen::VectorXd& p, double tau, double alpha, double beta) {
    const double pin = p_in(chan, p, alpha, beta);
    const double s = sigmoid(eh.steepness * (pin - eh.threshold));
    return tau * eh.xi() * (s - eh.omega());
}

/// Relay consumption: (1-tau) sum ||w_k||^2 + p_static.
inline double p_tot(const SystemParams& params, const std::vector<Eigen::VectorXcd>& w,
                    double tau) {
    if (!(tau > 0.0 && tau < 1.0)) throw invalid_input("p_tot: tau must be in (0,1)");
    double bf = 0.0;
    for (const auto& wk : w) bf += wk.squaredNorm();
    return (1.0 - tau) * bf + params.p_static;
}

/// Full evaluation of a candidate point against the model: rates and the
/// signed constraint slacks of the max-min problem. Infeasibility is data,
/// not an error.
inline std::pair<RateReport, PowerReport> evaluate(const ChannelSet& chan,
                                                   const SystemParams& params,
                                                   const NonlinearEhParams& eh,
                                                   const Allocation& alloc,
                                                   ComputingMode mode = ComputingMode::ACC,
                                                   bool sic = true) {
    const int k_pairs = chan.num_pairs();
    PowerReport pr;
    const double tau = detail::clamp_fraction(alloc.tau, pr.clamped);
    const double alpha = detail::clamp_fraction(alloc.alpha, pr.clamped);
    const double beta = detail::clamp_fraction(alloc.beta, pr.clamped);

    RateReport rr;
    rr.r1.resize(k_pairs);
    rr.r2.resize(k_pairs);
    rr.e2e.resize(k_pairs);
    for (int k = 0; k < k_pairs; ++k) {
        rr.r1[k] = rate1(chan, params, alloc.p, tau, alpha, k, sic);
        rr.r2[k] = rate2(chan, params, alloc.w, tau, k);
        rr.e2e[k] = std::min(rr.r1[k], rr.r2[k]);
    }
    rr.min_rate = *std::min_element(rr.e2e.begin(), rr.e2e.end());

    pr.p_in = p_in(chan, alloc.p, alpha, beta);
    pr.p_dc = p_dc(chan, eh, alloc.p, tau, alpha, beta);
    pr.p_acc = p_acc(chan, alloc.p, tau, alpha, beta);
    pr.p_tot = p_tot(params, alloc.w, tau);
    if (mode == ComputingMode::ACC) {
        pr.slack_dc_budget = pr.p_dc - pr.p_tot;
        pr.slack_computing = pr.p_acc - params.p_acc_min;
    } else {
        // DCC: beta is forced to 0 and the DC budget absorbs p_dcc_min.
        pr.slack_dc_budget = pr.p_dc - pr.p_tot - params.p_dcc_min;
        pr.slack_computing = pr.slack_dc_budget;
    }
    pr.slack_src_power.resize(k_pairs);
    for (int k = 0; k < k_pairs; ++k)
        pr.slack_src_power[k] = params.p_src_max[k] - alloc.p[k] * alloc.p[k];
    return {rr, pr};
}

}  // namespace wprelay
