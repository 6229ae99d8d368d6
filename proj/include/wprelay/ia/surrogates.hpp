#pragma once

// Inner-approximation surrogates built around an expansion point: the
// log-rate minorant, the first-hop SINR minorant, the beam-gain minorant,
// the Taylor pieces of the energy-harvesting decomposition, and the
// bilinear upper bound. Each bundle carries the constant coefficients of
// an affine/quadratic expression plus an `exact` helper for tests.

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <cmath>
#include <utility>
#include <vector>

#include "wprelay/ia/expansion.hpp"
#include "wprelay/model.hpp"

namespace wprelay::ia {

/// Minorant of f(psi, tau) = ln(1 + 1/psi) / tau on (psi > 0, tau > 1):
/// f^(k)(psi, tau) = A + B psi + C tau, tangent at (psi0, tau0).
struct RateSurrogate {
    double a = 0.0;  // constant term
    double b = 0.0;  // psi coefficient, <= 0
    double c = 0.0;  // tau coefficient, <= 0

    double eval(double psi, double tau) const { return a + b * psi + c * tau; }
    static double exact(double psi, double tau) { return std::log1p(1.0 / psi) / tau; }
};

/// i selects the hop: 0 uses (psi1, tau1), 1 uses (psi2, tau2).
inline RateSurrogate surrogate_rate(const ExpansionPoint& ep, int i, int k) {
    const double psi0 = i == 0 ? ep.psi1[k] : ep.psi2[k];
    const double tau0 = i == 0 ? ep.tau1 : ep.tau2;
    if (!(psi0 > 0.0 && tau0 > 1.0))
        throw invalid_input("surrogate_rate: requires psi > 0 and tau > 1");
    RateSurrogate s;
    const double lg = std::log1p(1.0 / psi0);
    s.a = 2.0 * lg / tau0 + 1.0 / ((psi0 + 1.0) * tau0);
    s.b = -1.0 / (psi0 * (psi0 + 1.0) * tau0);
    s.c = -lg / (tau0 * tau0);
    return s;
}

/// Minorant of h(p_k, PhiBar) = p_k^2 h_k^H PhiBar^{-1} h_k, with
/// PhiBar = sum_{interferers l} p_l^2 h_l h_l^H + sigma_Ant^2 I
///          + alpha1 sigma_R^2 I.
/// h^(k) = c_p p_k + c_alpha1 alpha1 + c_0 - sum_l q_l p_l^2, all q_l >= 0.
struct SinrSurrogate {
    double c_p = 0.0;       // p_k coefficient, > 0
    double c_alpha1 = 0.0;  // alpha1 coefficient, <= 0
    double c_0 = 0.0;       // constant, <= 0
    std::vector<std::pair<int, double>> q;  // (interferer index, weight >= 0)

    double eval(const Eigen::VectorXd& p, double alpha1, int k) const {
        double v = c_p * p[k] + c_alpha1 * alpha1 + c_0;
        for (const auto& [l, w] : q) v -= w * p[l] * p[l];
        return v;
    }
};

namespace detail {

/// Interferer covariance of the reformulated first hop at a given
/// (p, alpha1). With SIC only l < k interfere; without SIC all l != k do.
inline Eigen::MatrixXcd phi_bar(const ChannelSet& chan, const SystemParams& params,
                                const Eigen::VectorXd& p, double alpha1, int k,
                                bool sic) {
    const int n = chan.num_antennas();
    Eigen::MatrixXcd phi =
        (params.sigma_ant2 + alpha1 * params.sigma_r2) * Eigen::MatrixXcd::Identity(n, n);
    for (int l = 0; l < chan.num_pairs(); ++l) {
        const bool interferes = sic ? (l < k) : (l != k);
        if (interferes) phi += p[l] * p[l] * chan.uplink[l] * chan.uplink[l].adjoint();
    }
    return phi;
}

}  // namespace detail

inline SinrSurrogate surrogate_h(const ExpansionPoint& ep, const ChannelSet& chan,
                                 const SystemParams& params, int k, bool sic = true) {
    const Eigen::MatrixXcd phi0 =
        detail::phi_bar(chan, params, ep.p, ep.alpha1, k, sic);
    const Eigen::VectorXcd x = Eigen::LLT<Eigen::MatrixXcd>(phi0).solve(chan.uplink[k]);
    if (!x.allFinite()) throw numerical_error("surrogate_h: singular PhiBar");
    const double pk0 = ep.p[k];
    SinrSurrogate s;
    s.c_p = 2.0 * pk0 * std::real(chan.uplink[k].dot(x));
    const double xn2 = x.squaredNorm();
    s.c_alpha1 = -pk0 * pk0 * params.sigma_r2 * xn2;
    s.c_0 = -pk0 * pk0 * params.sigma_ant2 * xn2;
    for (int l = 0; l < chan.num_pairs(); ++l) {
        const bool interferes = sic ? (l < k) : (l != k);
        if (interferes)
            s.q.emplace_back(l, pk0 * pk0 * std::norm(chan.uplink[l].dot(x)));
    }
    return s;
}

/// Exact counterpart of surrogate_h for tests and activeness checks.
inline double exact_h(const ChannelSet& chan, const SystemParams& params,
                      const Eigen::VectorXd& p, double alpha1, int k, bool sic = true) {
    const Eigen::MatrixXcd phi = detail::phi_bar(chan, params, p, alpha1, k, sic);
    const Eigen::VectorXcd x = Eigen::LLT<Eigen::MatrixXcd>(phi).solve(chan.uplink[k]);
    return p[k] * p[k] * std::real(chan.uplink[k].dot(x));
}

/// Minorant of (Re{g_k w_k})^2: g^(k)(w) = 2 r0 Re{g_k w_k} - r0^2 with
/// r0 = Re{g_k w_k^(kappa)} (valid under condition Re{g_k w_k} >= 0).
struct BeamSurrogate {
    double re0 = 0.0;  // Re{g_k w_k} at the expansion point

    double eval(double re_gw) const { return 2.0 * re0 * re_gw - re0 * re0; }
};

inline BeamSurrogate surrogate_g(const ExpansionPoint& ep, const ChannelSet& chan,
                                 int k) {
    BeamSurrogate s;
    s.re0 = std::real((chan.downlink[k] * ep.w[k])(0));
    return s;
}

/// Minorant of H(p, alpha2) = sum_k p_k^2 ||h_k||^2 / alpha2 (Taylor in
/// (p_k, alpha2)): H^(k) = sum_k c_p[k] p_k + c_alpha2 alpha2.
struct HarvestSurrogate {
    Eigen::VectorXd c_p;      // per-pair p coefficients, > 0
    double c_alpha2 = 0.0;    // alpha2 coefficient, <= 0

    double eval(const Eigen::VectorXd& p, double alpha2) const {
        return c_p.dot(p) + c_alpha2 * alpha2;
    }
    static double exact(const ChannelSet& chan, const Eigen::VectorXd& p, double alpha2) {
        double sum = 0.0;
        for (int k = 0; k < chan.num_pairs(); ++k) sum += p[k] * p[k] * chan.gain[k];
        return sum / alpha2;
    }
};

inline HarvestSurrogate surrogate_harvest(const ExpansionPoint& ep,
                                          const ChannelSet& chan) {
    HarvestSurrogate s;
    const int k_pairs = chan.num_pairs();
    s.c_p.resize(k_pairs);
    for (int k = 0; k < k_pairs; ++k) {
        s.c_p[k] = 2.0 * ep.p[k] * chan.gain[k] / ep.alpha2;
        s.c_alpha2 -= ep.p[k] * ep.p[k] * chan.gain[k] / (ep.alpha2 * ep.alpha2);
    }
    return s;
}

/// Tangent minorant of F(vartheta, beta) = ln(1/vartheta) / (1-beta):
/// ftilde = a0 + a_vartheta vartheta + a_beta (1-beta).
struct FtildeSurrogate {
    double a0 = 0.0;
    double a_vartheta = 0.0;   // <= 0
    double a_one_minus_beta = 0.0;

    double eval(double vartheta, double beta) const {
        return a0 + a_vartheta * vartheta + a_one_minus_beta * (1.0 - beta);
    }
    static double exact(double vartheta, double beta) {
        return std::log(1.0 / vartheta) / (1.0 - beta);
    }
};

inline FtildeSurrogate surrogate_ftilde(const ExpansionPoint& ep) {
    FtildeSurrogate s;
    const double lg = std::log(1.0 / ep.vartheta);
    const double inv = 1.0 / (1.0 - ep.beta);
    s.a0 = 2.0 * lg * inv + inv;
    s.a_vartheta = -inv / ep.vartheta;
    s.a_one_minus_beta = -lg * inv * inv;
    return s;
}

/// Quadratic upper bound of the bilinear product x y around (x0, y0):
/// B(x, y) = 0.5 (x0/y0 y^2 + y0/x0 x^2) >= x y for x, y > 0, tangent at
/// (x0, y0). Used for (tau2-1) vartheta >= (1+vartheta) theta and for the
/// AC-computing floor tau1 / beta.
struct BilinearBound {
    double x0 = 1.0, y0 = 1.0;

    double coeff_y2() const { return 0.5 * x0 / y0; }
    double coeff_x2() const { return 0.5 * y0 / x0; }
    double eval(double x, double y) const {
        return coeff_x2() * x * x + coeff_y2() * y * y;
    }
};

}  // namespace wprelay::ia
