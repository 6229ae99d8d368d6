#pragma once

// Dense homogeneous self-dual primal-dual interior-point solver for the
// canonical cone program
//     minimize c.x   s.t.  A x = b,  G x + s = h,  s in R^l_+ x SOC x ...
// with Nesterov-Todd scaling and Mehrotra predictor-corrector steps.

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <ostream>
#include <vector>

#include "wprelay/conic/program.hpp"

namespace wprelay::conic {

struct SolverSettings {
    double tol = 1e-8;          // residual and gap tolerance
    int max_iters = 200;
    double step_fraction = 0.99;
    int equil_iters = 3;        // Ruiz equilibration passes
    double reg = 1e-10;         // static KKT regularization
    std::ostream* trace = nullptr;  // per-iteration diagnostics, if set
};

class ConeSolver {
public:
    explicit ConeSolver(SolverSettings settings = {}) : settings_(settings) {}

    ConeSolution solve(const ConeProgram& prog) {
        Canonical can = canonicalize(prog);
        return solve_canonical(std::move(can));
    }

    /// Solve with a magnitude hint: `hint` predicts the order of magnitude
    /// of each variable at the optimum (e.g. a known near-feasible point),
    /// and the program is renormalized around it before solving.
    ConeSolution solve(const ConeProgram& prog, const Eigen::VectorXd& hint) {
        Eigen::VectorXd mags;
        ConeProgram scaled = rescale_at(prog, hint, mags);
        ConeSolution sol = solve(scaled);
        if (sol.x.size() == mags.size()) sol.x = sol.x.cwiseProduct(mags);
        return sol;
    }

    ConeSolution solve_canonical(Canonical can);

private:
    SolverSettings settings_;
};

namespace ipm_detail {

constexpr double kBig = 1e30;

struct ConeLayout {
    int l = 0;                  // LP rows
    std::vector<int> q;         // SOC dims
    std::vector<int> offs;      // start offset of each SOC block
    int m = 0;

    explicit ConeLayout(int lin, std::vector<int> socs) : l(lin), q(std::move(socs)) {
        int off = l;
        for (int d : q) {
            offs.push_back(off);
            off += d;
        }
        m = off;
    }
    int degree() const { return l + static_cast<int>(q.size()); }
};

/// Per-iteration Nesterov-Todd scaling: W z = W^{-1} s = lambda.
struct Scaling {
    Eigen::VectorXd lp_w;   // sqrt(s_i / z_i) on the LP part
    std::vector<Eigen::MatrixXd> soc_w;     // symmetric W per block
    std::vector<Eigen::MatrixXd> soc_winv;
    std::vector<Eigen::MatrixXd> soc_w2;    // W * W
    Eigen::VectorXd lambda;

    bool compute(const ConeLayout& lay, const Eigen::VectorXd& s,
                 const Eigen::VectorXd& z) {
        lp_w.resize(lay.l);
        lambda.resize(lay.m);
        for (int i = 0; i < lay.l; ++i) {
            if (s[i] <= 0.0 || z[i] <= 0.0) return false;
            lp_w[i] = std::sqrt(s[i] / z[i]);
            lambda[i] = std::sqrt(s[i] * z[i]);
        }
        soc_w.clear();
        soc_winv.clear();
        soc_w2.clear();
        for (std::size_t b = 0; b < lay.q.size(); ++b) {
            const int d = lay.q[b];
            const auto sb = s.segment(lay.offs[b], d);
            const auto zb = z.segment(lay.offs[b], d);
            const double s_res = (sb[0] - sb.tail(d - 1).norm()) * (sb[0] + sb.tail(d - 1).norm());
            const double z_res = (zb[0] - zb.tail(d - 1).norm()) * (zb[0] + zb.tail(d - 1).norm());
            if (s_res <= 0.0 || z_res <= 0.0 || sb[0] <= 0.0 || zb[0] <= 0.0) return false;
            const double a_s = std::sqrt(s_res);
            const double a_z = std::sqrt(z_res);
            Eigen::VectorXd sbar = sb / a_s;
            Eigen::VectorXd zbar = zb / a_z;
            const double gamma = std::sqrt((1.0 + sbar.dot(zbar)) / 2.0);
            Eigen::VectorXd jz = zbar;
            jz.tail(d - 1) = -jz.tail(d - 1);
            Eigen::VectorXd v = (sbar + jz) / (2.0 * gamma);  // scaling point, v' J v = 1
            const double beta = std::sqrt(a_s / a_z);

            Eigen::MatrixXd Wbar(d, d);
            Wbar(0, 0) = v[0];
            Wbar.block(0, 1, 1, d - 1) = v.tail(d - 1).transpose();
            Wbar.block(1, 0, d - 1, 1) = v.tail(d - 1);
            Wbar.block(1, 1, d - 1, d - 1) =
                Eigen::MatrixXd::Identity(d - 1, d - 1) +
                v.tail(d - 1) * v.tail(d - 1).transpose() / (1.0 + v[0]);
            Eigen::MatrixXd W = beta * Wbar;
            Eigen::MatrixXd Winv = Wbar / beta;  // J Wbar J / (v'Jv)
            Winv.block(0, 1, 1, d - 1) *= -1.0;
            Winv.block(1, 0, d - 1, 1) *= -1.0;
            soc_w.push_back(W);
            soc_winv.push_back(Winv);
            soc_w2.push_back(W * W);
            lambda.segment(lay.offs[b], d) = W * zb;
        }
        return true;
    }

    Eigen::VectorXd apply(const ConeLayout& lay, const Eigen::VectorXd& u) const {
        Eigen::VectorXd out(lay.m);
        out.head(lay.l) = lp_w.cwiseProduct(u.head(lay.l));
        for (std::size_t b = 0; b < lay.q.size(); ++b)
            out.segment(lay.offs[b], lay.q[b]) =
                soc_w[b] * u.segment(lay.offs[b], lay.q[b]);
        return out;
    }

    Eigen::VectorXd apply_inv(const ConeLayout& lay, const Eigen::VectorXd& u) const {
        Eigen::VectorXd out(lay.m);
        out.head(lay.l) = u.head(lay.l).cwiseQuotient(lp_w);
        for (std::size_t b = 0; b < lay.q.size(); ++b)
            out.segment(lay.offs[b], lay.q[b]) =
                soc_winv[b] * u.segment(lay.offs[b], lay.q[b]);
        return out;
    }
};

inline Eigen::VectorXd jordan_prod(const ConeLayout& lay, const Eigen::VectorXd& u,
                                   const Eigen::VectorXd& v) {
    Eigen::VectorXd out(lay.m);
    out.head(lay.l) = u.head(lay.l).cwiseProduct(v.head(lay.l));
    for (std::size_t b = 0; b < lay.q.size(); ++b) {
        const int d = lay.q[b], o = lay.offs[b];
        const auto ub = u.segment(o, d);
        const auto vb = v.segment(o, d);
        out[o] = ub.dot(vb);
        out.segment(o + 1, d - 1) = ub[0] * vb.tail(d - 1) + vb[0] * ub.tail(d - 1);
    }
    return out;
}

/// Solve lambda o x = d.
inline Eigen::VectorXd jordan_div(const ConeLayout& lay, const Eigen::VectorXd& lambda,
                                  const Eigen::VectorXd& d) {
    Eigen::VectorXd out(lay.m);
    out.head(lay.l) = d.head(lay.l).cwiseQuotient(lambda.head(lay.l));
    for (std::size_t b = 0; b < lay.q.size(); ++b) {
        const int dim = lay.q[b], o = lay.offs[b];
        const auto lb = lambda.segment(o, dim);
        const auto db = d.segment(o, dim);
        const double rho = lb[0] * lb[0] - lb.tail(dim - 1).squaredNorm();
        const double x0 = (lb[0] * db[0] - lb.tail(dim - 1).dot(db.tail(dim - 1))) / rho;
        out[o] = x0;
        out.segment(o + 1, dim - 1) = (db.tail(dim - 1) - x0 * lb.tail(dim - 1)) / lb[0];
    }
    return out;
}

inline Eigen::VectorXd cone_identity(const ConeLayout& lay) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(lay.m);
    e.head(lay.l).setOnes();
    for (std::size_t b = 0; b < lay.q.size(); ++b) e[lay.offs[b]] = 1.0;
    return e;
}

/// Smallest spectral value of u relative to the cone (positive iff interior).
inline double min_eig(const ConeLayout& lay, const Eigen::VectorXd& u) {
    double me = std::numeric_limits<double>::infinity();
    for (int i = 0; i < lay.l; ++i) me = std::min(me, u[i]);
    for (std::size_t b = 0; b < lay.q.size(); ++b) {
        const int d = lay.q[b], o = lay.offs[b];
        me = std::min(me, u[o] - u.segment(o + 1, d - 1).norm());
    }
    return me;
}

/// Largest step alpha with u + alpha du remaining in the cone.
inline double max_step(const ConeLayout& lay, const Eigen::VectorXd& u,
                       const Eigen::VectorXd& du) {
    double alpha = kBig;
    for (int i = 0; i < lay.l; ++i)
        if (du[i] < 0.0) alpha = std::min(alpha, -u[i] / du[i]);
    for (std::size_t b = 0; b < lay.q.size(); ++b) {
        const int d = lay.q[b], o = lay.offs[b];
        const auto ub = u.segment(o, d);
        const auto db = du.segment(o, d);
        const double a2 = db[0] * db[0] - db.tail(d - 1).squaredNorm();
        const double b2 = 2.0 * (ub[0] * db[0] - ub.tail(d - 1).dot(db.tail(d - 1)));
        const double c2 = ub[0] * ub[0] - ub.tail(d - 1).squaredNorm();
        double root = kBig;
        if (std::abs(a2) < 1e-300) {
            if (b2 < 0.0) root = -c2 / b2;
        } else {
            const double disc = b2 * b2 - 4.0 * a2 * c2;
            if (disc >= 0.0) {
                const double sq = std::sqrt(disc);
                const double r1 = (-b2 - sq) / (2.0 * a2);
                const double r2 = (-b2 + sq) / (2.0 * a2);
                const double lo = std::min(r1, r2), hi = std::max(r1, r2);
                if (lo > 0.0)
                    root = lo;
                else if (hi > 0.0 && a2 < 0.0)
                    root = hi;
            }
        }
        alpha = std::min(alpha, root);
    }
    return alpha;
}

}  // namespace ipm_detail

inline ConeSolution ConeSolver::solve_canonical(Canonical can) {
    using namespace ipm_detail;
    const int n = static_cast<int>(can.c.size());
    const int p = static_cast<int>(can.b.size());
    ConeLayout lay(can.num_lin, can.soc_dims);
    const int m = lay.m;
    ConeSolution sol;
    if (m == 0) throw numerical_error("ConeSolver: program has no conic rows");

    // --- Ruiz equilibration on [A; G] with cone rows scaled as a group.
    Eigen::MatrixXd A = Eigen::MatrixXd(can.A);
    Eigen::MatrixXd G = Eigen::MatrixXd(can.G);
    Eigen::VectorXd c = can.c, b = can.b, h = can.h;
    Eigen::VectorXd col_e = Eigen::VectorXd::Ones(n);
    Eigen::VectorXd rowA_e = Eigen::VectorXd::Ones(p);
    Eigen::VectorXd rowG_e = Eigen::VectorXd::Ones(m);
    for (int pass = 0; pass < settings_.equil_iters; ++pass) {
        Eigen::VectorXd cm = Eigen::VectorXd::Zero(n);
        for (int j = 0; j < n; ++j) {
            double v = 0.0;
            if (p > 0) v = A.col(j).cwiseAbs().maxCoeff();
            v = std::max(v, G.col(j).cwiseAbs().maxCoeff());
            cm[j] = v;
        }
        Eigen::VectorXd rmA(p), rmG(m);
        for (int i = 0; i < p; ++i) rmA[i] = A.row(i).cwiseAbs().maxCoeff();
        for (int i = 0; i < m; ++i) rmG[i] = G.row(i).cwiseAbs().maxCoeff();
        // Cone rows share one scale (max over the block) to preserve the cone.
        for (std::size_t bk = 0; bk < lay.q.size(); ++bk) {
            const double g = rmG.segment(lay.offs[bk], lay.q[bk]).maxCoeff();
            rmG.segment(lay.offs[bk], lay.q[bk]).setConstant(g);
        }
        auto root = [](double v) { return v < 1e-12 ? 1.0 : std::sqrt(v); };
        cm = cm.unaryExpr(root);
        rmA = rmA.unaryExpr(root);
        rmG = rmG.unaryExpr(root);
        for (int i = 0; i < p; ++i) A.row(i) /= rmA[i];
        for (int i = 0; i < m; ++i) G.row(i) /= rmG[i];
        for (int j = 0; j < n; ++j) {
            A.col(j) /= cm[j];
            G.col(j) /= cm[j];
        }
        col_e = col_e.cwiseProduct(cm);
        rowA_e = rowA_e.cwiseProduct(rmA);
        rowG_e = rowG_e.cwiseProduct(rmG);
    }
    c = c.cwiseQuotient(col_e);
    b = b.cwiseQuotient(rowA_e);
    h = h.cwiseQuotient(rowG_e);
    // Normalize overall cost scale.
    const double cost_scale = std::max(1.0, c.cwiseAbs().maxCoeff());
    c /= cost_scale;

    const Eigen::MatrixXd At = A.transpose();
    const Eigen::MatrixXd Gt = G.transpose();
    const int dim = n + p + m;

    Scaling W;
    Eigen::MatrixXd K(dim, dim);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu;

    auto assemble = [&](bool identity_scaling) {
        K.setZero();
        K.block(0, n, n, p) = At;
        K.block(n, 0, p, n) = A;
        K.block(0, n + p, n, m) = Gt;
        K.block(n + p, 0, m, n) = G;
        if (identity_scaling) {
            K.block(n + p, n + p, m, m) = -Eigen::MatrixXd::Identity(m, m);
        } else {
            Eigen::MatrixXd W2 = Eigen::MatrixXd::Zero(m, m);
            W2.diagonal().head(lay.l) = W.lp_w.cwiseAbs2();
            for (std::size_t bk = 0; bk < lay.q.size(); ++bk)
                W2.block(lay.offs[bk], lay.offs[bk], lay.q[bk], lay.q[bk]) = W.soc_w2[bk];
            K.block(n + p, n + p, m, m) = -W2;
        }
        K.diagonal().head(n).array() += settings_.reg;
        K.diagonal().segment(n, p).array() -= settings_.reg;
        K.diagonal().tail(m).array() -= settings_.reg;
        lu.compute(K);
    };

    auto kkt_mul = [&](const Eigen::VectorXd& u, bool identity_scaling) {
        Eigen::VectorXd out(dim);
        const auto ux = u.head(n);
        const auto uy = u.segment(n, p);
        const auto uz = u.tail(m);
        out.head(n) = At * uy + Gt * uz;
        out.segment(n, p) = A * ux;
        if (identity_scaling) {
            out.tail(m) = G * ux - uz;
        } else {
            Eigen::VectorXd w2uz(m);
            w2uz.head(lay.l) = W.lp_w.cwiseAbs2().cwiseProduct(uz.head(lay.l));
            for (std::size_t bk = 0; bk < lay.q.size(); ++bk)
                w2uz.segment(lay.offs[bk], lay.q[bk]) =
                    W.soc_w2[bk] * uz.segment(lay.offs[bk], lay.q[bk]);
            out.tail(m) = G * ux - w2uz;
        }
        return out;
    };

    auto kkt_solve = [&](const Eigen::VectorXd& bx, const Eigen::VectorXd& by,
                         const Eigen::VectorXd& bz, bool identity_scaling) {
        Eigen::VectorXd rhs(dim);
        rhs << bx, by, bz;
        Eigen::VectorXd u = lu.solve(rhs);
        // One step of iterative refinement against the unregularized operator.
        Eigen::VectorXd r = rhs - kkt_mul(u, identity_scaling);
        u += lu.solve(r);
        return u;
    };

    // --- Initial point.
    assemble(true);
    Eigen::VectorXd x, y, z, s;
    {
        Eigen::VectorXd u = kkt_solve(Eigen::VectorXd::Zero(n), b, h, true);
        x = u.head(n);
        s = -(u.tail(m));  // = h - G x
        const double shift = -min_eig(lay, s);
        if (shift >= -1e-8 * std::max(1.0, s.norm())) {
            Eigen::VectorXd e = cone_identity(lay);
            s += (shift + 1.0) * e;
        }
        u = kkt_solve(-c, Eigen::VectorXd::Zero(p), Eigen::VectorXd::Zero(m), true);
        y = u.segment(n, p);
        z = u.tail(m);
        const double shift_z = -min_eig(lay, z);
        if (shift_z >= -1e-8 * std::max(1.0, z.norm())) {
            Eigen::VectorXd e = cone_identity(lay);
            z += (shift_z + 1.0) * e;
        }
    }
    double tau = 1.0, kappa = 1.0;

    const double norm_b = std::max(1.0, b.norm());
    const double norm_h = std::max(1.0, h.norm());
    const double norm_c = std::max(1.0, c.norm());
    const Eigen::VectorXd e = cone_identity(lay);

    auto finish = [&](SolveStatus st, int iters, double pres, double dres, double gap) {
        // Accept a reduced-accuracy solution when the iteration stalls just
        // short of the target tolerance (floating-point exhaustion near the
        // optimum, not a modelling failure).
        if (st == SolveStatus::NumericalLimit && tau > 1e-12) {
            const double relgap =
                gap / std::max(1.0, std::abs(c.dot(x) / tau));
            if (pres <= 5e-5 && dres <= 5e-5 && relgap <= 5e-5)
                st = SolveStatus::Optimal;
        }
        // A stalled iteration usually means the homogeneous model drove
        // tau -> 0; reclassify via the (looser) certificate tests.
        if (st == SolveStatus::NumericalLimit) {
            const double hzby = b.dot(y) + h.dot(z);
            if (hzby < 0.0 &&
                (At * y + Gt * z).norm() <= 1e-6 * norm_c * (-hzby))
                st = SolveStatus::Infeasible;
            const double cx = c.dot(x);
            if (st == SolveStatus::NumericalLimit && cx < 0.0 &&
                std::max((A * x).norm(), (G * x + s).norm()) <=
                    1e-6 * std::max(norm_b, norm_h) * (-cx))
                st = SolveStatus::Unbounded;
        }
        sol.status = st;
        sol.iterations = iters;
        sol.primal_residual = pres;
        sol.dual_residual = dres;
        sol.gap = gap;
        if (tau > 1e-12) {
            Eigen::VectorXd xs = x / tau;
            sol.x = xs.cwiseQuotient(col_e);
            sol.obj = -(can.c.dot(sol.x));
        } else {
            sol.x = Eigen::VectorXd::Zero(n);
            sol.obj = 0.0;
        }
        return sol;
    };

    double pres = 0, dres = 0, absgap = 0;
    for (int iter = 0; iter < settings_.max_iters; ++iter) {
        const Eigen::VectorXd rx = At * y + Gt * z + c * tau;
        const Eigen::VectorXd ry = A * x - b * tau;
        const Eigen::VectorXd rz = G * x + s - h * tau;
        const double rt = c.dot(x) + b.dot(y) + h.dot(z) + kappa;
        const double gap = s.dot(z);
        const double mu = (gap + tau * kappa) / (lay.degree() + 1);

        const double pcost = c.dot(x) / tau;
        pres = std::max(ry.norm() / norm_b, rz.norm() / norm_h) / tau;
        dres = rx.norm() / norm_c / tau;
        absgap = gap / (tau * tau);
        const double relgap = absgap / std::max(1.0, std::abs(pcost));

        if (settings_.trace)
            *settings_.trace << "iter=" << iter << " mu=" << mu << " tau=" << tau
                             << " kappa=" << kappa << " pres=" << pres
                             << " dres=" << dres << " gap=" << absgap
                             << " relgap=" << relgap << '\n';

        if (pres <= settings_.tol && dres <= settings_.tol &&
            (absgap <= settings_.tol || relgap <= settings_.tol))
            return finish(SolveStatus::Optimal, iter, pres, dres, absgap);

        // Certificates of primal / dual infeasibility.
        const double hzby = b.dot(y) + h.dot(z);
        if (hzby < 0.0) {
            const double cert = (At * y + Gt * z).norm() / (-hzby);
            if (cert <= settings_.tol * norm_c)
                return finish(SolveStatus::Infeasible, iter, pres, dres, absgap);
        }
        const double cx = c.dot(x);
        if (cx < 0.0) {
            const double cert =
                std::max((A * x).norm(), (G * x + s).norm()) / (-cx);
            if (cert <= settings_.tol * std::max(norm_b, norm_h))
                return finish(SolveStatus::Unbounded, iter, pres, dres, absgap);
        }

        if (!W.compute(lay, s, z)) {
            if (settings_.trace) *settings_.trace << "  exit: NT scaling failed\n";
            return finish(SolveStatus::NumericalLimit, iter, pres, dres, absgap);
        }
        assemble(false);

        // u1 depends only on the factorization; shared by both solves.
        const Eigen::VectorXd u1 = kkt_solve(-c, b, h, false);
        const double denom_base =
            c.dot(u1.head(n)) + b.dot(u1.segment(n, p)) + h.dot(u1.tail(m)) - kappa / tau;

        auto direction = [&](double sigma, const Eigen::VectorXd& comp_rhs,
                             double comp_tk, Eigen::VectorXd& dx, Eigen::VectorXd& dy,
                             Eigen::VectorXd& dz, Eigen::VectorXd& ds, double& dtau,
                             double& dkappa) {
            const double rscale = 1.0 - sigma;
            const Eigen::VectorXd lam_div = jordan_div(lay, W.lambda, comp_rhs);
            const Eigen::VectorXd bz = -rscale * rz - W.apply(lay, lam_div);
            const Eigen::VectorXd u2 =
                kkt_solve(-rscale * rx, -rscale * ry, bz, false);
            const double num = -rscale * rt - comp_tk / tau -
                               (c.dot(u2.head(n)) + b.dot(u2.segment(n, p)) +
                                h.dot(u2.tail(m)));
            dtau = num / denom_base;
            dx = u2.head(n) + dtau * u1.head(n);
            dy = u2.segment(n, p) + dtau * u1.segment(n, p);
            dz = u2.tail(m) + dtau * u1.tail(m);
            ds = W.apply(lay, lam_div - W.apply(lay, dz));
            dkappa = (comp_tk - kappa * dtau) / tau;
        };

        auto step_limit = [&](const Eigen::VectorXd& ds, const Eigen::VectorXd& dz,
                              double dtau, double dkappa) {
            double a = std::min(max_step(lay, s, ds), max_step(lay, z, dz));
            if (dtau < 0.0) a = std::min(a, -tau / dtau);
            if (dkappa < 0.0) a = std::min(a, -kappa / dkappa);
            return a;
        };

        // Predictor.
        Eigen::VectorXd dx, dy, dz, ds;
        double dtau, dkappa;
        const Eigen::VectorXd lam2 = jordan_prod(lay, W.lambda, W.lambda);
        direction(0.0, -lam2, -tau * kappa, dx, dy, dz, ds, dtau, dkappa);
        const double a_aff = std::min(1.0, step_limit(ds, dz, dtau, dkappa));
        const double sigma = std::pow(1.0 - a_aff, 3.0);

        // Corrector (Mehrotra second-order term in scaled space).
        const Eigen::VectorXd ds_scaled = W.apply_inv(lay, ds);
        const Eigen::VectorXd dz_scaled = W.apply(lay, dz);
        Eigen::VectorXd comp = -lam2 + sigma * mu * e - jordan_prod(lay, ds_scaled, dz_scaled);
        const double comp_tk = -tau * kappa + sigma * mu - dtau * dkappa;
        direction(sigma, comp, comp_tk, dx, dy, dz, ds, dtau, dkappa);

        double alpha = settings_.step_fraction * step_limit(ds, dz, dtau, dkappa);
        alpha = std::min(alpha, 1.0);
        if (settings_.trace)
            *settings_.trace << "  a_aff=" << a_aff << " sigma=" << sigma
                             << " alpha=" << alpha << '\n';
        if (!(alpha > 1e-10) || !std::isfinite(alpha)) {
            if (settings_.trace) *settings_.trace << "  exit: step collapsed\n";
            return finish(SolveStatus::NumericalLimit, iter, pres, dres, absgap);
        }

        x += alpha * dx;
        y += alpha * dy;
        z += alpha * dz;
        s += alpha * ds;
        tau += alpha * dtau;
        kappa += alpha * dkappa;
        if (!(tau > 0.0) || !(kappa > 0.0) || !x.allFinite())
            return finish(SolveStatus::NumericalLimit, iter, pres, dres, absgap);
    }
    return finish(SolveStatus::NumericalLimit, settings_.max_iters, pres, dres, absgap);
}

}  // namespace wprelay::conic
