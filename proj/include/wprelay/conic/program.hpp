#pragma once

// Canonical cone-program data model: linear objective (maximize) over real
// variables with linear equalities/inequalities, second-order cone blocks
// ||u(x)|| <= t(x), and rotated blocks 2 x(x) y(x) >= ||u(x)||^2.

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <limits>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "wprelay/common.hpp"

namespace wprelay::conic {

/// Sparse affine expression sum_i coef_i x_{idx_i} + constant.
struct LinExpr {
    std::vector<std::pair<int, double>> terms;
    double constant = 0.0;

    static LinExpr var(int idx, double coef = 1.0) {
        LinExpr e;
        e.terms.emplace_back(idx, coef);
        return e;
    }
    static LinExpr make(double c) {
        LinExpr e;
        e.constant = c;
        return e;
    }
    LinExpr& add(int idx, double coef) {
        terms.emplace_back(idx, coef);
        return *this;
    }
    LinExpr& add_const(double c) {
        constant += c;
        return *this;
    }
    double eval(const Eigen::VectorXd& x) const {
        double v = constant;
        for (const auto& [i, c] : terms) v += c * x[i];
        return v;
    }
};

/// a(x) <= rhs (or == rhs for equality rows).
struct LinRow {
    LinExpr a;
    double rhs = 0.0;
    std::string tag;
};

/// ||u(x)|| <= t(x)
struct SocBlock {
    LinExpr t;
    std::vector<LinExpr> u;
    std::string tag;
};

/// 2 x(x) y(x) >= ||u(x)||^2, x >= 0, y >= 0
struct RsocBlock {
    LinExpr x;
    LinExpr y;
    std::vector<LinExpr> u;
    std::string tag;
};

struct ConeProgram {
    int n = 0;                   // variable count
    Eigen::VectorXd objective;   // maximize objective . x
    std::vector<LinRow> lin_eq;
    std::vector<LinRow> lin_ineq;
    std::vector<SocBlock> soc_blocks;
    std::vector<RsocBlock> rsoc_blocks;
    std::vector<double> lower;   // per-variable bounds
    std::vector<double> upper;

    static constexpr double kInf = std::numeric_limits<double>::infinity();

    explicit ConeProgram(int n_vars = 0) { resize(n_vars); }

    void resize(int n_vars) {
        n = n_vars;
        objective = Eigen::VectorXd::Zero(n);
        lower.assign(n, -kInf);
        upper.assign(n, kInf);
    }

    int add_var(double lo = -kInf, double hi = kInf, double obj = 0.0) {
        objective.conservativeResize(n + 1);
        objective[n] = obj;
        lower.push_back(lo);
        upper.push_back(hi);
        return n++;
    }

    void add_le(LinExpr a, double rhs, std::string tag = {}) {
        lin_ineq.push_back({std::move(a), rhs, std::move(tag)});
    }
    void add_eq(LinExpr a, double rhs, std::string tag = {}) {
        lin_eq.push_back({std::move(a), rhs, std::move(tag)});
    }
    void add_soc(LinExpr t, std::vector<LinExpr> u, std::string tag = {}) {
        soc_blocks.push_back({std::move(t), std::move(u), std::move(tag)});
    }
    void add_rsoc(LinExpr x, LinExpr y, std::vector<LinExpr> u, std::string tag = {}) {
        rsoc_blocks.push_back({std::move(x), std::move(y), std::move(u), std::move(tag)});
    }

    /// Hyperbolic constraint x y >= c (x, y >= 0) as the second-order cone
    /// ||(2 sqrt(c), x - y)|| <= x + y.
    void add_hyperbolic(LinExpr x, LinExpr y, double c, std::string tag = {}) {
        if (c <= 0.0) throw invalid_input("add_hyperbolic: c must be > 0");
        std::vector<LinExpr> u{LinExpr::make(std::sqrt(2.0 * c))};
        add_rsoc(std::move(x), std::move(y), std::move(u), std::move(tag));
    }
    void add_hyperbolic(int x_idx, int y_idx, double c, std::string tag = {}) {
        add_hyperbolic(LinExpr::var(x_idx), LinExpr::var(y_idx), c, std::move(tag));
    }

    /// Quad-over-lin style constraint 2 x y >= ||u||^2.
    void add_quad_over_lin(std::vector<LinExpr> u, LinExpr x, LinExpr y,
                           std::string tag = {}) {
        add_rsoc(std::move(x), std::move(y), std::move(u), std::move(tag));
    }
    void add_quad_over_lin(std::vector<LinExpr> u, int x_idx, int y_idx,
                           std::string tag = {}) {
        add_quad_over_lin(std::move(u), LinExpr::var(x_idx), LinExpr::var(y_idx),
                          std::move(tag));
    }

    /// Worst violation of all constraints at x (0 means feasible).
    double max_violation(const Eigen::VectorXd& x) const {
        double v = 0.0;
        for (int j = 0; j < n; ++j) {
            if (lower[j] > -kInf) v = std::max(v, lower[j] - x[j]);
            if (upper[j] < kInf) v = std::max(v, x[j] - upper[j]);
        }
        for (const auto& row : lin_eq) v = std::max(v, std::abs(row.a.eval(x) - row.rhs));
        for (const auto& row : lin_ineq) v = std::max(v, row.a.eval(x) - row.rhs);
        for (const auto& blk : soc_blocks) {
            double nrm2 = 0.0;
            for (const auto& e : blk.u) {
                const double ui = e.eval(x);
                nrm2 += ui * ui;
            }
            v = std::max(v, std::sqrt(nrm2) - blk.t.eval(x));
        }
        for (const auto& blk : rsoc_blocks) {
            const double bx = blk.x.eval(x);
            const double by = blk.y.eval(x);
            double nrm2 = 0.0;
            for (const auto& e : blk.u) {
                const double ui = e.eval(x);
                nrm2 += ui * ui;
            }
            v = std::max(v, -bx);
            v = std::max(v, -by);
            // Violation measured on the equivalent SOC ||(x-y, sqrt2 u)|| <= x+y.
            const double d = bx - by;
            v = std::max(v, std::sqrt(d * d + 2.0 * nrm2) - (bx + by));
        }
        return v;
    }

    /// One constraint per line, for cross-checking against external solvers.
    void dump(std::ostream& os) const;
};

/// Rescales a program so that a reference point `x0` (a prediction of the
/// solution's magnitudes) maps to O(1) variables and cone slots. Interior-
/// point iterates track the solution norm, so without this a solution
/// coordinate of 1e6 forces the homogeneous embedding towards tau ~ 1e-6
/// and the target tolerance out of numerical reach; conversely a cone whose
/// slots live at 1e-10 hides violations far below any solver tolerance.
/// On return `mags` holds the per-column factors; if `xs` solves the scaled
/// program then `xs.cwiseProduct(mags)` solves the original one (objective
/// unchanged).
inline ConeProgram rescale_at(const ConeProgram& p, const Eigen::VectorXd& x0,
                              Eigen::VectorXd& mags) {
    if (x0.size() != p.n)
        throw invalid_input("rescale_at: reference point has wrong dimension");
    ConeProgram out = p;
    // Columns are only shrunk: a variable that is small at x0 but larger at
    // the optimum would otherwise be blown up arbitrarily.
    mags = x0.cwiseAbs().cwiseMax(1.0);
    // Rows are normalized in both directions, with the upscaling capped so
    // a slot that grows a lot past its x0 value cannot dominate the norm.
    static constexpr double kRowFloor = 1e-8;
    auto row_factor = [](double m) { return 1.0 / std::clamp(m, kRowFloor, 1e30); };
    // Component-wise slot magnitude at x0 (>= |value|, immune to cancelation).
    auto slot_mag = [&](const LinExpr& e) {
        double v = std::abs(e.constant);
        for (const auto& [i, c] : e.terms) v = std::max(v, std::abs(c * x0[i]));
        return v;
    };
    auto scale_expr = [&](LinExpr& e, double rho) {
        for (auto& [i, c] : e.terms) c *= mags[i] * rho;
        e.constant *= rho;
    };
    for (auto rows : {&out.lin_eq, &out.lin_ineq})
        for (auto& row : *rows) {
            const double rho =
                row_factor(std::max(slot_mag(row.a), std::abs(row.rhs)));
            scale_expr(row.a, rho);
            row.rhs *= rho;
        }
    for (auto& blk : out.soc_blocks) {
        double m = slot_mag(blk.t);
        for (const auto& e : blk.u) m = std::max(m, slot_mag(e));
        const double rho = row_factor(m);
        scale_expr(blk.t, rho);
        for (auto& e : blk.u) scale_expr(e, rho);
    }
    for (auto& blk : out.rsoc_blocks) {
        // x and y may be scaled independently; u picks up the geometric mean.
        const double rx = row_factor(slot_mag(blk.x));
        const double ry = row_factor(slot_mag(blk.y));
        scale_expr(blk.x, rx);
        scale_expr(blk.y, ry);
        const double ru = std::sqrt(rx * ry);
        for (auto& e : blk.u) scale_expr(e, ru);
    }
    for (int j = 0; j < p.n; ++j) {
        out.objective[j] *= mags[j];
        out.lower[j] /= mags[j];
        out.upper[j] /= mags[j];
    }
    return out;
}

enum class SolveStatus { Optimal, Infeasible, Unbounded, NumericalLimit };

inline const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::Optimal: return "optimal";
        case SolveStatus::Infeasible: return "infeasible";
        case SolveStatus::Unbounded: return "unbounded";
        case SolveStatus::NumericalLimit: return "numerical_limit";
    }
    return "?";
}

struct ConeSolution {
    SolveStatus status = SolveStatus::NumericalLimit;
    Eigen::VectorXd x;
    double obj = 0.0;  // value of the (maximize) objective
    double primal_residual = 0.0;
    double dual_residual = 0.0;
    double gap = 0.0;
    int iterations = 0;
};

/// Canonical form used by the interior-point solver:
///   minimize c.x  s.t.  A x = b,  G x + s = h,  s in R^l_+ x SOC(q_0) x ...
struct Canonical {
    Eigen::VectorXd c;
    Eigen::SparseMatrix<double> A;
    Eigen::VectorXd b;
    Eigen::SparseMatrix<double> G;
    Eigen::VectorXd h;
    int num_lin = 0;          // leading LP rows of G
    std::vector<int> soc_dims;
};

namespace detail {

inline void push_row(std::vector<Eigen::Triplet<double>>& trips, Eigen::VectorXd& rhs,
                     int row, const LinExpr& e, double scale, double rhs_val) {
    // Row encodes: scale * e(x) <= / == rhs_val  ->  G_row x = scale*coefs,
    // h_row = rhs_val - scale*const.
    for (const auto& [i, c] : e.terms) trips.emplace_back(row, i, scale * c);
    rhs[row] = rhs_val - scale * e.constant;
}

}  // namespace detail

/// Lower a ConeProgram (maximize) to the solver's canonical minimize form.
/// Degenerate cone blocks (empty u) are presolved into linear rows.
inline Canonical canonicalize(const ConeProgram& p) {
    Canonical out;
    out.c = -p.objective;  // maximize -> minimize

    // Equalities.
    {
        std::vector<Eigen::Triplet<double>> trips;
        out.b = Eigen::VectorXd::Zero(static_cast<int>(p.lin_eq.size()));
        int row = 0;
        for (const auto& r : p.lin_eq) detail::push_row(trips, out.b, row++, r.a, 1.0, r.rhs);
        out.A.resize(row, p.n);
        out.A.setFromTriplets(trips.begin(), trips.end());
    }

    // Count inequality rows: bounds + lin_ineq + degenerate cones as LP,
    // then SOC blocks.
    std::vector<Eigen::Triplet<double>> trips;
    std::vector<std::pair<const SocBlock*, int>> socs;       // block, row offset
    std::vector<std::pair<const RsocBlock*, int>> rsocs;
    int rows = 0;
    for (int j = 0; j < p.n; ++j) {
        if (p.lower[j] > -ConeProgram::kInf) ++rows;
        if (p.upper[j] < ConeProgram::kInf) ++rows;
    }
    rows += static_cast<int>(p.lin_ineq.size());
    for (const auto& blk : p.soc_blocks) rows += blk.u.empty() ? 1 : 0;
    for (const auto& blk : p.rsoc_blocks) rows += blk.u.empty() ? 2 : 0;
    out.num_lin = rows;
    for (const auto& blk : p.soc_blocks)
        if (!blk.u.empty()) rows += 1 + static_cast<int>(blk.u.size());
    for (const auto& blk : p.rsoc_blocks)
        if (!blk.u.empty()) rows += 2 + static_cast<int>(blk.u.size());

    out.h = Eigen::VectorXd::Zero(rows);
    int row = 0;
    for (int j = 0; j < p.n; ++j) {
        if (p.lower[j] > -ConeProgram::kInf) {
            trips.emplace_back(row, j, -1.0);
            out.h[row++] = -p.lower[j];
        }
        if (p.upper[j] < ConeProgram::kInf) {
            trips.emplace_back(row, j, 1.0);
            out.h[row++] = p.upper[j];
        }
    }
    for (const auto& r : p.lin_ineq) detail::push_row(trips, out.h, row++, r.a, 1.0, r.rhs);
    for (const auto& blk : p.soc_blocks)
        if (blk.u.empty()) detail::push_row(trips, out.h, row++, blk.t, -1.0, 0.0);  // t >= 0
    for (const auto& blk : p.rsoc_blocks)
        if (blk.u.empty()) {
            detail::push_row(trips, out.h, row++, blk.x, -1.0, 0.0);
            detail::push_row(trips, out.h, row++, blk.y, -1.0, 0.0);
        }

    // SOC blocks: s = (t(x); u(x)) in SOC means h - Gx with G = -coefs.
    auto emit_soc_entry = [&](const LinExpr& e) {
        for (const auto& [i, c] : e.terms) trips.emplace_back(row, i, -c);
        out.h[row++] = e.constant;
    };
    for (const auto& blk : p.soc_blocks) {
        if (blk.u.empty()) continue;
        out.soc_dims.push_back(1 + static_cast<int>(blk.u.size()));
        emit_soc_entry(blk.t);
        for (const auto& e : blk.u) emit_soc_entry(e);
    }
    // RSOC: 2xy >= ||u||^2  <->  ||(x - y, sqrt2 u)|| <= x + y.
    for (const auto& blk : p.rsoc_blocks) {
        if (blk.u.empty()) continue;
        out.soc_dims.push_back(2 + static_cast<int>(blk.u.size()));
        LinExpr t = blk.x;
        for (const auto& [i, c] : blk.y.terms) t.add(i, c);
        t.constant += blk.y.constant;
        emit_soc_entry(t);
        LinExpr d = blk.x;
        for (const auto& [i, c] : blk.y.terms) d.add(i, -c);
        d.constant -= blk.y.constant;
        emit_soc_entry(d);
        const double s2 = std::sqrt(2.0);
        for (const auto& e : blk.u) {
            LinExpr se = e;
            for (auto& [i, c] : se.terms) c *= s2;
            se.constant *= s2;
            emit_soc_entry(se);
        }
    }

    out.G.resize(rows, p.n);
    out.G.setFromTriplets(trips.begin(), trips.end());
    return out;
}

inline void ConeProgram::dump(std::ostream& os) const {
    auto put_expr = [&os](const LinExpr& e) {
        bool first = true;
        for (const auto& [i, c] : e.terms) {
            os << (first ? "" : " + ") << c << "*x" << i;
            first = false;
        }
        if (e.constant != 0.0 || first) os << (first ? "" : " + ") << e.constant;
    };
    os << "maximize";
    for (int j = 0; j < n; ++j)
        if (objective[j] != 0.0) os << " + " << objective[j] << "*x" << j;
    os << "\n";
    for (int j = 0; j < n; ++j) {
        if (lower[j] > -kInf || upper[j] < kInf)
            os << "bound: " << lower[j] << " <= x" << j << " <= " << upper[j] << "\n";
    }
    for (const auto& r : lin_eq) {
        os << "eq[" << r.tag << "]: ";
        put_expr(r.a);
        os << " == " << r.rhs << "\n";
    }
    for (const auto& r : lin_ineq) {
        os << "le[" << r.tag << "]: ";
        put_expr(r.a);
        os << " <= " << r.rhs << "\n";
    }
    for (const auto& blk : soc_blocks) {
        os << "soc[" << blk.tag << "]: ||(";
        for (std::size_t i = 0; i < blk.u.size(); ++i) {
            if (i) os << ", ";
            put_expr(blk.u[i]);
        }
        os << ")|| <= ";
        put_expr(blk.t);
        os << "\n";
    }
    for (const auto& blk : rsoc_blocks) {
        os << "rsoc[" << blk.tag << "]: 2*(";
        put_expr(blk.x);
        os << ")*(";
        put_expr(blk.y);
        os << ") >= sum sq (";
        for (std::size_t i = 0; i < blk.u.size(); ++i) {
            if (i) os << ", ";
            put_expr(blk.u[i]);
        }
        os << ")\n";
    }
}

}  // namespace wprelay::conic
