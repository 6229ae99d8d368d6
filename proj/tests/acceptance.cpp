// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. Each criterion is self-contained and seeds its own data.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "wprelay/baselines.hpp"
#include "wprelay/channel.hpp"
#include "wprelay/harness.hpp"
#include "wprelay/ia.hpp"

using namespace wprelay;

namespace {

double now_s() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

SystemParams make_params(int k, int n, double p_src_dbm = 18.0) {
    SystemParams p;
    p.num_pairs = k;
    p.num_antennas = n;
    p.sigma_ant2 = dbm_to_watt(-70.0);
    p.sigma_r2 = dbm_to_watt(-50.0);
    p.sigma_k2.assign(k, dbm_to_watt(-70.0));
    p.p_src_max.assign(k, dbm_to_watt(p_src_dbm));
    return p;
}

ChannelSet make_channels(int k, int n, std::uint64_t trial, double gain_db) {
    return generate(42, trial, Geometry::uniform(k, 10.0, 15.0, 3.5, gain_db),
                    make_params(k, n));
}

double logu(std::mt19937& rng, double lo, double hi) {
    std::uniform_real_distribution<double> d(std::log(lo), std::log(hi));
    return std::exp(d(rng));
}

// ---------------------------------------------------------------- criterion 1
bool surrogate_correctness(std::string& detail) {
    std::mt19937 rng(101);
    double worst_tan = 0.0, worst_bound = 0.0;
    auto tan = [&](double approx, double exact) {
        worst_tan = std::max(worst_tan,
                             std::abs(approx - exact) / std::max(1.0, std::abs(exact)));
    };
    auto bound = [&](double excess) { worst_bound = std::max(worst_bound, excess); };

    // Eq. (11): rate minorant.
    std::uniform_real_distribution<double> utau(1.0 + 1e-3, 50.0);
    for (int i = 0; i < 1000; ++i) {
        ia::ExpansionPoint ep;
        const double psi0 = logu(rng, 1e-6, 1e6);
        const double tau0 = utau(rng);
        ep.psi1 = Eigen::VectorXd::Constant(1, psi0);
        ep.psi2 = ep.psi1;
        ep.tau1 = tau0;
        auto s = surrogate_rate(ep, 0, 0);
        tan(s.eval(psi0, tau0), ia::RateSurrogate::exact(psi0, tau0));
        for (int j = 0; j < 10; ++j) {
            const double psi = logu(rng, 1e-6, 1e6);
            const double tau = utau(rng);
            const double exact = ia::RateSurrogate::exact(psi, tau);
            bound((s.eval(psi, tau) - exact) / std::max(1.0, std::abs(exact)));
        }
    }

    // Eq. (12): first-hop SINR minorant on a seeded K=3, N=4 channel.
    auto params3 = make_params(3, 4);
    auto chan3 = make_channels(3, 4, 0, 16.0);
    std::uniform_real_distribution<double> up(0.01, 0.3), ua(1.0 + 1e-3, 20.0);
    for (int i = 0; i < 1000; ++i) {
        ia::ExpansionPoint ep;
        ep.p = Eigen::VectorXd::NullaryExpr(3, [&](int) { return up(rng); });
        ep.alpha1 = ua(rng);
        const int k = i % 3;
        auto s = surrogate_h(ep, chan3, params3, k);
        const double exact0 = ia::exact_h(chan3, params3, ep.p, ep.alpha1, k);
        tan(s.eval(ep.p, ep.alpha1, k), exact0);
        for (int j = 0; j < 10; ++j) {
            Eigen::VectorXd p = Eigen::VectorXd::NullaryExpr(3, [&](int) { return up(rng); });
            const double a1 = ua(rng);
            const double exact = ia::exact_h(chan3, params3, p, a1, k);
            bound((s.eval(p, a1, k) - exact) / std::max(1.0, std::abs(exact)));
        }
    }

    // Eq. (14): beam-gain minorant (difference to the square is (x - re0)^2).
    std::uniform_real_distribution<double> ux(-5.0, 5.0);
    for (int i = 0; i < 10000; ++i) {
        ia::BeamSurrogate s{std::abs(ux(rng))};
        tan(s.eval(s.re0), s.re0 * s.re0);
        const double x = ux(rng);
        bound(s.eval(x) - x * x);
    }

    // Eq. (17a): harvest Taylor piece and the ftilde tangent. The ftilde
    // bound direction is certified on the joint-convexity region
    // vartheta <= exp(-1/2); the tangency holds everywhere.
    auto chan2 = make_channels(2, 2, 0, 16.0);
    for (int i = 0; i < 1000; ++i) {
        ia::ExpansionPoint ep;
        ep.p = Eigen::VectorXd::NullaryExpr(2, [&](int) { return up(rng); });
        ep.alpha2 = ua(rng);
        auto s = surrogate_harvest(ep, chan2);
        tan(s.eval(ep.p, ep.alpha2), ia::HarvestSurrogate::exact(chan2, ep.p, ep.alpha2));
        for (int j = 0; j < 10; ++j) {
            Eigen::VectorXd p = Eigen::VectorXd::NullaryExpr(2, [&](int) { return up(rng); });
            const double a2 = ua(rng);
            const double exact = ia::HarvestSurrogate::exact(chan2, p, a2);
            bound((s.eval(p, a2) - exact) / std::max(1.0, std::abs(exact)));
        }
    }
    const double vmax = std::exp(-0.5);
    std::uniform_real_distribution<double> ub(0.01, 0.99);
    for (int i = 0; i < 1000; ++i) {
        ia::ExpansionPoint ep;
        ep.vartheta = logu(rng, 1e-8, 1e4);
        ep.beta = ub(rng);
        auto s = surrogate_ftilde(ep);
        tan(s.eval(ep.vartheta, ep.beta),
            ia::FtildeSurrogate::exact(ep.vartheta, ep.beta));
        ep.vartheta = logu(rng, 1e-8, vmax);
        auto sc = surrogate_ftilde(ep);
        for (int j = 0; j < 10; ++j) {
            const double vt = logu(rng, 1e-8, vmax);
            const double b = ub(rng);
            bound(sc.eval(vt, b) - ia::FtildeSurrogate::exact(vt, b));
        }
    }

    // Eq. (17b)/(18): bilinear upper bound (flip sign: product - bound <= 0).
    for (int i = 0; i < 10000; ++i) {
        ia::BilinearBound bb{logu(rng, 1e-4, 1e4), logu(rng, 1e-4, 1e4)};
        tan(bb.eval(bb.x0, bb.y0), bb.x0 * bb.y0);
        const double x = logu(rng, 1e-4, 1e4);
        const double y = logu(rng, 1e-4, 1e4);
        bound((x * y - bb.eval(x, y)) / std::max(1.0, x * y));
    }

    detail = "worst tangency " + std::to_string(worst_tan) + ", worst bound excess " +
             std::to_string(worst_bound);
    return worst_tan <= 1e-10 && worst_bound <= 1e-9;
}

// ----------------------------------------------------- criteria 2, 3 and 6
struct BatchStats {
    int failures = 0;
    bool monotone = true;
    bool residuals = true;
    int inactive = 0;
    double worst_activeness = 0.0;
    std::vector<int> refine_iters, feas_iters;
};

BatchStats run_batch_k4() {
    BatchStats st;
    auto params = make_params(4, 4);
    NonlinearEhParams eh;
    for (std::uint64_t trial = 0; trial < 50; ++trial) {
        auto chan = make_channels(4, 4, trial, 16.0);
        ia::IaResult res;
        try {
            res = ia::run(chan, params, eh);
        } catch (const std::exception&) {
            ++st.failures;
            continue;
        }
        double prev = -1.0;
        for (const auto& row : res.trace.rows) {
            if (row.phase != ia::Phase::Refinement) continue;
            if (row.objective < prev - 1e-6) st.monotone = false;
            prev = row.objective;
        }
        const auto& pr = res.powers;
        if (pr.slack_dc_budget < -1e-6 * std::max(pr.p_tot, 1e-6)) st.residuals = false;
        if (pr.slack_computing < -1e-6 * params.p_acc_min) st.residuals = false;
        for (double s : pr.slack_src_power)
            if (s < -1e-6 * params.p_src_max[0]) st.residuals = false;
        auto rep = ia::verify_lemma1(res.final_point, chan, params, res.objective);
        st.worst_activeness = std::max(st.worst_activeness, rep.worst());
        if (!rep.active(1e-4)) ++st.inactive;
        st.refine_iters.push_back(res.trace.count(ia::Phase::Refinement));
        st.feas_iters.push_back(res.trace.count(ia::Phase::Feasibility));
    }
    return st;
}

// ---------------------------------------------------------------- criterion 4
bool oracle_equivalence(std::string& detail) {
    NonlinearEhParams eh;
    int pass = 0, total = 0;
    double worst_rel = 0.0;
    // Antenna counts with a reference gain on which all 20 seeded trials
    // close the link budget (single-antenna relays need deep-fade headroom).
    const std::pair<int, double> cases[] = {{1, 36.0}, {2, 30.0}, {4, 30.0}};
    for (auto [n, gain] : cases) {
        auto params = make_params(1, n);
        for (std::uint64_t trial = 0; trial < 20; ++trial) {
            auto chan = make_channels(1, n, trial, gain);
            auto og = baselines::oracle_grid_k1(chan, params, eh, 64);
            ++total;
            if (!og.feasible) continue;
            double alg = 0.0;
            try {
                alg = ia::run(chan, params, eh).objective;
            } catch (const std::exception&) {
                continue;
            }
            worst_rel = std::min(worst_rel, (alg - og.objective) / og.objective);
            if (alg >= 0.98 * og.objective && alg <= og.objective + og.cell_slack) ++pass;
        }
    }
    detail = std::to_string(pass) + "/" + std::to_string(total) +
             " in bracket, worst shortfall " + std::to_string(-100.0 * worst_rel) + "%";
    return pass == total;
}

// ---------------------------------------------------------------- criterion 5
harness::ExperimentConfig base_config_k4() {
    harness::ExperimentConfig cfg;
    cfg.params = make_params(4, 4);
    cfg.eh = NonlinearEhParams{};
    cfg.geometry = Geometry::uniform(4, 10.0, 15.0, 3.5, 16.0);
    cfg.trials = 50;
    cfg.seed = 42;
    return cfg;
}

std::map<std::string, std::map<int, double>> rates_by_scheme(
    const harness::ResultTable& table, double sweep_value) {
    std::map<std::string, std::map<int, double>> out;
    for (const auto& r : table.rows)
        if (r.status == "ok" && r.sweep_value == sweep_value)
            out[r.scheme][r.trial] = r.rate_nats;
    return out;
}

double paired_mean(const std::map<int, double>& a) {
    double s = 0.0;
    for (const auto& [t, v] : a) s += v;
    return a.empty() ? 0.0 : s / static_cast<double>(a.size());
}

bool scheme_ordering(std::string& detail) {
    using baselines::SchemeId;
    harness::ExperimentConfig cfg = base_config_k4();
    for (SchemeId id : {SchemeId::Alg1, SchemeId::EPS, SchemeId::EBT_EPS, SchemeId::DCC,
                        SchemeId::NonSIC})
        cfg.schemes.push_back(baselines::scheme_spec(id));
    auto table = harness::run_experiment(cfg);
    auto rates = rates_by_scheme(table, 0.0);
    const double alg1 = paired_mean(rates["alg1"]);
    const double eps = paired_mean(rates["eps"]);
    const double both = paired_mean(rates["ebt-eps"]);
    const double dcc = paired_mean(rates["dcc"]);
    const double nonsic = paired_mean(rates["nonsic"]);

    // Fig. 3(b) trends: the no-SIC curve takes its lowest value at N=4 and
    // closes the gap to the joint design as the antenna count grows.
    harness::ExperimentConfig sweep = base_config_k4();
    sweep.trials = 15;
    sweep.sweep_variable = harness::SweepVariable::NumAntennas;
    sweep.sweep_values = {4.0, 8.0, 12.0};
    sweep.schemes.push_back(baselines::scheme_spec(SchemeId::Alg1));
    sweep.schemes.push_back(baselines::scheme_spec(SchemeId::NonSIC));
    auto stable = harness::run_experiment(sweep);
    auto at4 = rates_by_scheme(stable, 4.0);
    auto at8 = rates_by_scheme(stable, 8.0);
    auto at12 = rates_by_scheme(stable, 12.0);
    const double ns4 = paired_mean(at4["nonsic"]);
    const double ns8 = paired_mean(at8["nonsic"]);
    const double ns12 = paired_mean(at12["nonsic"]);
    const double gap4 = paired_mean(at4["alg1"]) - ns4;
    const double gap12 = paired_mean(at12["alg1"]) - ns12;

    char buf[320];
    std::snprintf(buf, sizeof(buf),
                  "means alg1=%.3f eps=%.3f ebt-eps=%.3f dcc=%.3f nonsic=%.3f; "
                  "nonsic N-sweep %.3f/%.3f/%.3f (N=4/8/12), "
                  "no-SIC gap %.3f (N=4) -> %.3f (N=12)",
                  alg1, eps, both, dcc, nonsic, ns4, ns8, ns12, gap4, gap12);
    detail = buf;
    // Power-sweep orderings at 18 dBm, then the antenna-sweep facts: the
    // no-SIC mean is lowest at N=4 within its own sweep and the gap to the
    // joint design closes by N=12. (With MMSE combining and K-1 < N the
    // no-SIC penalty is a bounded nulling loss, so the scheme cannot fall
    // below the schemes that sacrifice part of the harvest budget.)
    const bool ordering = alg1 > eps && eps > both && alg1 > dcc &&
                          nonsic < alg1 && nonsic < eps;
    return ordering && ns4 < ns8 && ns4 < ns12 && gap12 < gap4;
}

// ---------------------------------------------------------------- criterion 6
bool convergence_behavior(const BatchStats& st, std::string& detail) {
    std::vector<int> refine = st.refine_iters;
    if (refine.empty()) {
        detail = "no successful trials";
        return false;
    }
    std::sort(refine.begin(), refine.end());
    const int median = refine[refine.size() / 2];
    int quick = 0;
    for (int f : st.feas_iters) quick += f <= 5 ? 1 : 0;
    const double frac = static_cast<double>(quick) / st.feas_iters.size();
    detail = "median refinement iters " + std::to_string(median) + ", feasibility <= 5 on " +
             std::to_string(100.0 * frac) + "% of trials";
    return median <= 20 && frac >= 0.95;
}

// ---------------------------------------------------------------- criterion 7
bool conic_suite(std::string& detail) {
    using namespace conic;
    double worst = 0.0;
    {
        ConeProgram p(1);  // max -x s.t. ||(3,4)|| <= x -> obj -5
        p.objective[0] = -1.0;
        p.add_soc(LinExpr::var(0), {LinExpr::make(3.0), LinExpr::make(4.0)});
        auto sol = ConeSolver{}.solve(p);
        if (sol.status != SolveStatus::Optimal) { detail = "SOC program failed"; return false; }
        worst = std::max(worst, std::abs(sol.obj + 5.0));
    }
    {
        ConeProgram p(2);  // max -(x+y) s.t. xy >= 4 -> obj -4 at (2,2)
        p.objective << -1.0, -1.0;
        p.add_hyperbolic(0, 1, 4.0);
        auto sol = ConeSolver{}.solve(p);
        if (sol.status != SolveStatus::Optimal) { detail = "hyperbolic program failed"; return false; }
        worst = std::max(worst, std::abs(sol.obj + 4.0));
    }
    {
        ConeProgram p(2);  // LP: max 2x - 3y, x <= 5, y >= 1 -> obj 7
        p.objective << 2.0, -3.0;
        p.lower = {0.0, 1.0};
        p.upper = {5.0, 4.0};
        auto sol = ConeSolver{}.solve(p);
        if (sol.status != SolveStatus::Optimal) { detail = "LP failed"; return false; }
        worst = std::max(worst, std::abs(sol.obj - 7.0));
    }

    // Membership equivalence of the rotated-SOC encoding of xy >= c:
    // ||(x - y, 2 sqrt(c))|| <= x + y  <=>  x, y >= 0 and xy >= c.
    std::mt19937 rng(107);
    std::uniform_real_distribution<double> ux(-2.0, 4.0);
    int mismatches = 0, cases = 0;
    while (cases < 10000) {
        const double x = ux(rng), y = ux(rng);
        const double c = logu(rng, 1e-3, 4.0);
        if (std::abs(x * y - c) < 1e-9 || std::abs(x + y) < 1e-9) continue;  // boundary
        ++cases;
        const bool member = std::hypot(x - y, 2.0 * std::sqrt(c)) <= x + y;
        const bool truth = x >= 0.0 && y >= 0.0 && x * y >= c;
        if (member != truth) ++mismatches;
    }
    detail = "closed-form worst error " + std::to_string(worst) + ", " +
             std::to_string(mismatches) + "/10000 membership mismatches";
    return worst <= 1e-6 && mismatches == 0;
}

// ---------------------------------------------------------------- criterion 8
bool counting_and_scaling(std::string& detail) {
    NonlinearEhParams eh;
    for (int k : {1, 2, 4}) {
        for (int n : {1, 4}) {
            auto params = make_params(k, n);
            auto chan = make_channels(k, n, 0, 16.0);
            auto ep = ia::initialize(chan, params, eh);
            auto [prog, vm] = ia::build_subproblem(ep, chan, params, eh);
            if (vm.paper_conic_constraints != 6 * k + 7 ||
                vm.paper_scalar_vars != k * n + 3 * k + 8) {
                detail = "count mismatch at K=" + std::to_string(k) + " N=" + std::to_string(n);
                return false;
            }
        }
    }

    // Per-IPM-iteration wall time across N in {2,4,8,16} at K=2, calibrated
    // at the smallest size and compared against (KN)^3 log^2(KN) growth with
    // a factor-3 tolerance.
    const int k = 2;
    std::vector<double> per_iter;
    std::string times;
    for (int n : {2, 4, 8, 16}) {
        auto params = make_params(k, n);
        std::vector<double> samples;
        for (std::uint64_t trial = 0; trial < 3; ++trial) {
            auto chan = make_channels(k, n, trial, 22.0);
            auto ep = ia::initialize(chan, params, eh);
            auto [prog, vm] = ia::build_feasibility(ep, chan, params, eh);
            const Eigen::VectorXd hint =
                ia::embed_point(ep, vm, prog.n, chan, params, eh);
            conic::ConeSolver solver;
            const double t0 = now_s();
            auto sol = solver.solve(prog, hint);
            const double dt = now_s() - t0;
            if (sol.iterations > 0) samples.push_back(dt / sol.iterations);
        }
        if (samples.empty()) {
            detail = "no timing samples at N=" + std::to_string(n);
            return false;
        }
        std::sort(samples.begin(), samples.end());
        per_iter.push_back(samples[samples.size() / 2]);
        times += " N=" + std::to_string(n) + ":" +
                 std::to_string(per_iter.back() * 1e3) + "ms";
    }
    auto model = [&](int n) {
        const double kn = static_cast<double>(k * n);
        const double lg = std::log2(kn) + 1.0;
        return kn * kn * kn * lg * lg;
    };
    const double c0 = per_iter[0] / model(2);
    bool ok = true;
    const int ns[] = {2, 4, 8, 16};
    for (int i = 1; i < 4; ++i)
        if (per_iter[i] > 3.0 * c0 * model(ns[i])) ok = false;
    detail = "counts exact; per-iteration times" + times;
    return ok;
}

}  // namespace

int main() {
    int failed = 0;
    auto report = [&](int idx, const char* name, bool ok, const std::string& detail,
                      double secs) {
        std::printf("criterion %d (%s): %s — %s [%.1fs]\n", idx, name,
                    ok ? "PASS" : "FAIL", detail.c_str(), secs);
        std::fflush(stdout);
        failed += ok ? 0 : 1;
    };

    {
        const double t0 = now_s();
        std::string d;
        const bool ok = surrogate_correctness(d);
        report(1, "surrogate correctness", ok, d, now_s() - t0);
    }

    const double tb = now_s();
    BatchStats st = run_batch_k4();
    const double batch_secs = now_s() - tb;
    {
        std::string d = std::to_string(50 - st.failures) +
                        "/50 solved, monotone=" + (st.monotone ? "yes" : "no") +
                        ", residuals=" + (st.residuals ? "pass" : "fail");
        report(2, "IA monotonicity and feasibility",
               st.failures == 0 && st.monotone && st.residuals, d, batch_secs);
    }
    {
        std::string d = "worst activeness residual " + std::to_string(st.worst_activeness);
        report(3, "Lemma-1 activeness", st.failures == 0 && st.inactive == 0, d, 0.0);
    }
    {
        const double t0 = now_s();
        std::string d;
        const bool ok = oracle_equivalence(d);
        report(4, "oracle equivalence", ok, d, now_s() - t0);
    }
    {
        const double t0 = now_s();
        std::string d;
        const bool ok = scheme_ordering(d);
        report(5, "scheme ordering", ok, d, now_s() - t0);
    }
    {
        std::string d;
        const bool ok = convergence_behavior(st, d);
        report(6, "convergence behavior", ok, d, 0.0);
    }
    {
        const double t0 = now_s();
        std::string d;
        const bool ok = conic_suite(d);
        report(7, "cone solver suite", ok, d, now_s() - t0);
    }
    {
        const double t0 = now_s();
        std::string d;
        const bool ok = counting_and_scaling(d);
        report(8, "counting and scaling", ok, d, now_s() - t0);
    }
    return failed == 0 ? 0 : 1;
}
