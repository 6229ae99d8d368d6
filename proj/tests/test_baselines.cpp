#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "wprelay/baselines.hpp"
#include "wprelay/channel.hpp"

using namespace wprelay;
using namespace wprelay::baselines;

namespace {

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

}  // namespace

TEST_CASE("scheme specs pin the documented variables") {
    CHECK(scheme_spec(SchemeId::EBT).pins.tau == 0.5);
    CHECK_FALSE(scheme_spec(SchemeId::EBT).pins.alpha.has_value());
    CHECK(scheme_spec(SchemeId::EPS).pins.alpha == 0.5);
    CHECK(scheme_spec(SchemeId::EBT_EPS).pins.tau == 0.5);
    CHECK(scheme_spec(SchemeId::EBT_EPS).pins.alpha == 0.5);
    CHECK_FALSE(scheme_spec(SchemeId::NonSIC).sic);
    CHECK(scheme_spec(SchemeId::DCC).mode == ComputingMode::DCC);
    CHECK(parse_scheme("ebt-eps") == SchemeId::EBT_EPS);
    CHECK_FALSE(parse_scheme("nope").has_value());
}

TEST_CASE("EBT returns tau = 0.5 exactly; DCC returns beta = 0 feasibly") {
    auto params = make_params(2, 2);
    auto chan = make_channels(2, 2, 0, 22.0);
    NonlinearEhParams eh;
    auto ebt = run_scheme(scheme_spec(SchemeId::EBT), chan, params, eh);
    CHECK(ebt.alloc.tau == 0.5);
    auto dcc = run_scheme(scheme_spec(SchemeId::DCC), chan, params, eh);
    CHECK(dcc.alloc.beta == 0.0);
    CHECK(dcc.powers.slack_dc_budget >= -1e-7);
}

TEST_CASE("per-channel dominance of the unrestricted algorithm") {
    auto params = make_params(2, 2);
    NonlinearEhParams eh;
    for (std::uint64_t trial = 0; trial < 3; ++trial) {
        auto chan = make_channels(2, 2, trial, 22.0);
        const double alg1 = run_scheme(scheme_spec(SchemeId::Alg1), chan, params, eh).objective;
        const double both = run_scheme(scheme_spec(SchemeId::EBT_EPS), chan, params, eh).objective;
        const double nonsic =
            run_scheme(scheme_spec(SchemeId::NonSIC), chan, params, eh).objective;
        CHECK(alg1 >= both - 1e-5);
        CHECK(alg1 >= nonsic - 1e-5);
    }
}

TEST_CASE("oracle: rejects K != 1") {
    auto params = make_params(2, 2);
    auto chan = make_channels(2, 2, 0, 22.0);
    NonlinearEhParams eh;
    CHECK_THROWS_AS((void)oracle_grid_k1(chan, params, eh), invalid_input);
}

TEST_CASE("oracle: all-zero channel harvests nothing") {
    auto params = make_params(1, 2);
    NonlinearEhParams eh;
    ChannelSet chan;
    chan.uplink = {Eigen::VectorXcd::Zero(2)};
    chan.downlink = {Eigen::RowVectorXcd::Zero(2)};
    chan.gain = {0.0};
    auto og = oracle_grid_k1(chan, params, eh, 16);
    CHECK(og.objective == 0.0);
    CHECK_FALSE(og.feasible);
}

TEST_CASE("oracle: doubling the grid density never decreases the objective") {
    auto params = make_params(1, 2);
    auto chan = make_channels(1, 2, 0, 30.0);
    NonlinearEhParams eh;
    double prev = -1.0;
    for (int d : {8, 16, 32, 64}) {
        auto og = oracle_grid_k1(chan, params, eh, d);
        CHECK(og.objective >= prev - 1e-12);
        prev = og.objective;
    }
}

TEST_CASE("oracle vs algorithm: objective bracket on seeded K=1 instances") {
    auto params = make_params(1, 2);
    NonlinearEhParams eh;
    for (std::uint64_t trial = 0; trial < 3; ++trial) {
        auto chan = make_channels(1, 2, trial, 30.0);
        auto og = oracle_grid_k1(chan, params, eh, 64);
        REQUIRE(og.feasible);
        auto alg = run_scheme(scheme_spec(SchemeId::Alg1), chan, params, eh);
        CHECK(alg.objective >= 0.98 * og.objective);
        CHECK(alg.objective <= og.objective + og.cell_slack);
        // The oracle's own point is feasible for both checkers.
        auto [rr, pr] = evaluate(chan, params, eh, og.alloc);
        CHECK(pr.feasible(1e-12));
        CHECK(brute_check_allocation(og.alloc, chan, params, eh).feasible);
        CHECK(rr.min_rate == doctest::Approx(og.objective).epsilon(1e-9));
    }
}

TEST_CASE("brute check agrees with model.evaluate on random allocations") {
    auto params = make_params(2, 2);
    auto chan = make_channels(2, 2, 0, 22.0);
    NonlinearEhParams eh;
    std::mt19937 rng(31);
    std::uniform_real_distribution<double> u(0.02, 0.98);
    std::uniform_real_distribution<double> uw(-0.05, 0.05);
    int checked = 0;
    for (int i = 0; i < 10000; ++i) {
        Allocation a;
        a.p = Eigen::VectorXd::NullaryExpr(2, [&](int) {
            return u(rng) * 1.2 * std::sqrt(params.p_src_max[0]);
        });
        a.w = {Eigen::VectorXcd::NullaryExpr(
                   2, [&](int) { return std::complex<double>(uw(rng), uw(rng)); }),
               Eigen::VectorXcd::NullaryExpr(
                   2, [&](int) { return std::complex<double>(uw(rng), uw(rng)); })};
        a.tau = u(rng);
        a.alpha = u(rng);
        a.beta = u(rng);
        const ComputingMode mode = i % 2 == 0 ? ComputingMode::ACC : ComputingMode::DCC;
        auto [rr, pr] = evaluate(chan, params, eh, a, mode);
        auto bc = brute_check_allocation(a, chan, params, eh, mode);
        CHECK(bc.feasible == pr.feasible(0.0));
        ++checked;
        // Sign agreement per labelled residual against the model slacks.
        for (const auto& res : bc.residuals) {
            double model_slack = 0.0;
            if (res.constraint.find("dc-budget") != std::string::npos)
                model_slack = pr.slack_dc_budget;
            else if (res.constraint.find("computing") != std::string::npos)
                model_slack = pr.slack_computing;
            else if (res.constraint.find("src-power[0]") != std::string::npos)
                model_slack = pr.slack_src_power[0];
            else
                model_slack = pr.slack_src_power[1];
            CHECK((res.slack >= 0.0) == (model_slack >= 0.0));
        }
    }
    CHECK(checked == 10000);
}

TEST_CASE("brute check pinpoints specific violations") {
    auto params = make_params(1, 2);
    auto chan = make_channels(1, 2, 0, 30.0);
    NonlinearEhParams eh;
    auto og = oracle_grid_k1(chan, params, eh, 32);
    REQUIRE(og.feasible);

    Allocation hot = og.alloc;  // source power above the cap -> (8d)
    hot.p[0] = 2.0 * std::sqrt(params.p_src_max[0]);
    auto bc = brute_check_allocation(hot, chan, params, eh);
    CHECK_FALSE(bc.feasible);
    bool found = false;
    for (const auto& r : bc.residuals)
        if (r.constraint.find("(8d)") != std::string::npos && r.slack < 0.0) found = true;
    CHECK(found);

    Allocation nosplit = og.alloc;  // beta = 0 in ACC mode starves (8c)
    nosplit.beta = 0.0;
    auto bc2 = brute_check_allocation(nosplit, chan, params, eh);
    CHECK_FALSE(bc2.feasible);
    bool starved = false;
    for (const auto& r : bc2.residuals)
        if (r.constraint.find("(8c)") != std::string::npos && r.slack < 0.0) starved = true;
    CHECK(starved);
}
