#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>
#include <string>

#include "wprelay/harness.hpp"

using namespace wprelay;
using namespace wprelay::harness;

namespace {

std::string small_config(const std::string& extra = "") {
    return "[system]\n"
           "num_pairs = 1\n"
           "num_antennas = 2\n"
           "sigma_ant2 = -70 dBm\n"
           "sigma_r2 = -50 dBm\n"
           "sigma_k2 = -70 dBm\n"
           "p_static = 1 uW\n"
           "p_src_max = 18 dBm\n"
           "p_acc_min = 0.27 uW\n"
           "p_dcc_min = 47.64 uW\n"
           "[eh]\n"
           "steepness = 6400\n"
           "threshold = 0.003 W\n"
           "p_eh_max = 0.2 mW\n"
           "[geometry]\n"
           "d_sr = 10\n"
           "d_rd = 15\n"
           "ple = 3.5\n"
           "reference_gain_db = 30\n"
           "[experiment]\n"
           "trials = 1\n"
           "seed = 42\n"
           "deterministic_timing = 1\n"
           "schemes = ebt\n" +
           extra;
}

ResultTable from_config(const std::string& text) {
    std::istringstream in(text);
    return run_experiment(parse_config(in));
}

}  // namespace

TEST_CASE("config parsing: units and defaults") {
    std::istringstream in(small_config());
    auto cfg = parse_config(in);
    CHECK(cfg.params.num_pairs == 1);
    CHECK(cfg.params.sigma_ant2 == doctest::Approx(1e-10).epsilon(1e-12));
    CHECK(cfg.params.p_static == doctest::Approx(1e-6));
    CHECK(cfg.eh.p_eh_max == doctest::Approx(0.2e-3));
    CHECK(cfg.params.p_src_max[0] == doctest::Approx(dbm_to_watt(18.0)));
    CHECK(cfg.geometry.d_rd[0] == 15.0);
    CHECK(cfg.schemes.size() == 1);
    CHECK(cfg.schemes[0].id == baselines::SchemeId::EBT);
}

TEST_CASE("config parsing: errors are loud") {
    auto expect_throw = [](const std::string& text) {
        std::istringstream in(text);
        CHECK_THROWS_AS((void)parse_config(in), invalid_input);
    };
    expect_throw("[system]\nnum_antlers = 4\n");               // unknown key
    expect_throw("[experiment]\nschemes = warp-drive\n");      // unknown scheme
    expect_throw("[experiment]\ntrials = 0\n");                // invalid count
    expect_throw("[system]\nsigma_ant2 = -70 dBplumbus\n");    // bad unit
    expect_throw("[experiment\ntrials = 1\n");                 // broken header
}

TEST_CASE("one EBT trial yields one row with tau = 0.5") {
    auto table = from_config(small_config());
    REQUIRE(table.rows.size() == 1);
    const auto& row = table.rows[0];
    CHECK(row.scheme == "ebt");
    CHECK(row.status == "ok");
    CHECK(row.tau == 0.5);
    CHECK(row.rate_nats > 0.0);
    CHECK(row.rate_bits == doctest::Approx(nats_to_bits(row.rate_nats)));
}

TEST_CASE("same config twice gives byte-identical CSV; parallel merge too") {
    const std::string text = small_config("trials = 3\nschemes = ebt,dcc\n");
    auto csv = [](const ResultTable& t) {
        std::ostringstream os;
        t.to_csv(os);
        return os.str();
    };
    const std::string a = csv(from_config(text));
    const std::string b = csv(from_config(text));
    CHECK(a == b);
    const std::string c = csv(from_config(text + "parallel = 3\n"));
    CHECK(a == c);
}

TEST_CASE("emit_cdf: two rates give (1, 0.5), (2, 1.0); empty is an error") {
    ResultTable table;
    for (double rate : {2.0, 1.0}) {  // deliberately unsorted
        ResultRow row;
        row.scheme = "alg1";
        row.status = "ok";
        row.rate_nats = rate;
        table.rows.push_back(row);
    }
    std::ostringstream os;
    emit_cdf(table, "alg1", 0.0, os);
    CHECK(os.str() == "rate_nats,cdf\n1,0.5\n2,1\n");
    CHECK_THROWS_AS(emit_cdf(table, "absent", 0.0, os), invalid_input);
}

TEST_CASE("emit_cdf: monotone with final value 1 on real data") {
    auto table = from_config(small_config("trials = 5\nschemes = alg1\n"));
    std::ostringstream os;
    emit_cdf(table, "alg1", 0.0, os);
    std::istringstream in(os.str());
    std::string line;
    std::getline(in, line);  // header
    double prev_rate = -1.0, prev_cdf = 0.0, cdf = 0.0;
    while (std::getline(in, line)) {
        const auto comma = line.find(',');
        const double rate = std::stod(line.substr(0, comma));
        cdf = std::stod(line.substr(comma + 1));
        CHECK(rate >= prev_rate);
        CHECK(cdf >= prev_cdf);
        prev_rate = rate;
        prev_cdf = cdf;
    }
    CHECK(cdf == doctest::Approx(1.0));
}

TEST_CASE("emit_convergence: single row and monotone refinement") {
    ia::IterationTrace trace;
    trace.rows.push_back({0, ia::Phase::Refinement, 1.5, conic::SolveStatus::Optimal, 0, 0});
    std::ostringstream os;
    emit_convergence(trace, os);
    CHECK(os.str() == "iter,phase,objective\n0,refinement,1.5\n");

    auto table = from_config(small_config("schemes = alg1\n"));
    REQUIRE(table.rows.size() == 1);
    std::ostringstream os2;
    emit_convergence(table.rows[0].trace, os2);
    std::istringstream in(os2.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "iter,phase,objective");
    double prev = -1e300;
    int rows = 0;
    while (std::getline(in, line)) {
        ++rows;
        if (line.find("refinement") == std::string::npos) continue;
        const double obj = std::stod(line.substr(line.rfind(',') + 1));
        CHECK(obj >= prev - 1e-6);
        prev = obj;
    }
    CHECK(rows >= 1);
}

TEST_CASE("failures are rows, not aborts") {
    // An absurd computing floor makes every trial infeasible; the sweep
    // must still complete and report per-trial failure statuses.
    auto table = from_config(small_config("trials = 2\nschemes = alg1\n") +
                             "[system]\np_acc_min = 0.1 W\np_dcc_min = 0.2 W\n");
    REQUIRE(table.rows.size() == 2);
    for (const auto& row : table.rows) CHECK(row.status == "infeasible");
    CHECK_FALSE(table.all_ok());
}

TEST_CASE("sweep over antenna counts produces one row per cell") {
    auto table = from_config(
        small_config("trials = 2\nschemes = ebt\nsweep_variable = num_antennas\n"
                     "sweep_values = 2,4\n"));
    REQUIRE(table.rows.size() == 4);
    CHECK(table.rows[0].sweep_value == 2.0);
    CHECK(table.rows[3].sweep_value == 4.0);
    CHECK(table.sweep_variable == SweepVariable::NumAntennas);
}
