// Batch CLI: runs a configured Monte Carlo sweep and writes CSV artifacts.
//
// Exit codes: 0 on a fully successful sweep, 2 when some trials failed
// (their rows carry a failure status), 1 on configuration errors.

#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wprelay/harness.hpp"

namespace fs = std::filesystem;
using namespace wprelay;

int main(int argc, char** argv) {
    CLI::App app{"Max-min rate allocation experiments for wireless-powered relay networks"};
    std::string config_path;
    std::string out_dir = ".";
    std::optional<int> trials, parallel;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> schemes;
    std::string emit = "all";
    app.add_option("--config", config_path, "Experiment config file")
        ->required()
        ->check(CLI::ExistingFile);
    app.add_option("--out", out_dir, "Output directory (created if missing)");
    app.add_option("--trials", trials, "Override trial count");
    app.add_option("--seed", seed, "Override RNG seed");
    app.add_option("--schemes", schemes,
                   "Override scheme list (comma-separated: alg1,ebt,eps,ebt-eps,nonsic,dcc,oracle)");
    app.add_option("--parallel", parallel, "Override worker count");
    app.add_option("--emit", emit, "Artifacts to write")
        ->check(CLI::IsMember({"table", "cdf", "trace", "all"}));
    CLI11_PARSE(app, argc, argv);

    harness::ExperimentConfig cfg;
    try {
        cfg = harness::parse_config_file(config_path);
        if (trials) cfg.trials = *trials;
        if (seed) cfg.seed = *seed;
        if (parallel) cfg.parallel = *parallel;
        if (schemes) {
            cfg.schemes.clear();
            for (const std::string& name : harness::detail::split_list(*schemes)) {
                const auto id = baselines::parse_scheme(name);
                if (!id) throw invalid_input("unknown scheme '" + name + "'");
                cfg.schemes.push_back(baselines::scheme_spec(*id));
            }
        }
        cfg.validate();
        fs::create_directories(out_dir);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    }

    harness::ResultTable table;
    try {
        table = harness::run_experiment(cfg);
    } catch (const std::exception& e) {
        std::cerr << "experiment failed: " << e.what() << '\n';
        return 1;
    }

    const bool want_table = emit == "table" || emit == "all";
    const bool want_cdf = emit == "cdf" || emit == "all";
    const bool want_trace = emit == "trace" || emit == "all";
    auto open = [&](const std::string& name) {
        std::ofstream os(fs::path(out_dir) / name);
        if (!os) throw std::runtime_error("cannot write " + name);
        return os;
    };
    try {
        if (want_table) {
            auto os = open("results.csv");
            table.to_csv(os);
        }
        if (want_cdf) {
            // One CDF per scheme at the first sweep value.
            const double sv = cfg.sweep_values.front();
            for (const auto& spec : cfg.schemes) {
                const std::string name = baselines::to_string(spec.id);
                try {
                    auto os = open("cdf_" + name + ".csv");
                    harness::emit_cdf(table, name, sv, os);
                } catch (const invalid_input& e) {
                    std::cerr << "skipping CDF for " << name << ": " << e.what() << '\n';
                }
            }
        }
        if (want_trace) {
            // Convergence trace of the first scheme at the first sweep value.
            const std::string first = baselines::to_string(cfg.schemes.front().id);
            const double sv = cfg.sweep_values.front();
            for (const auto& row : table.rows) {
                if (row.scheme != first || row.sweep_value != sv) continue;
                auto os = open("trace_" + std::to_string(row.trial) + ".csv");
                harness::emit_convergence(row.trace, os);
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "output error: " << e.what() << '\n';
        return 1;
    }

    int failures = 0;
    for (const auto& row : table.rows) failures += row.status != "ok" ? 1 : 0;
    std::cerr << table.rows.size() - failures << "/" << table.rows.size()
              << " runs succeeded\n";
    return failures == 0 ? 0 : 2;
}
