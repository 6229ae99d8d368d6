#pragma once

// Monte Carlo experiment harness: parses flat key = value configs, runs
// seeded sweeps over schemes and a swept parameter with paired channel
// realizations, and emits schema-stable CSV tables, CDFs and convergence
// traces.

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "wprelay/baselines.hpp"
#include "wprelay/channel.hpp"
#include "wprelay/common.hpp"
#include "wprelay/ia.hpp"
#include "wprelay/model.hpp"

namespace wprelay::harness {

enum class SweepVariable { None, SrcPowerDbm, NumAntennas, ReferenceGainDb };

inline const char* to_string(SweepVariable v) {
    switch (v) {
        case SweepVariable::None: return "none";
        case SweepVariable::SrcPowerDbm: return "p_src_max_dbm";
        case SweepVariable::NumAntennas: return "num_antennas";
        case SweepVariable::ReferenceGainDb: return "reference_gain_db";
    }
    return "?";
}

struct ExperimentConfig {
    SystemParams params;
    NonlinearEhParams eh;
    Geometry geometry;
    SweepVariable sweep_variable = SweepVariable::None;
    std::vector<double> sweep_values = {0.0};
    std::vector<baselines::SchemeSpec> schemes;
    int trials = 1;
    std::uint64_t seed = 1;
    int parallel = 1;
    bool deterministic_timing = false;  // write wall_ms as 0 for byte-stable CSV
    ia::IaOptions solve_options;

    void validate() const {
        params.validate();
        eh.validate();
        if (trials < 1) throw invalid_input("ExperimentConfig: trials must be >= 1");
        if (parallel < 1) throw invalid_input("ExperimentConfig: parallel must be >= 1");
        if (sweep_values.empty())
            throw invalid_input("ExperimentConfig: sweep_values must be nonempty");
        if (schemes.empty())
            throw invalid_input("ExperimentConfig: at least one scheme required");
        for (double v : sweep_values) {
            if (sweep_variable == SweepVariable::NumAntennas &&
                (v < 1.0 || v != std::floor(v)))
                throw invalid_input("ExperimentConfig: antenna counts must be integers >= 1");
            if (sweep_variable == SweepVariable::SrcPowerDbm && (v < -50.0 || v > 60.0))
                throw invalid_input("ExperimentConfig: source power sweep outside physical range");
        }
    }
};

namespace detail {

inline std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

inline double parse_number(const std::string& text, const std::string& key) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &pos);
    } catch (const std::exception&) {
        throw invalid_input("config: bad number for '" + key + "': " + text);
    }
    if (trim(text.substr(pos)) != "")
        throw invalid_input("config: trailing text for '" + key + "': " + text);
    return v;
}

/// A power value with unit suffix: `-70 dBm`, `1e-6 W`, `0.2 mW`, `0.27 uW`.
/// A bare number is taken as watts.
inline double parse_power(std::string raw, const std::string& key) {
    const std::string t = trim(raw);
    auto ends_with = [&](std::string_view suf) {
        return t.size() > suf.size() &&
               std::equal(suf.rbegin(), suf.rend(), t.rbegin(), [](char a, char b) {
                   return std::tolower(static_cast<unsigned char>(a)) ==
                          std::tolower(static_cast<unsigned char>(b));
               });
    };
    auto value = [&](std::size_t strip) {
        return parse_number(trim(t.substr(0, t.size() - strip)), key);
    };
    if (ends_with("dbm")) return dbm_to_watt(value(3));
    if (ends_with("mw")) return value(2) * 1e-3;
    if (ends_with("uw")) return value(2) * 1e-6;
    if (ends_with("w")) return value(1);
    return parse_number(t, key);
}

inline std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream is(text);
    while (std::getline(is, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

/// Locale-independent shortest-round-trip-ish formatting for CSV cells.
inline std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

}  // namespace detail

/// Parses the flat `key = value` config format with `[section]` headers and
/// `#` comments. Unknown keys are errors so typos cannot silently fall back
/// to defaults.
inline ExperimentConfig parse_config(std::istream& in) {
    ExperimentConfig cfg;
    cfg.params.num_pairs = 4;
    cfg.params.num_antennas = 4;
    std::optional<double> sigma_k2_scalar, p_src_max_scalar;
    std::optional<double> d_sr_scalar, d_rd_scalar;
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string t = detail::trim(line);
        if (t.empty()) continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                throw invalid_input("config line " + std::to_string(lineno) +
                                    ": unterminated section header");
            section = detail::trim(t.substr(1, t.size() - 2));
            continue;
        }
        const std::size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw invalid_input("config line " + std::to_string(lineno) +
                                ": expected key = value");
        const std::string key = detail::trim(t.substr(0, eq));
        const std::string val = detail::trim(t.substr(eq + 1));
        const std::string qual = section.empty() ? key : section + "." + key;

        auto num = [&] { return detail::parse_number(val, qual); };
        auto pow_w = [&] { return detail::parse_power(val, qual); };
        if (qual == "system.num_pairs") cfg.params.num_pairs = static_cast<int>(num());
        else if (qual == "system.num_antennas") cfg.params.num_antennas = static_cast<int>(num());
        else if (qual == "system.sigma_ant2") cfg.params.sigma_ant2 = pow_w();
        else if (qual == "system.sigma_r2") cfg.params.sigma_r2 = pow_w();
        else if (qual == "system.sigma_k2") sigma_k2_scalar = pow_w();
        else if (qual == "system.p_static") cfg.params.p_static = pow_w();
        else if (qual == "system.p_src_max") p_src_max_scalar = pow_w();
        else if (qual == "system.p_acc_min") cfg.params.p_acc_min = pow_w();
        else if (qual == "system.p_dcc_min") cfg.params.p_dcc_min = pow_w();
        else if (qual == "eh.steepness") cfg.eh.steepness = num();
        else if (qual == "eh.threshold") cfg.eh.threshold = pow_w();
        else if (qual == "eh.p_eh_max") cfg.eh.p_eh_max = pow_w();
        else if (qual == "geometry.d_sr") d_sr_scalar = num();
        else if (qual == "geometry.d_rd") d_rd_scalar = num();
        else if (qual == "geometry.ple") cfg.geometry.ple = num();
        else if (qual == "geometry.reference_gain_db") cfg.geometry.reference_gain_db = num();
        else if (qual == "experiment.trials") cfg.trials = static_cast<int>(num());
        else if (qual == "experiment.seed") cfg.seed = static_cast<std::uint64_t>(num());
        else if (qual == "experiment.parallel") cfg.parallel = static_cast<int>(num());
        else if (qual == "experiment.deterministic_timing") cfg.deterministic_timing = num() != 0.0;
        else if (qual == "experiment.schemes") {
            cfg.schemes.clear();
            for (const std::string& name : detail::split_list(val)) {
                const auto id = baselines::parse_scheme(name);
                if (!id) throw invalid_input("config: unknown scheme '" + name + "'");
                cfg.schemes.push_back(baselines::scheme_spec(*id));
            }
        } else if (qual == "experiment.sweep_variable") {
            if (val == "none") cfg.sweep_variable = SweepVariable::None;
            else if (val == "p_src_max_dbm") cfg.sweep_variable = SweepVariable::SrcPowerDbm;
            else if (val == "num_antennas") cfg.sweep_variable = SweepVariable::NumAntennas;
            else if (val == "reference_gain_db")
                cfg.sweep_variable = SweepVariable::ReferenceGainDb;
            else throw invalid_input("config: unknown sweep variable '" + val + "'");
        } else if (qual == "experiment.sweep_values") {
            cfg.sweep_values.clear();
            for (const std::string& item : detail::split_list(val))
                cfg.sweep_values.push_back(detail::parse_number(item, qual));
        } else if (qual == "tolerances.rate_tol_abs") cfg.solve_options.rate_tol_abs = num();
        else if (qual == "tolerances.rate_tol_rel") cfg.solve_options.rate_tol_rel = num();
        else if (qual == "tolerances.max_refinement_iters")
            cfg.solve_options.max_refinement_iters = static_cast<int>(num());
        else if (qual == "tolerances.max_feasibility_iters")
            cfg.solve_options.max_feasibility_iters = static_cast<int>(num());
        else
            throw invalid_input("config line " + std::to_string(lineno) +
                                ": unknown key '" + qual + "'");
    }

    const int k = cfg.params.num_pairs;
    cfg.params.sigma_k2.assign(k, sigma_k2_scalar.value_or(dbm_to_watt(-70.0)));
    cfg.params.p_src_max.assign(k, p_src_max_scalar.value_or(dbm_to_watt(18.0)));
    cfg.geometry.d_sr.assign(k, d_sr_scalar.value_or(10.0));
    cfg.geometry.d_rd.assign(k, d_rd_scalar.value_or(15.0));
    if (cfg.schemes.empty())
        cfg.schemes.push_back(baselines::scheme_spec(baselines::SchemeId::Alg1));
    cfg.validate();
    return cfg;
}

inline ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw invalid_input("config: cannot open " + path);
    return parse_config(in);
}

struct ResultRow {
    double sweep_value = 0.0;
    std::string scheme;
    int trial = 0;
    std::uint64_t seed = 0;
    std::string status;             // ok | infeasible | solver-failure | error
    double rate_nats = 0.0;
    double rate_bits = 0.0;
    double tau = 0.0, alpha = 0.0, beta = 0.0;  // returned splits
    int iterations = 0;             // refinement iterations
    int feasibility_iterations = 0;
    double wall_ms = 0.0;
    bool active = false;            // Lemma-1 activeness held at the output
    ia::IterationTrace trace;       // kept in memory for trace emission
};

struct ResultTable {
    std::vector<ResultRow> rows;
    SweepVariable sweep_variable = SweepVariable::None;

    bool all_ok() const {
        for (const auto& r : rows)
            if (r.status != "ok") return false;
        return true;
    }

    void to_csv(std::ostream& os) const {
        os << "sweep_variable,sweep_value,scheme,trial,seed,status,rate_nats,rate_bits,"
              "tau,alpha,beta,iterations,feasibility_iterations,wall_ms,active\n";
        for (const auto& r : rows)
            os << to_string(sweep_variable) << ',' << detail::fmt(r.sweep_value) << ','
               << r.scheme << ',' << r.trial << ',' << r.seed << ',' << r.status << ','
               << detail::fmt(r.rate_nats) << ',' << detail::fmt(r.rate_bits) << ','
               << detail::fmt(r.tau) << ',' << detail::fmt(r.alpha) << ','
               << detail::fmt(r.beta) << ',' << r.iterations << ','
               << r.feasibility_iterations << ',' << detail::fmt(r.wall_ms) << ','
               << (r.active ? 1 : 0) << '\n';
    }
};

namespace detail {

inline void apply_sweep(SystemParams& params, Geometry& geom, SweepVariable var,
                        double value) {
    switch (var) {
        case SweepVariable::None:
            break;
        case SweepVariable::SrcPowerDbm:
            std::fill(params.p_src_max.begin(), params.p_src_max.end(),
                      dbm_to_watt(value));
            break;
        case SweepVariable::NumAntennas:
            params.num_antennas = static_cast<int>(value);
            break;
        case SweepVariable::ReferenceGainDb:
            geom.reference_gain_db = value;
            break;
    }
}

inline double now_ms() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double, std::milli>(clock::now().time_since_epoch())
        .count();
}

}  // namespace detail

/// Runs the full sweep. All schemes within one (sweep value, trial) cell
/// share the same channel realization; tasks fan out over a bounded worker
/// pool and land in preassigned slots, so the output order is independent
/// of scheduling.
inline ResultTable run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    const int n_sweep = static_cast<int>(cfg.sweep_values.size());
    const int n_tasks = n_sweep * cfg.trials;
    // One slot per (sweep value, trial); each holds all scheme rows.
    std::vector<std::vector<ResultRow>> slots(n_tasks);

    auto run_task = [&](int task) {
        const int is = task / cfg.trials;
        const int trial = task % cfg.trials;
        const double sv = cfg.sweep_values[is];
        SystemParams params = cfg.params;
        Geometry geom = cfg.geometry;
        detail::apply_sweep(params, geom, cfg.sweep_variable, sv);
        const ChannelSet chan = generate(cfg.seed, trial, geom, params);
        for (const auto& spec : cfg.schemes) {
            ResultRow row;
            row.sweep_value = sv;
            row.scheme = baselines::to_string(spec.id);
            row.trial = trial;
            row.seed = cfg.seed;
            const double t0 = detail::now_ms();
            try {
                ia::IaResult res =
                    baselines::run_scheme(spec, chan, params, cfg.eh, cfg.solve_options);
                row.status = "ok";
                row.rate_nats = res.rates.min_rate;
                row.rate_bits = nats_to_bits(res.rates.min_rate);
                row.tau = res.alloc.tau;
                row.alpha = res.alloc.alpha;
                row.beta = res.alloc.beta;
                row.iterations = res.trace.count(ia::Phase::Refinement);
                row.feasibility_iterations = res.trace.count(ia::Phase::Feasibility);
                row.trace = std::move(res.trace);
                if (spec.id != baselines::SchemeId::OracleGrid)
                    row.active = ia::verify_lemma1(res.final_point, chan, params,
                                                   res.objective, spec.sic)
                                     .active(1e-4);
                else
                    row.active = res.powers.feasible(1e-9);
            } catch (const ia::feasibility_phase_failed&) {
                row.status = "infeasible";
            } catch (const ia::solver_failure&) {
                row.status = "solver-failure";
            } catch (const std::exception&) {
                row.status = "error";
            }
            row.wall_ms = cfg.deterministic_timing ? 0.0 : detail::now_ms() - t0;
            slots[task].push_back(std::move(row));
        }
    };

    if (cfg.parallel <= 1 || n_tasks <= 1) {
        for (int t = 0; t < n_tasks; ++t) run_task(t);
    } else {
        std::atomic<int> next{0};
        auto worker = [&] {
            for (int t = next.fetch_add(1); t < n_tasks; t = next.fetch_add(1)) run_task(t);
        };
        std::vector<std::thread> pool;
        const int n_workers = std::min(cfg.parallel, n_tasks);
        pool.reserve(n_workers);
        for (int i = 0; i < n_workers; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    ResultTable table;
    table.sweep_variable = cfg.sweep_variable;
    for (auto& slot : slots)
        for (auto& row : slot) table.rows.push_back(std::move(row));
    return table;
}

/// Empirical CDF of the max-min rate for one scheme at one sweep value,
/// over successful trials only. Points are (sorted rate, i/n), so the last
/// point always has CDF 1.
inline void emit_cdf(const ResultTable& table, std::string_view scheme,
                     double sweep_value, std::ostream& os) {
    std::vector<double> rates;
    for (const auto& r : table.rows)
        if (r.scheme == scheme && r.sweep_value == sweep_value && r.status == "ok")
            rates.push_back(r.rate_nats);
    if (rates.empty())
        throw invalid_input("emit_cdf: no successful rows for scheme '" +
                            std::string(scheme) + "'");
    std::sort(rates.begin(), rates.end());
    os << "rate_nats,cdf\n";
    const double n = static_cast<double>(rates.size());
    for (std::size_t i = 0; i < rates.size(); ++i)
        os << detail::fmt(rates[i]) << ',' << detail::fmt((i + 1) / n) << '\n';
}

/// Per-iteration convergence trace of one run: (iter, phase, objective).
inline void emit_convergence(const ia::IterationTrace& trace, std::ostream& os) {
    os << "iter,phase,objective\n";
    for (const auto& r : trace.rows)
        os << r.iter << ','
           << (r.phase == ia::Phase::Feasibility ? "feasibility" : "refinement") << ','
           << detail::fmt(r.objective) << '\n';
}

}  // namespace wprelay::harness
