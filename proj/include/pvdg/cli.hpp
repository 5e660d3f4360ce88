#pragma once

// Command-line surface. Exit codes: 0 success, 1 usage, 2 data error,
// 3 infeasible scenario, 4 oracle disagreement.

#include "pvdg/config.hpp"
#include "pvdg/csv_io.hpp"
#include "pvdg/oracle.hpp"
#include "pvdg/scenario.hpp"
#include "pvdg/svg_plot.hpp"
#include "pvdg/synthetic.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace pvdg {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitData = 2, kExitInfeasible = 3, kExitOracleMismatch = 4 };

/// Flags shared by all subcommands.
struct RunManifest {
    std::string config_path;
    std::string weather_path;
    std::string load_path;
    std::string output_dir = "out";
    std::string mode;
    std::uint64_t seed = 42;
    std::size_t instances = 20;
    double resolution = 0.5;
};

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

struct LoadedSeries {
    std::vector<WeatherRecord> weather;
    std::vector<LoadRecord> load;
    bool synthetic = false;
};

inline LoadedSeries load_series(const RunManifest& m)
{
    if (m.weather_path.empty() != m.load_path.empty()) throw UsageError("--weather and --load must be given together");
    LoadedSeries s;
    if (m.weather_path.empty()) {
        SyntheticOptions opt;
        opt.seed = m.seed;
        auto year = synthetic_year(opt);
        s.weather = std::move(year.weather);
        s.load = std::move(year.load);
        s.synthetic = true;
        return s;
    }
    s.weather = load_weather_csv(m.weather_path);
    s.load = load_load_csv(m.load_path);
    check_alignment(s.weather, s.load);
    return s;
}

inline std::optional<LoadedConfig> load_optional_config(const RunManifest& m, std::ostream& err)
{
    if (m.config_path.empty()) return std::nullopt;
    auto loaded = load_config(m.config_path);
    for (const auto& d : loaded.defaults_applied) err << "note: " << d << '\n';
    loaded.config.validate();
    return loaded;
}

inline void apply_mode(ScenarioConfig& cfg, const RunManifest& m)
{
    if (m.mode == "dp") cfg.mode = SolverMode::Dp;
    if (m.mode == "greedy") cfg.mode = SolverMode::Greedy;
}

inline int cmd_simulate(const RunManifest& m, std::ostream& out, std::ostream& err)
{
    const auto loaded = load_optional_config(m, err);
    ScenarioConfig cfg = loaded ? loaded->config : build_case(3, default_base_config());
    apply_mode(cfg, m);
    const auto series = load_series(m);
    const auto result = run_scenario(cfg, series.weather, series.load);
    const std::filesystem::path dir = m.output_dir;
    write_dispatch_csv(result, dir / "dispatch.csv");
    const std::vector<CaseSummary> summaries{summarize(result)};
    write_summary(summaries, nullptr, dir / "summary.csv");
    render_plots(result, dir / "plots");
    out << summary_table_text(summaries, nullptr);
    out << "objective (" << to_string(cfg.mode) << "): " << csv::fixed(summaries.front().objective, 6) << '\n';
    return kExitOk;
}

inline int cmd_compare(const RunManifest& m, std::ostream& out, std::ostream& err)
{
    const auto loaded = load_optional_config(m, err);
    ScenarioConfig base = loaded ? loaded->config : default_base_config();
    apply_mode(base, m);
    const auto series = load_series(m);
    const std::vector<ScenarioConfig> cases{build_case(1, base), build_case(2, base), build_case(3, base)};
    const auto results = run_cases(cases, series.weather, series.load);

    const std::filesystem::path dir = m.output_dir;
    std::vector<CaseSummary> summaries;
    std::vector<CostSummary> costs;
    for (std::size_t i = 0; i < results.size(); ++i) {
        write_dispatch_csv(results[i], dir / ("case" + std::to_string(i + 1) + "_dispatch.csv"));
        summaries.push_back(summarize(results[i]));
        costs.push_back(summaries.back().cost);
    }
    const auto report = compare_cases(costs);
    write_summary(summaries, &report, dir / "summary.csv");
    render_plots(results.back(), dir / "plots");
    out << summary_table_text(summaries, &report);
    return kExitOk;
}

inline int cmd_validate(const RunManifest& m, std::ostream& out, std::ostream& err)
{
    if (m.config_path.empty() && m.weather_path.empty() && m.load_path.empty())
        throw UsageError("validate needs --config and/or --weather with --load");
    if (const auto loaded = load_optional_config(m, err)) out << m.config_path << ": ok\n";
    if (!m.weather_path.empty() || !m.load_path.empty()) {
        const auto s = load_series(m);
        out << m.weather_path << ", " << m.load_path << ": ok (" << s.weather.size() << " aligned records)\n";
    }
    return kExitOk;
}

inline int cmd_synth(const RunManifest& m, std::ostream& out)
{
    SyntheticOptions opt;
    opt.seed = m.seed;
    const auto year = synthetic_year(opt);
    const std::filesystem::path dir = m.output_dir;
    csv::write_file(dir / "weather.csv", weather_csv_text(year.weather));
    csv::write_file(dir / "load.csv", load_csv_text(year.load));
    out << "wrote " << (dir / "weather.csv").string() << " and " << (dir / "load.csv").string() << " (seed "
        << m.seed << ", " << year.weather.size() << " h)\n";
    return kExitOk;
}

inline int cmd_oracle(const RunManifest& m, std::ostream& out)
{
    std::size_t mismatches = 0;
    for (std::size_t k = 0; k < m.instances; ++k) {
        const auto seed = m.seed + k;
        const auto inst = random_oracle_instance(seed);
        std::optional<double> dp_j, oracle_j;
        try {
            dp_j = total_objective(optimize_horizon_dp(inst.initial, inst.series, inst.fleet, inst.costs));
        } catch (const InfeasibleError&) {
        }
        try {
            oracle_j = brute_force_oracle(inst.initial, inst.series, inst.fleet, inst.costs, m.resolution).objective;
        } catch (const InfeasibleError&) {
        }
        double bound = 0.0;
        for (const auto& g : inst.fleet)
            bound = std::max(bound, g.fuel_a * inst.costs.fuel_price * inst.costs.w1 * m.resolution);
        bound *= static_cast<double>(inst.series.size());
        bool ok = dp_j.has_value() == oracle_j.has_value();
        if (ok && dp_j) ok = *dp_j <= *oracle_j + 1e-9 && *oracle_j - *dp_j <= bound + 1e-9;
        if (!ok) ++mismatches;
        out << "seed " << seed << ": T=" << inst.series.size() << " N=" << inst.fleet.size() << " dp="
            << (dp_j ? csv::fixed(*dp_j) : std::string("infeasible"))
            << " oracle=" << (oracle_j ? csv::fixed(*oracle_j) : std::string("infeasible")) << (ok ? " ok" : " MISMATCH")
            << '\n';
    }
    out << (m.instances - mismatches) << "/" << m.instances << " instances agree\n";
    return mismatches == 0 ? kExitOk : kExitOracleMismatch;
}

} // namespace detail

inline int cli_main(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr)
{
    CLI::App app{"PV, diesel and grid dispatch simulator", "pvdg"};
    app.require_subcommand(1);
    RunManifest m;

    auto add_common = [&m](CLI::App* sub) {
        sub->add_option("--config", m.config_path, "scenario configuration (JSON)");
        sub->add_option("--weather", m.weather_path, "weather CSV: timestamp,G,Gb,Gd,Ta[,Gt][,alpha_g]");
        sub->add_option("--load", m.load_path, "load CSV: timestamp,P_load[,alpha_g]");
        sub->add_option("--out", m.output_dir, "output directory")->capture_default_str();
        sub->add_option("--mode", m.mode, "optimizer: greedy or dp")->check(CLI::IsMember({"greedy", "dp"}));
        sub->add_option("--seed", m.seed, "seed for synthetic data")->capture_default_str();
    };
    auto* simulate = app.add_subcommand("simulate", "run one scenario");
    auto* compare = app.add_subcommand("compare", "run cases 1-3 and compare yearly energy and cost");
    auto* validate = app.add_subcommand("validate", "check configuration and data files only");
    auto* synth = app.add_subcommand("synth", "write a synthetic weather/load year");
    auto* oracle = app.add_subcommand("oracle", "cross-check DP against brute force on random small instances");
    for (auto* sub : {simulate, compare, validate, synth, oracle}) add_common(sub);
    oracle->add_option("--instances", m.instances, "number of random instances")->capture_default_str();
    oracle->add_option("--resolution", m.resolution, "oracle grid resolution, kW")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        err << app.help();
        return kExitUsage;
    }

    try {
        if (simulate->parsed()) return detail::cmd_simulate(m, out, err);
        if (compare->parsed()) return detail::cmd_compare(m, out, err);
        if (validate->parsed()) return detail::cmd_validate(m, out, err);
        if (synth->parsed()) return detail::cmd_synth(m, out);
        if (oracle->parsed()) return detail::cmd_oracle(m, out);
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n' << app.help();
        return kExitUsage;
    } catch (const InfeasibleError& e) {
        err << "infeasible: " << e.what() << '\n';
        return kExitInfeasible;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitData;
    }
    return kExitUsage;
}

} // namespace pvdg
