#pragma once

// Case configurations, yearly runs and energy/cost aggregation.

#include "pvdg/diesel_model.hpp"
#include "pvdg/dispatch.hpp"
#include "pvdg/errors.hpp"
#include "pvdg/grid_model.hpp"
#include "pvdg/solar_model.hpp"
#include "pvdg/timestamp.hpp"

#include <cmath>
#include <cstdio>
#include <future>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace pvdg {

enum class SolverMode { Greedy, Dp };

inline const char* to_string(SolverMode m) { return m == SolverMode::Greedy ? "greedy" : "dp"; }

struct PVBlock {
    PVCellSpec cell;
    PVArraySpec array{20, 157, 60};
};

struct ScenarioConfig {
    std::string name = "scenario";
    std::vector<DieselGenSpec> fleet;
    /// Power factor applied to kVA ratings when build_case creates generators.
    double fleet_power_factor = 1.0;
    SiteGeometry site;
    std::optional<PVBlock> pv;
    double pv_target_kwp = 700.0;
    GridSchedule grid;
    CostParams costs;
    SolverMode mode = SolverMode::Dp;
    std::optional<CommitmentState> initial_state;

    [[nodiscard]] CommitmentState initial() const
    {
        return initial_state ? *initial_state : CommitmentState::all_off(fleet.size());
    }

    void validate() const
    {
        if (fleet.empty()) throw DomainError("fleet must not be empty");
        check_fleet(fleet);
        site.validate();
        if (pv) {
            pv->cell.validate();
            pv->array.validate();
        }
        grid.validate();
        costs.validate();
        if (initial_state && initial_state->size() != fleet.size())
            throw DomainError("initial_state length does not match fleet size");
    }
};

struct LoadRecord {
    Timestamp timestamp{};
    double load_kw = 0.0;
    std::optional<int> grid_status{};
};

/// The generator all case fleets are derived from when the base config has none.
inline DieselGenSpec default_generator_template()
{
    DieselGenSpec g;
    g.id = "DG";
    g.cost_startup = 10.0;
    g.cost_shutdown = 5.0;
    g.cost_om = 3.0;
    return g;
}

/// Case 1: one 500 kVA unit, no PV. Case 2: adds a 700 kWp array.
/// Case 3: 200 + 150 + 150 kVA units with the same array.
inline ScenarioConfig build_case(int case_id, const ScenarioConfig& base)
{
    std::vector<double> ratings_kva;
    switch (case_id) {
    case 1:
    case 2: ratings_kva = {500.0}; break;
    case 3: ratings_kva = {200.0, 150.0, 150.0}; break;
    default: throw DomainError("unknown case id " + std::to_string(case_id));
    }
    ScenarioConfig cfg = base;
    cfg.name = "Case " + std::to_string(case_id);
    const DieselGenSpec tmpl = base.fleet.empty() ? default_generator_template() : base.fleet.front();
    cfg.fleet.clear();
    for (std::size_t i = 0; i < ratings_kva.size(); ++i) {
        DieselGenSpec g = tmpl;
        g.id = "DG" + std::to_string(i + 1);
        g.rated_kw = rated_kw_from_kva(ratings_kva[i], base.fleet_power_factor);
        cfg.fleet.push_back(g);
    }
    cfg.initial_state.reset();
    if (case_id == 1) {
        cfg.pv.reset();
    } else {
        PVBlock block = base.pv.value_or(PVBlock{});
        block.array = size_array(base.pv_target_kwp, block.cell, block.array.cells_per_module, block.array.modules_series);
        cfg.pv = block;
    }
    return cfg;
}

struct StepLog {
    Timestamp timestamp{};
    StepInputs inputs;
};

struct ScenarioResult {
    std::string name;
    std::vector<DieselGenSpec> fleet;
    CostParams costs;
    bool has_pv = false;
    double dt_hours = 1.0;
    CommitmentState initial;
    std::vector<StepLog> steps;
    std::vector<DispatchDecision> schedule;

    [[nodiscard]] std::vector<StepInputs> inputs() const
    {
        std::vector<StepInputs> v;
        v.reserve(steps.size());
        for (const auto& s : steps) v.push_back(s.inputs);
        return v;
    }
};

/// Uniform step length of a timestamp sequence in hours; 1 h for fewer than two samples.
template <class Record>
double uniform_step_hours(std::span<const Record> records)
{
    if (records.size() < 2) return 1.0;
    const double dt = hours_between(records[0].timestamp, records[1].timestamp);
    if (!(dt > 0.0)) throw DataError("timestamps must be strictly increasing (record 1)");
    for (std::size_t k = 2; k < records.size(); ++k) {
        const double d = hours_between(records[k - 1].timestamp, records[k].timestamp);
        if (d != dt)
            throw DataError("non-uniform time step at record " + std::to_string(k) + ": " + format_timestamp(records[k].timestamp));
    }
    return dt;
}

/// Throws DataError naming the first timestamp mismatch.
inline void check_alignment(std::span<const WeatherRecord> weather, std::span<const LoadRecord> load)
{
    const std::size_t n = std::min(weather.size(), load.size());
    for (std::size_t k = 0; k < n; ++k) {
        if (weather[k].timestamp != load[k].timestamp)
            throw DataError("timestamp mismatch at record " + std::to_string(k) + ": weather " +
                            format_timestamp(weather[k].timestamp) + " vs load " + format_timestamp(load[k].timestamp));
        if (weather[k].grid_status && load[k].grid_status && *weather[k].grid_status != *load[k].grid_status)
            throw DataError("alpha_g disagrees between weather and load at record " + std::to_string(k));
    }
    if (weather.size() != load.size())
        throw DataError("series lengths differ: weather " + std::to_string(weather.size()) + " vs load " +
                        std::to_string(load.size()));
}

/// Builds per-step optimizer inputs: PV availability, grid status and load.
inline std::vector<StepLog> build_step_inputs(const ScenarioConfig& config, std::span<const WeatherRecord> weather,
                                              std::span<const LoadRecord> load)
{
    check_alignment(weather, load);
    const double dt = uniform_step_hours(weather);
    std::optional<PVSystem> pv;
    if (config.pv) pv = PVSystem{config.pv->array, config.pv->cell, config.site};

    std::vector<StepLog> steps(weather.size());
    for (std::size_t k = 0; k < weather.size(); ++k) {
        auto& s = steps[k];
        s.timestamp = weather[k].timestamp;
        s.inputs.load_kw = load[k].load_kw;
        s.inputs.pv_available_kw = pv ? available_pv_power(weather[k], *pv) : 0.0;
        if (weather[k].grid_status)
            s.inputs.grid_status = *weather[k].grid_status;
        else if (load[k].grid_status)
            s.inputs.grid_status = *load[k].grid_status;
        else
            s.inputs.grid_status = grid_status(static_cast<double>(k) * dt, config.grid);
        s.inputs.grid_max_kw = config.grid.max_power_kw;
        s.inputs.dt_hours = dt;
        s.inputs.validate();
    }
    return steps;
}

/// Runs the configured optimizer over the series and validates every decision.
inline ScenarioResult run_scenario(const ScenarioConfig& config, std::span<const WeatherRecord> weather,
                                   std::span<const LoadRecord> load)
{
    config.validate();
    ScenarioResult r;
    r.name = config.name;
    r.fleet = config.fleet;
    r.costs = config.costs;
    r.has_pv = config.pv.has_value();
    r.initial = config.initial();
    r.steps = build_step_inputs(config, weather, load);
    r.dt_hours = r.steps.empty() ? 1.0 : r.steps.front().inputs.dt_hours;
    if (r.steps.empty()) return r;

    const auto series = r.inputs();
    try {
        r.schedule = config.mode == SolverMode::Dp ? optimize_horizon_dp(r.initial, series, config.fleet, config.costs)
                                                   : optimize_horizon_greedy(r.initial, series, config.fleet, config.costs);
    } catch (const InfeasibleError& e) {
        throw InfeasibleError(e.step(), e.inputs(), config.name + " at " + format_timestamp(r.steps[e.step()].timestamp));
    }
    const auto violations = validate_schedule(r.schedule, series, r.initial, config.fleet);
    if (!violations.empty()) throw std::logic_error(config.name + ": invalid decision: " + violations.front());
    return r;
}

/// Dispatched energy totals in MWh.
struct EnergySummary {
    double grid = 0.0;
    double diesel = 0.0;
    double pv = 0.0;
    double exported = 0.0;
    double curtailed = 0.0;
};

/// Monetary totals in k$. total = grid + diesel; export credit is reported separately.
struct CostSummary {
    double grid = 0.0;
    double diesel = 0.0;
    double fuel = 0.0;
    double transitions = 0.0;
    double om = 0.0;
    double export_credit = 0.0;
    double total = 0.0;
};

inline EnergySummary aggregate_energy(std::span<const DispatchDecision> schedule, double dt_hours)
{
    EnergySummary e;
    for (const auto& d : schedule) {
        e.grid += d.grid_import_kw * dt_hours;
        for (double p : d.dg_kw) e.diesel += p * dt_hours;
        e.pv += d.pv_dispatch_kw * dt_hours;
        e.exported += d.export_kw * dt_hours;
        e.curtailed += d.curtail_kw * dt_hours;
    }
    e.grid /= 1000.0;
    e.diesel /= 1000.0;
    e.pv /= 1000.0;
    e.exported /= 1000.0;
    e.curtailed /= 1000.0;
    return e;
}

inline CostSummary aggregate_cost(std::span<const DispatchDecision> schedule, std::span<const DieselGenSpec> specs,
                                  const CostParams& costs, double dt_hours)
{
    CostSummary c;
    for (const auto& d : schedule) {
        const auto b = cost_breakdown(d, specs, costs, dt_hours);
        c.grid += b.grid;
        c.fuel += b.fuel;
        c.transitions += b.transitions;
        c.om += b.om;
        c.export_credit += b.export_credit;
    }
    c.grid /= 1000.0;
    c.fuel /= 1000.0;
    c.transitions /= 1000.0;
    c.om /= 1000.0;
    c.export_credit /= 1000.0;
    c.diesel = c.fuel + c.transitions + c.om;
    c.total = c.grid + c.diesel;
    return c;
}

struct CaseSummary {
    std::string name;
    bool has_pv = false;
    EnergySummary energy;
    CostSummary cost;
    double objective = 0.0;
};

inline CaseSummary summarize(const ScenarioResult& r)
{
    return CaseSummary{r.name, r.has_pv, aggregate_energy(r.schedule, r.dt_hours),
                       aggregate_cost(r.schedule, r.fleet, r.costs, r.dt_hours), total_objective(r.schedule)};
}

/// Rounds half-up at the given number of decimals.
inline double round_half_up(double value, int decimals)
{
    const double scale = std::pow(10.0, decimals);
    // Absorbs representation error such as 0.125 stored as 0.12499999...
    return std::floor(value * scale + 0.5 + 1e-9) / scale;
}

struct Reduction {
    std::size_t case_index = 0;
    std::size_t baseline_index = 0;
    double percent = 0.0; // rounded to 2 decimals
    std::string text;     // e.g. "29.64%"
};

struct ComparisonReport {
    std::vector<Reduction> reductions;

    /// Reduction of case `a` relative to `b`, if present.
    [[nodiscard]] const Reduction* find(std::size_t a, std::size_t b) const
    {
        for (const auto& r : reductions)
            if (r.case_index == a && r.baseline_index == b) return &r;
        return nullptr;
    }
};

inline std::string format_percent(double rounded)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f%%", rounded);
    return buf;
}

/// Cost reduction 100 * (1 - total_a / total_b) of every later case relative to every earlier case.
/// Listed latest case first, baselines from nearest to farthest.
inline ComparisonReport compare_cases(std::span<const CostSummary> summaries)
{
    if (summaries.size() < 2) throw DomainError("compare_cases needs at least two summaries");
    ComparisonReport report;
    for (std::size_t a = summaries.size(); a-- > 1;) {
        for (std::size_t b = a; b-- > 0;) {
            if (summaries[b].total == 0.0) throw DomainError("compare_cases: zero baseline total");
            const double pct = round_half_up(100.0 * (1.0 - summaries[a].total / summaries[b].total), 2);
            report.reductions.push_back({a, b, pct, format_percent(pct)});
        }
    }
    return report;
}

/// Runs cases concurrently; results keep the input order.
inline std::vector<ScenarioResult> run_cases(std::span<const ScenarioConfig> configs,
                                             std::span<const WeatherRecord> weather, std::span<const LoadRecord> load)
{
    std::vector<std::future<ScenarioResult>> jobs;
    for (const auto& c : configs)
        jobs.push_back(std::async(std::launch::async, [&c, weather, load] { return run_scenario(c, weather, load); }));
    std::vector<ScenarioResult> out;
    for (auto& j : jobs) out.push_back(j.get());
    return out;
}

} // namespace pvdg
