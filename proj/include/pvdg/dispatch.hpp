#pragma once

// Optimal operation of the PV-diesel microgrid.
//
// Each step's problem splits into binary choices (commitment state, grid
// exchange mode) and a linear continuous sub-problem. The continuous part is
// solved exactly by merit order: committed generators are pinned at their
// minimum load, then the residual load is covered cheapest-marginal-first.
// Commitments are chosen per step (greedy) or over the horizon by dynamic
// programming on the 2^N commitment states.

#include "pvdg/diesel_model.hpp"
#include "pvdg/errors.hpp"
#include "pvdg/grid_model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

namespace pvdg {

struct StepInputs {
    double load_kw = 0.0;
    double pv_available_kw = 0.0;
    int grid_status = 1;
    double grid_max_kw = 0.0;
    double dt_hours = 1.0;

    void validate() const
    {
        if (!(load_kw >= 0.0)) throw DomainError("step load must be non-negative");
        if (!(pv_available_kw >= 0.0)) throw DomainError("available PV power must be non-negative");
        if (grid_status != 0 && grid_status != 1) throw DomainError("grid status must be 0 or 1");
        if (!(grid_max_kw >= 0.0)) throw DomainError("grid power limit must be non-negative");
        if (!(dt_hours > 0.0)) throw DomainError("step length must be positive");
    }
    [[nodiscard]] double grid_capability_kw() const { return grid_capability(grid_status, grid_max_kw); }
};

struct CostParams {
    double grid_price = 0.15;  // $/kWh imported
    double export_price = 0.1; // $/kWh exported
    double fuel_price = 1.4;   // $/l
    double w1 = 0.5;
    double w2 = 0.5;

    void validate() const
    {
        if (!(w1 >= 0.0) || !(w2 >= 0.0)) throw DomainError("objective weights must be non-negative");
        if (!(w1 + w2 > 0.0)) throw DomainError("objective weights must not both be zero");
    }
};

enum class GridMode : std::uint8_t { Import = 0, Export = 1, Idle = 2 };

inline constexpr std::array<GridMode, 3> kGridModes{GridMode::Import, GridMode::Export, GridMode::Idle};

inline const char* to_string(GridMode m)
{
    switch (m) {
    case GridMode::Import: return "import";
    case GridMode::Export: return "export";
    case GridMode::Idle: return "idle";
    }
    return "?";
}

/// Monetary terms of one step in $.
struct CostBreakdown {
    double grid = 0.0;
    double fuel = 0.0;
    double transitions = 0.0;
    double om = 0.0;
    double export_credit = 0.0;

    [[nodiscard]] double diesel() const { return fuel + transitions + om; }
};

struct DispatchDecision {
    CommitmentState state;
    TransitionIndicators indicators;
    GridMode mode = GridMode::Idle;
    int import_flag = 0;
    int export_flag = 0;
    double grid_import_kw = 0.0;
    double export_kw = 0.0;
    std::vector<double> dg_kw;
    std::vector<double> fuel_lph;
    double pv_dispatch_kw = 0.0;
    double curtail_kw = 0.0;
    double stage_cost = 0.0;
    CostBreakdown costs;
};

/// Power-balance tolerance, kW.
inline constexpr double kBalanceTolerance = 1e-6;

/// Solution of the continuous sub-problem for fixed binaries.
struct Allocation {
    double grid_import_kw = 0.0;
    double export_kw = 0.0;
    double pv_dispatch_kw = 0.0;
    double curtail_kw = 0.0;
    std::vector<double> dg_kw;
    /// Objective of this step excluding start/stop terms.
    double objective = 0.0;
};

namespace detail {

enum class Source : std::uint8_t { PvFree, PvExportable, Grid, Diesel };

struct MeritBlock {
    double marginal = 0.0;
    double capacity = 0.0;
    Source source = Source::PvFree;
    std::size_t unit = 0;
};

/// Objective of a step excluding transitions, from its continuous values.
inline double running_objective(const CommitmentState& state, double grid_import, double export_kw, double pv_dispatch,
                                std::span<const double> dg_kw, const StepInputs& in,
                                std::span<const DieselGenSpec> specs, const CostParams& costs)
{
    double spend = costs.grid_price * grid_import;
    for (std::size_t i = 0; i < specs.size(); ++i) {
        if (!state[i]) continue;
        spend += costs.fuel_price * (specs[i].fuel_a * dg_kw[i] + specs[i].fuel_b * specs[i].rated_kw);
        spend += specs[i].cost_om;
    }
    return (costs.w1 * spend - costs.w2 * (pv_dispatch + costs.export_price * export_kw)) * in.dt_hours;
}

} // namespace detail

/// Exact optimum of the continuous sub-problem, or nullopt when the binaries admit no balanced allocation.
inline std::optional<Allocation> continuous_allocation(const CommitmentState& state, GridMode mode,
                                                       const StepInputs& in, std::span<const DieselGenSpec> specs,
                                                       const CostParams& costs)
{
    using detail::MeritBlock;
    using detail::Source;
    if (state.size() != specs.size()) throw DomainError("commitment state does not match fleet size");
    in.validate();

    const bool grid_on = in.grid_status == 1;
    if (!grid_on && mode != GridMode::Idle) return std::nullopt;
    const double capability = in.grid_capability_kw();

    Allocation a;
    a.dg_kw.assign(specs.size(), 0.0);
    double pinned = 0.0;
    for (std::size_t i = 0; i < specs.size(); ++i) {
        if (state[i]) {
            a.dg_kw[i] = specs[i].min_kw();
            pinned += a.dg_kw[i];
        }
    }
    double residual = in.load_kw - pinned;
    if (residual < -kBalanceTolerance) return std::nullopt;
    residual = std::max(residual, 0.0);

    // A grid-feeding inverter cannot inject into an unformed island.
    const bool inverter_live = grid_on || state.count_on() > 0;
    const double pv_usable = inverter_live ? in.pv_available_kw : 0.0;
    const double export_value = costs.w2 * costs.export_price;
    const bool exporting = mode == GridMode::Export && export_value > 0.0;

    std::vector<MeritBlock> blocks;
    blocks.reserve(specs.size() + 3);
    if (exporting) {
        const double exportable = std::min(capability, pv_usable);
        blocks.push_back({-costs.w2, pv_usable - exportable, Source::PvFree, 0});
        blocks.push_back({-costs.w2 + export_value, exportable, Source::PvExportable, 0});
    } else {
        blocks.push_back({-costs.w2, pv_usable, Source::PvFree, 0});
    }
    if (mode == GridMode::Import) blocks.push_back({costs.w1 * costs.grid_price, capability, Source::Grid, 0});
    for (std::size_t i = 0; i < specs.size(); ++i) {
        if (state[i])
            blocks.push_back({costs.w1 * costs.fuel_price * specs[i].fuel_a, specs[i].rated_kw - specs[i].min_kw(),
                              Source::Diesel, i});
    }
    std::stable_sort(blocks.begin(), blocks.end(),
                     [](const MeritBlock& x, const MeritBlock& y) { return x.marginal < y.marginal; });

    for (const auto& b : blocks) {
        if (residual <= 0.0) break;
        const double take = std::min(residual, std::max(0.0, b.capacity));
        switch (b.source) {
        case Source::PvFree:
        case Source::PvExportable: a.pv_dispatch_kw += take; break;
        case Source::Grid: a.grid_import_kw += take; break;
        case Source::Diesel: a.dg_kw[b.unit] += take; break;
        }
        residual -= take;
    }
    if (residual > kBalanceTolerance) return std::nullopt;

    const double leftover = std::max(0.0, pv_usable - a.pv_dispatch_kw);
    if (exporting) a.export_kw = std::min(capability, leftover);
    a.curtail_kw = std::max(0.0, in.pv_available_kw - a.pv_dispatch_kw - a.export_kw);
    a.objective =
        detail::running_objective(state, a.grid_import_kw, a.export_kw, a.pv_dispatch_kw, a.dg_kw, in, specs, costs);
    return a;
}

/// Monetary breakdown of a decision in $.
inline CostBreakdown cost_breakdown(const DispatchDecision& d, std::span<const DieselGenSpec> specs,
                                    const CostParams& costs, double dt_hours)
{
    CostBreakdown c;
    c.grid = costs.grid_price * d.grid_import_kw * dt_hours;
    for (std::size_t i = 0; i < specs.size(); ++i) {
        c.fuel += costs.fuel_price * d.fuel_lph[i] * dt_hours;
        c.transitions += specs[i].cost_startup * d.indicators.startup[i] + specs[i].cost_shutdown * d.indicators.shutdown[i];
        c.om += specs[i].cost_om * (d.state[i] ? 1.0 : 0.0) * dt_hours;
    }
    c.export_credit = costs.export_price * d.export_kw * dt_hours;
    return c;
}

/// Weighted step objective: w1 * (money spent) - w2 * (PV dispatched + export credit).
/// Power terms scale with the step length; start/stop costs are per event.
inline double stage_cost(const DispatchDecision& d, std::span<const DieselGenSpec> specs, const CostParams& costs,
                         double dt_hours)
{
    const auto c = cost_breakdown(d, specs, costs, dt_hours);
    return costs.w1 * (c.grid + c.fuel + c.transitions + c.om) -
           costs.w2 * (d.pv_dispatch_kw * dt_hours + c.export_credit);
}

/// Builds a full decision from fixed binaries and a continuous allocation.
inline DispatchDecision make_decision(const CommitmentState& state, const CommitmentState& previous, GridMode mode,
                                      const Allocation& a, const StepInputs& in,
                                      std::span<const DieselGenSpec> specs, const CostParams& costs)
{
    DispatchDecision d;
    d.state = state;
    d.indicators = transition_indicators(state, previous);
    d.mode = mode;
    d.import_flag = mode == GridMode::Import ? 1 : 0;
    d.export_flag = mode == GridMode::Export ? 1 : 0;
    d.grid_import_kw = a.grid_import_kw;
    d.export_kw = a.export_kw;
    d.pv_dispatch_kw = a.pv_dispatch_kw;
    d.curtail_kw = a.curtail_kw;
    d.dg_kw = a.dg_kw;
    d.fuel_lph.resize(specs.size());
    for (std::size_t i = 0; i < specs.size(); ++i) {
        // Clamp away last-bit overshoot of the merit-order fill.
        const auto r = feasible_range(specs[i], state[i]);
        d.dg_kw[i] = std::clamp(d.dg_kw[i], r.lo, r.hi);
        d.fuel_lph[i] = fuel_rate(d.dg_kw[i], specs[i], state[i]);
    }
    d.costs = cost_breakdown(d, specs, costs, in.dt_hours);
    d.stage_cost = stage_cost(d, specs, costs, in.dt_hours);
    return d;
}

/// Weighted start/stop cost of moving between two commitment states.
inline double transition_objective(const CommitmentState& from, const CommitmentState& to,
                                   std::span<const DieselGenSpec> specs, const CostParams& costs)
{
    const auto ind = transition_indicators(to, from);
    double c = 0.0;
    for (std::size_t i = 0; i < specs.size(); ++i)
        c += specs[i].cost_startup * ind.startup[i] + specs[i].cost_shutdown * ind.shutdown[i];
    return costs.w1 * c;
}

inline std::string describe(const StepInputs& in)
{
    std::ostringstream os;
    os << "P_load=" << in.load_kw << " kW, P_av_pv=" << in.pv_available_kw << " kW, alpha_g=" << in.grid_status
       << ", P_g_max=" << in.grid_max_kw << " kW, dt=" << in.dt_hours << " h";
    return os.str();
}

/// No commitment and grid mode balances the load at some step.
class InfeasibleError : public std::runtime_error {
public:
    InfeasibleError(std::size_t step, const StepInputs& inputs, const std::string& context = {})
        : std::runtime_error((context.empty() ? std::string() : context + ": ") + "infeasible at step " +
                             std::to_string(step) + " (" + describe(inputs) + ")"),
          step_(step), inputs_(inputs)
    {
    }
    [[nodiscard]] std::size_t step() const { return step_; }
    [[nodiscard]] const StepInputs& inputs() const { return inputs_; }

private:
    std::size_t step_;
    StepInputs inputs_;
};

inline void check_fleet(std::span<const DieselGenSpec> specs)
{
    if (specs.size() > kMaxFleetSize) throw DomainError("fleet too large");
    for (const auto& s : specs) s.validate();
}

/// Best decision for one step given the previous commitment.
/// Ties go to the lowest commitment code, then import < export < idle.
inline DispatchDecision optimize_step_greedy(const CommitmentState& previous, const StepInputs& in,
                                             std::span<const DieselGenSpec> specs, const CostParams& costs,
                                             std::size_t step_index = 0)
{
    if (previous.size() != specs.size()) throw DomainError("previous state does not match fleet size");
    const std::uint32_t n_states = 1u << specs.size();
    std::optional<DispatchDecision> best;
    for (std::uint32_t code = 0; code < n_states; ++code) {
        const auto state = CommitmentState::decode(code, specs.size());
        for (GridMode mode : kGridModes) {
            const auto a = continuous_allocation(state, mode, in, specs, costs);
            if (!a) continue;
            auto d = make_decision(state, previous, mode, *a, in, specs, costs);
            if (!best || d.stage_cost < best->stage_cost) best = std::move(d);
        }
    }
    if (!best) throw InfeasibleError(step_index, in);
    return *best;
}

inline std::vector<DispatchDecision> optimize_horizon_greedy(const CommitmentState& initial,
                                                             std::span<const StepInputs> series,
                                                             std::span<const DieselGenSpec> specs,
                                                             const CostParams& costs)
{
    check_fleet(specs);
    costs.validate();
    std::vector<DispatchDecision> out;
    out.reserve(series.size());
    CommitmentState prev = initial;
    for (std::size_t t = 0; t < series.size(); ++t) {
        out.push_back(optimize_step_greedy(prev, series[t], specs, costs, t));
        prev = out.back().state;
    }
    return out;
}

/// Exact minimum of the summed objective over the horizon by dynamic programming
/// over commitment states. Ties go to the lowest state code, then import < export < idle.
inline std::vector<DispatchDecision> optimize_horizon_dp(const CommitmentState& initial,
                                                         std::span<const StepInputs> series,
                                                         std::span<const DieselGenSpec> specs,
                                                         const CostParams& costs)
{
    check_fleet(specs);
    costs.validate();
    if (series.empty()) throw DomainError("optimize_horizon_dp: empty series");
    if (initial.size() != specs.size()) throw DomainError("initial state does not match fleet size");

    constexpr double inf = std::numeric_limits<double>::infinity();
    const std::size_t n_states = std::size_t{1} << specs.size();
    const std::size_t horizon = series.size();

    std::vector<CommitmentState> states;
    states.reserve(n_states);
    for (std::size_t s = 0; s < n_states; ++s) states.push_back(CommitmentState::decode(static_cast<std::uint32_t>(s), specs.size()));

    std::vector<double> trans(n_states * n_states);
    for (std::size_t from = 0; from < n_states; ++from)
        for (std::size_t to = 0; to < n_states; ++to)
            trans[from * n_states + to] = transition_objective(states[from], states[to], specs, costs);

    struct Cell {
        GridMode mode = GridMode::Idle;
        std::optional<Allocation> alloc;
    };
    std::vector<Cell> cells(horizon * n_states);
    std::vector<std::uint32_t> parent(horizon * n_states, 0);
    std::vector<double> value(n_states, inf), next(n_states, inf);

    const std::size_t init_code = initial.encode();
    for (std::size_t t = 0; t < horizon; ++t) {
        bool any = false;
        for (std::size_t s = 0; s < n_states; ++s) {
            auto& cell = cells[t * n_states + s];
            for (GridMode mode : kGridModes) {
                auto a = continuous_allocation(states[s], mode, series[t], specs, costs);
                if (a && (!cell.alloc || a->objective < cell.alloc->objective)) {
                    cell.alloc = std::move(a);
                    cell.mode = mode;
                }
            }
            next[s] = inf;
            if (!cell.alloc) continue;

            double best = inf;
            std::uint32_t arg = 0;
            if (t == 0) {
                best = trans[init_code * n_states + s];
                arg = static_cast<std::uint32_t>(init_code);
            } else {
                for (std::size_t p = 0; p < n_states; ++p) {
                    if (value[p] == inf) continue;
                    const double v = value[p] + trans[p * n_states + s];
                    if (v < best) {
                        best = v;
                        arg = static_cast<std::uint32_t>(p);
                    }
                }
            }
            if (best == inf) continue;
            next[s] = best + cell.alloc->objective;
            parent[t * n_states + s] = arg;
            any = true;
        }
        if (!any) throw InfeasibleError(t, series[t]);
        std::swap(value, next);
    }

    std::size_t last = 0;
    for (std::size_t s = 1; s < n_states; ++s)
        if (value[s] < value[last]) last = s;

    std::vector<std::size_t> path(horizon);
    path[horizon - 1] = last;
    for (std::size_t t = horizon - 1; t > 0; --t) path[t - 1] = parent[t * n_states + path[t]];

    std::vector<DispatchDecision> out;
    out.reserve(horizon);
    for (std::size_t t = 0; t < horizon; ++t) {
        const auto& cell = cells[t * n_states + path[t]];
        const auto& prev = t == 0 ? initial : states[path[t - 1]];
        out.push_back(make_decision(states[path[t]], prev, cell.mode, *cell.alloc, series[t], specs, costs));
    }
    return out;
}

inline double total_objective(std::span<const DispatchDecision> schedule)
{
    double j = 0.0;
    for (const auto& d : schedule) j += d.stage_cost;
    return j;
}

/// Lists every violated decision invariant; empty when the decision is valid.
inline std::vector<std::string> validate_decision(const DispatchDecision& d, const StepInputs& in,
                                                  const CommitmentState& previous,
                                                  std::span<const DieselGenSpec> specs)
{
    std::vector<std::string> v;
    const std::size_t n = specs.size();
    if (d.state.size() != n || d.dg_kw.size() != n || d.fuel_lph.size() != n || d.indicators.startup.size() != n ||
        d.indicators.shutdown.size() != n) {
        v.emplace_back("vector sizes do not match fleet");
        return v;
    }
    const double tol = kBalanceTolerance;

    double supply = d.grid_import_kw + d.pv_dispatch_kw;
    for (double p : d.dg_kw) supply += p;
    if (std::abs(supply - in.load_kw) > tol) v.emplace_back("power balance residual exceeds tolerance");

    if (std::abs(d.pv_dispatch_kw + d.export_kw + d.curtail_kw - in.pv_available_kw) > tol)
        v.emplace_back("PV split does not sum to available power");
    if (d.pv_dispatch_kw < -tol || d.export_kw < -tol || d.curtail_kw < -tol || d.grid_import_kw < -tol)
        v.emplace_back("negative power component");

    for (std::size_t i = 0; i < n; ++i) {
        const auto r = feasible_range(specs[i], d.state[i]);
        if (d.dg_kw[i] < r.lo - kRangeTolerance || d.dg_kw[i] > r.hi + kRangeTolerance)
            v.emplace_back("generator '" + specs[i].id + "' outside feasible range");
        const double expected_fuel = d.state[i] ? specs[i].fuel_a * d.dg_kw[i] + specs[i].fuel_b * specs[i].rated_kw : 0.0;
        if (std::abs(d.fuel_lph[i] - expected_fuel) > 1e-9 * std::max(1.0, expected_fuel))
            v.emplace_back("generator '" + specs[i].id + "' fuel inconsistent with dispatch");
    }

    const auto expected = transition_indicators(d.state, previous);
    if (expected.startup != d.indicators.startup || expected.shutdown != d.indicators.shutdown)
        v.emplace_back("transition indicators inconsistent with commitment sequence");
    for (std::size_t i = 0; i < n; ++i)
        if (d.indicators.startup[i] * d.indicators.shutdown[i] != 0) v.emplace_back("simultaneous start and stop");

    const bool grid_on = in.grid_status == 1;
    if (in.load_kw > 0.0 && !grid_forming_ok(d.state, grid_on))
        v.emplace_back("no grid-forming generator during blackout");

    const GridExchange x{d.import_flag, d.export_flag, d.grid_import_kw, d.export_kw};
    if (!exchange_feasible(x, in.grid_capability_kw() + tol)) v.emplace_back("grid exchange infeasible");
    if (d.import_flag * d.export_flag != 0) v.emplace_back("simultaneous import and export flags");
    if (d.grid_import_kw > tol && d.import_flag != 1) v.emplace_back("import without import flag");
    if (d.export_kw > tol && d.export_flag != 1) v.emplace_back("export without export flag");
    if (!grid_on && (d.grid_import_kw > tol || d.export_kw > tol)) v.emplace_back("grid exchange during blackout");
    if (!grid_on && d.state.count_on() == 0 && d.pv_dispatch_kw > tol)
        v.emplace_back("PV dispatched into an unformed island");
    return v;
}

/// Validates a whole schedule; returns "step k: ..." messages.
inline std::vector<std::string> validate_schedule(std::span<const DispatchDecision> schedule,
                                                  std::span<const StepInputs> series, const CommitmentState& initial,
                                                  std::span<const DieselGenSpec> specs)
{
    std::vector<std::string> out;
    if (schedule.size() != series.size()) {
        out.emplace_back("schedule length differs from input series");
        return out;
    }
    const CommitmentState* prev = &initial;
    for (std::size_t t = 0; t < schedule.size(); ++t) {
        for (auto& msg : validate_decision(schedule[t], series[t], *prev, specs))
            out.push_back("step " + std::to_string(t) + ": " + msg);
        prev = &schedule[t].state;
    }
    return out;
}

} // namespace pvdg
