#pragma once

// Exhaustive reference solver for small instances. Enumerates every commitment
// sequence and grid mode, and grid-searches the continuous powers. Shares no
// optimization code with the merit-order / DP path.

#include "pvdg/dispatch.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <vector>

namespace pvdg {

inline constexpr std::size_t kOracleMaxSteps = 8;
inline constexpr std::size_t kOracleMaxUnits = 2;

struct OracleResult {
    std::vector<DispatchDecision> schedule;
    double objective = 0.0;
    /// Best objective over commitment sequences other than the returned one.
    std::optional<double> runner_up;
};

namespace detail {

inline std::vector<double> grid_points(double lo, double hi, double resolution)
{
    std::vector<double> pts;
    if (hi < lo) return pts;
    for (long k = 0;; ++k) {
        const double p = lo + static_cast<double>(k) * resolution;
        if (p >= hi - 1e-12) break;
        pts.push_back(p);
    }
    pts.push_back(hi);
    return pts;
}

struct OracleCell {
    double value = std::numeric_limits<double>::infinity();
    GridMode mode = GridMode::Idle;
    Allocation alloc;
};

inline OracleCell oracle_cell(std::uint32_t code, const StepInputs& in, std::span<const DieselGenSpec> specs,
                              const CostParams& costs, double resolution)
{
    const std::size_t n = specs.size();
    const bool grid_on = in.grid_status == 1;
    const double cap = grid_on ? in.grid_max_kw : 0.0;
    const bool any_on = code != 0;
    const double pv_usable = (grid_on || any_on) ? in.pv_available_kw : 0.0;
    constexpr double tol = 1e-9;

    std::vector<std::vector<double>> axes(n);
    for (std::size_t i = 0; i < n; ++i) {
        if ((code >> i) & 1u)
            axes[i] = grid_points(specs[i].min_load_frac * specs[i].rated_kw, specs[i].rated_kw, resolution);
        else
            axes[i] = {0.0};
    }

    OracleCell best;
    auto consider = [&](GridMode mode, const std::vector<double>& dg, double grid, double pv, double exp) {
        double spend = costs.grid_price * grid;
        for (std::size_t i = 0; i < n; ++i) {
            if (!((code >> i) & 1u)) continue;
            spend += costs.fuel_price * (specs[i].fuel_a * dg[i] + specs[i].fuel_b * specs[i].rated_kw) + specs[i].cost_om;
        }
        const double j = (costs.w1 * spend - costs.w2 * (pv + costs.export_price * exp)) * in.dt_hours;
        if (j < best.value) {
            best.value = j;
            best.mode = mode;
            best.alloc.dg_kw = dg;
            best.alloc.grid_import_kw = grid;
            best.alloc.pv_dispatch_kw = pv;
            best.alloc.export_kw = exp;
            best.alloc.curtail_kw = std::max(0.0, in.pv_available_kw - pv - exp);
            best.alloc.objective = j;
        }
    };

    std::vector<std::size_t> idx(n, 0);
    std::vector<double> dg(n, 0.0);
    while (true) {
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            dg[i] = axes[i][idx[i]];
            sum += dg[i];
        }
        const double residual = in.load_kw - sum;

        if (grid_on) {
            for (double pv : grid_points(0.0, pv_usable, resolution)) {
                const double g = residual - pv;
                if (g >= -tol && g <= cap + tol) consider(GridMode::Import, dg, std::max(0.0, g), pv, 0.0);
            }
            if (residual >= -tol && residual <= pv_usable + tol) {
                const double pv = std::clamp(residual, 0.0, pv_usable);
                for (double e : grid_points(0.0, std::min(cap, pv_usable - pv), resolution))
                    consider(GridMode::Export, dg, 0.0, pv, e);
            }
        }
        if (residual >= -tol && residual <= pv_usable + tol)
            consider(GridMode::Idle, dg, 0.0, std::clamp(residual, 0.0, pv_usable), 0.0);

        std::size_t k = 0;
        while (k < n && ++idx[k] == axes[k].size()) idx[k++] = 0;
        if (k == n) break;
    }
    return best;
}

} // namespace detail

/// Exhaustive search over all commitment sequences with grid-searched continuous powers.
/// Limited to kOracleMaxSteps steps and kOracleMaxUnits generators.
inline OracleResult brute_force_oracle(const CommitmentState& initial, std::span<const StepInputs> series,
                                       std::span<const DieselGenSpec> specs, const CostParams& costs,
                                       double resolution_kw)
{
    if (series.empty() || series.size() > kOracleMaxSteps) throw DomainError("oracle: horizon must be 1..8 steps");
    if (specs.size() > kOracleMaxUnits) throw DomainError("oracle: at most 2 generators");
    if (!(resolution_kw > 0.0)) throw DomainError("oracle: resolution must be positive");
    if (initial.size() != specs.size()) throw DomainError("oracle: initial state does not match fleet size");
    check_fleet(specs);
    costs.validate();
    for (const auto& in : series) in.validate();

    const std::size_t n = specs.size();
    const std::uint32_t n_states = 1u << n;
    const std::size_t horizon = series.size();

    std::vector<detail::OracleCell> cells;
    cells.reserve(horizon * n_states);
    for (std::size_t t = 0; t < horizon; ++t)
        for (std::uint32_t s = 0; s < n_states; ++s)
            cells.push_back(detail::oracle_cell(s, series[t], specs, costs, resolution_kw));

    auto switch_cost = [&](std::uint32_t from, std::uint32_t to) {
        double c = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const bool a = (from >> i) & 1u, b = (to >> i) & 1u;
            if (!a && b) c += specs[i].cost_startup;
            if (a && !b) c += specs[i].cost_shutdown;
        }
        return costs.w1 * c;
    };

    constexpr double inf = std::numeric_limits<double>::infinity();
    double best = inf, second = inf;
    std::vector<std::uint32_t> best_seq;
    std::vector<std::uint32_t> seq(horizon, 0);
    const std::uint32_t init = initial.encode();
    while (true) {
        double total = 0.0;
        std::uint32_t prev = init;
        for (std::size_t t = 0; t < horizon && total < inf; ++t) {
            total += cells[t * n_states + seq[t]].value + switch_cost(prev, seq[t]);
            prev = seq[t];
        }
        if (total < best) {
            second = best;
            best = total;
            best_seq = seq;
        } else if (total < second) {
            second = total;
        }
        std::size_t k = horizon;
        while (k > 0 && ++seq[k - 1] == n_states) seq[--k] = 0;
        if (k == 0) break;
    }
    if (best == inf) {
        for (std::size_t t = 0; t < horizon; ++t) {
            bool any = false;
            for (std::uint32_t s = 0; s < n_states; ++s) any = any || cells[t * n_states + s].value < inf;
            if (!any) throw InfeasibleError(t, series[t]);
        }
        throw InfeasibleError(0, series[0]);
    }

    OracleResult r;
    CommitmentState prev = initial;
    for (std::size_t t = 0; t < horizon; ++t) {
        const auto& cell = cells[t * n_states + best_seq[t]];
        const auto state = CommitmentState::decode(best_seq[t], n);
        r.schedule.push_back(make_decision(state, prev, cell.mode, cell.alloc, series[t], specs, costs));
        prev = state;
    }
    r.objective = total_objective(r.schedule);
    if (second < inf) r.runner_up = second;
    return r;
}

} // namespace pvdg

namespace pvdg {

/// A small dispatch instance for cross-checking solvers.
struct OracleInstance {
    std::vector<StepInputs> series;
    std::vector<DieselGenSpec> fleet;
    CostParams costs;
    CommitmentState initial;
};

/// Seeded random instance with 1..max_steps steps, 1..2 generators and a blackout window.
/// Powers are multiples of 0.5 kW so every vertex of the continuous problem lies on a 0.5 kW grid.
inline OracleInstance random_oracle_instance(std::uint64_t seed, std::size_t max_steps = 6)
{
    std::mt19937_64 eng(seed);
    auto unit = [&] { return static_cast<double>(eng() >> 11) * 0x1.0p-53; };
    auto pick = [&](long lo, long hi) { return lo + static_cast<long>(eng() % static_cast<std::uint64_t>(hi - lo + 1)); };
    auto halves = [&](double lo, double hi) { return 0.5 * static_cast<double>(pick(static_cast<long>(2 * lo), static_cast<long>(2 * hi))); };

    OracleInstance inst;
    const auto n_units = static_cast<std::size_t>(pick(1, 2));
    for (std::size_t i = 0; i < n_units; ++i) {
        DieselGenSpec g;
        g.id = "G" + std::to_string(i + 1);
        g.rated_kw = 5.0 * static_cast<double>(pick(2, 8));
        g.cost_startup = static_cast<double>(pick(0, 20));
        g.cost_shutdown = static_cast<double>(pick(0, 10));
        g.cost_om = 0.5 * static_cast<double>(pick(0, 6));
        inst.fleet.push_back(g);
    }
    inst.costs.grid_price = 0.05 + 0.35 * unit();
    inst.costs.export_price = 0.3 * unit();
    inst.costs.fuel_price = 0.5 + 1.5 * unit();
    inst.costs.w1 = 0.1 + 0.9 * unit();
    inst.costs.w2 = 0.1 + 0.9 * unit();
    inst.initial = CommitmentState::all_off(n_units);
    if (pick(0, 3) == 0) inst.initial = CommitmentState::decode(static_cast<std::uint32_t>(pick(0, (1 << n_units) - 1)), n_units);

    double smallest_min = inst.fleet.front().min_kw(), fleet_max = 0.0;
    for (const auto& g : inst.fleet) {
        smallest_min = std::min(smallest_min, g.min_kw());
        fleet_max += g.rated_kw;
    }
    const auto steps = static_cast<std::size_t>(pick(1, static_cast<long>(max_steps)));
    const auto off_begin = static_cast<std::size_t>(pick(0, static_cast<long>(steps)));
    const auto off_end = static_cast<std::size_t>(pick(static_cast<long>(off_begin), static_cast<long>(steps)));
    const double grid_max = 5.0 * static_cast<double>(pick(4, 20));
    for (std::size_t t = 0; t < steps; ++t) {
        StepInputs in;
        in.grid_status = (t >= off_begin && t < off_end) ? 0 : 1;
        in.grid_max_kw = grid_max;
        in.dt_hours = 1.0;
        in.pv_available_kw = pick(0, 2) == 0 ? 0.0 : halves(0.0, 60.0);
        in.load_kw = in.grid_status == 1 ? halves(0.0, std::min(80.0, grid_max + fleet_max)) : halves(smallest_min, fleet_max);
        inst.series.push_back(in);
    }
    return inst;
}

} // namespace pvdg
