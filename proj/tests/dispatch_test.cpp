#include "pvdg/dispatch.hpp"
#include "pvdg/oracle.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

using namespace pvdg;

namespace {

DieselGenSpec unit(const std::string& id, double rated, double c_up = 0.0, double c_d = 0.0, double c_om = 0.0)
{
    DieselGenSpec g;
    g.id = id;
    g.rated_kw = rated;
    g.cost_startup = c_up;
    g.cost_shutdown = c_d;
    g.cost_om = c_om;
    return g;
}

StepInputs step(double load, double pv, int grid, double grid_max = 400.0, double dt = 1.0)
{
    return StepInputs{load, pv, grid, grid_max, dt};
}

void expect_valid(const std::vector<DispatchDecision>& schedule, const std::vector<StepInputs>& series,
                  const CommitmentState& initial, const std::vector<DieselGenSpec>& fleet)
{
    const auto v = validate_schedule(schedule, series, initial, fleet);
    EXPECT_TRUE(v.empty()) << v.front();
}

} // namespace

TEST(ContinuousAllocation, GridAndPvCoverLoad)
{
    const std::vector<DieselGenSpec> fleet{unit("a", 200)};
    const CostParams c{0.2, 0.1, 1.0, 0.5, 0.5};
    const auto in = step(100, 50, 1);
    const auto a = continuous_allocation(CommitmentState({false}), GridMode::Import, in, fleet, c);
    ASSERT_TRUE(a);

    // Reference: grid search over PV dispatch at 0.01 kW, grid covers the rest.
    double best = std::numeric_limits<double>::infinity(), best_pv = 0.0;
    for (int k = 0; k <= 5000; ++k) {
        const double pv = 0.01 * k, g = 100.0 - pv;
        const double j = c.w1 * c.grid_price * g - c.w2 * pv;
        if (j < best) {
            best = j;
            best_pv = pv;
        }
    }
    EXPECT_NEAR(a->pv_dispatch_kw, best_pv, 1e-9);
    EXPECT_NEAR(a->pv_dispatch_kw, 50.0, 1e-12);
    EXPECT_NEAR(a->grid_import_kw, 50.0, 1e-12);
    EXPECT_NEAR(a->objective, best, 1e-9);
    EXPECT_NEAR(a->objective, 0.5 * 0.2 * 50 - 0.5 * 50, 1e-12);
}

TEST(ContinuousAllocation, MinimumLoadLimitsPvDuringBlackout)
{
    const std::vector<DieselGenSpec> fleet{unit("a", 200)};
    const CostParams c{0.2, 0.1, 1.0, 0.5, 0.5};
    const auto in = step(100, 120, 0);
    const auto a = continuous_allocation(CommitmentState({true}), GridMode::Idle, in, fleet, c);
    ASSERT_TRUE(a);

    double best = std::numeric_limits<double>::infinity(), best_dg = 0.0;
    for (int k = 0; k <= 4000; ++k) {
        const double dg = 60.0 + 0.01 * k, pv = 100.0 - dg;
        if (pv < 0.0) break;
        const double j = c.w1 * c.fuel_price * (0.246 * dg + 0.08415 * 200) - c.w2 * pv;
        if (j < best) {
            best = j;
            best_dg = dg;
        }
    }
    EXPECT_NEAR(best_dg, 60.0, 1e-9);
    EXPECT_NEAR(a->dg_kw[0], 60.0, 1e-12);
    EXPECT_NEAR(a->pv_dispatch_kw, 40.0, 1e-12);
    EXPECT_NEAR(a->curtail_kw, 80.0, 1e-12);
    EXPECT_EQ(a->export_kw, 0.0);
    EXPECT_NEAR(a->objective, best, 1e-9);
}

TEST(ContinuousAllocation, PinnedMinimumAboveLoadIsInfeasible)
{
    const std::vector<DieselGenSpec> fleet{unit("a", 200)};
    const CostParams c;
    EXPECT_FALSE(continuous_allocation(CommitmentState({true}), GridMode::Idle, step(50, 0, 0), fleet, c));
}

TEST(ContinuousAllocation, NoExchangeModesDuringBlackout)
{
    const std::vector<DieselGenSpec> fleet{unit("a", 200)};
    const CostParams c;
    EXPECT_FALSE(continuous_allocation(CommitmentState({true}), GridMode::Import, step(100, 0, 0), fleet, c));
    EXPECT_FALSE(continuous_allocation(CommitmentState({true}), GridMode::Export, step(100, 0, 0), fleet, c));
}

TEST(ContinuousAllocation, UnformedIslandCannotUsePv)
{
    const std::vector<DieselGenSpec> fleet{unit("a", 200)};
    const CostParams c;
    EXPECT_FALSE(continuous_allocation(CommitmentState({false}), GridMode::Idle, step(10, 100, 0), fleet, c));
    const auto a = continuous_allocation(CommitmentState({false}), GridMode::Idle, step(0, 100, 0), fleet, c);
    ASSERT_TRUE(a);
    EXPECT_EQ(a->pv_dispatch_kw, 0.0);
    EXPECT_EQ(a->curtail_kw, 100.0);
}

TEST(ContinuousAllocation, SurplusPvIsExportedUpToGridLimit)
{
    const std::vector<DieselGenSpec> fleet{unit("a", 200)};
    const CostParams c{0.2, 0.1, 1.0, 0.5, 0.5};
    const auto a = continuous_allocation(CommitmentState({false}), GridMode::Export, step(100, 600, 1, 400), fleet, c);
    ASSERT_TRUE(a);
    EXPECT_NEAR(a->pv_dispatch_kw, 100.0, 1e-12);
    EXPECT_NEAR(a->export_kw, 400.0, 1e-12);
    EXPECT_NEAR(a->curtail_kw, 100.0, 1e-12);
}

TEST(StageCost, Examples)
{
    const std::vector<DieselGenSpec> fleet{unit("a", 150, 0.0, 0.0, 2.0)};
    DispatchDecision d;
    d.state = CommitmentState({false});
    d.indicators = transition_indicators(d.state, d.state);
    d.dg_kw = {0.0};
    d.fuel_lph = {0.0};
    EXPECT_EQ(stage_cost(d, fleet, CostParams{0.2, 0.1, 1.0, 0.5, 0.5}, 1.0), 0.0);

    d.state = CommitmentState({true});
    d.indicators = transition_indicators(d.state, d.state);
    d.dg_kw = {45.0};
    d.fuel_lph = {fuel_rate(45.0, fleet[0], true)};
    d.pv_dispatch_kw = 40.0;
    EXPECT_NEAR(stage_cost(d, fleet, CostParams{0.2, 0.1, 1.0, 1.0, 1.0}, 1.0), 23.6925 + 2.0 - 40.0, 1e-12);

    // w2 = 0 leaves pure money.
    d.grid_import_kw = 10.0;
    const auto money = cost_breakdown(d, fleet, CostParams{0.2, 0.1, 1.0, 1.0, 0.0}, 1.0);
    EXPECT_NEAR(stage_cost(d, fleet, CostParams{0.2, 0.1, 1.0, 1.0, 0.0}, 1.0),
                money.grid + money.fuel + money.transitions + money.om, 1e-12);
}

TEST(Greedy, CheapGridKeepsGeneratorsOff)
{
    const std::vector<DieselGenSpec> fleet{unit("a", 200, 10, 5, 3), unit("b", 150, 10, 5, 3)};
    const CostParams c{0.05, 0.1, 1.4, 0.5, 0.5};
    const auto d = optimize_step_greedy(CommitmentState::all_off(2), step(120, 30, 1), fleet, c);
    EXPECT_EQ(d.state.count_on(), 0u);
    EXPECT_NEAR(d.grid_import_kw, 90.0, 1e-12);
    EXPECT_NEAR(d.pv_dispatch_kw, 30.0, 1e-12);

    // Reference: exhaustive enumeration with the grid-search continuous solver.
    const std::vector<StepInputs> one{step(120, 30, 1)};
    const auto ref = brute_force_oracle(CommitmentState::all_off(2), one, fleet, c, 0.5);
    EXPECT_EQ(ref.schedule[0].state, d.state);
    EXPECT_NEAR(ref.objective, d.stage_cost, 1e-9);
}

TEST(Greedy, BlackoutAlwaysHasAGridFormingUnit)
{
    const std::vector<DieselGenSpec> fleet{unit("a", 200), unit("b", 150), unit("c", 150)};
    const CostParams c;
    for (double load : {45.0, 80.0, 250.0, 499.0}) {
        const auto d = optimize_step_greedy(CommitmentState::all_off(3), step(load, 300, 0), fleet, c);
        EXPECT_GE(d.state.count_on(), 1u);
        EXPECT_TRUE(validate_decision(d, step(load, 300, 0), CommitmentState::all_off(3), fleet).empty());
    }
}

TEST(Greedy, ZeroLoadZeroPv)
{
    const std::vector<DieselGenSpec> fleet{unit("a", 200, 10, 5, 3)};
    const auto d = optimize_step_greedy(CommitmentState::all_off(1), step(0, 0, 1), fleet, CostParams{});
    EXPECT_EQ(d.state.count_on(), 0u);
    EXPECT_EQ(d.stage_cost, 0.0);
}

TEST(Greedy, InfeasibleStepReportsIndex)
{
    const std::vector<DieselGenSpec> fleet{unit("a", 100)};
    const std::vector<StepInputs> series{step(50, 0, 0), step(150, 0, 0)};
    try {
        optimize_horizon_greedy(CommitmentState::all_off(1), series, fleet, CostParams{});
        FAIL() << "expected InfeasibleError";
    } catch (const InfeasibleError& e) {
        EXPECT_EQ(e.step(), 1u);
        EXPECT_EQ(e.inputs().load_kw, 150.0);
    }
}

TEST(Dp, SingleUnitPermanentBlackoutTracksLoad)
{
    const std::vector<DieselGenSpec> fleet{unit("a", 100, 10, 5, 1)};
    std::vector<StepInputs> series;
    for (double load : {30.0, 55.5, 100.0, 72.0, 30.0}) series.push_back(step(load, 0, 0));
    const auto s = optimize_horizon_dp(CommitmentState::all_off(1), series, fleet, CostParams{});
    ASSERT_EQ(s.size(), series.size());
    for (std::size_t t = 0; t < s.size(); ++t) {
        EXPECT_TRUE(s[t].state[0]);
        EXPECT_NEAR(s[t].dg_kw[0], series[t].load_kw, 1e-12);
    }
    expect_valid(s, series, CommitmentState::all_off(1), fleet);
}

TEST(Dp, InfeasibleHorizonNamesFirstStep)
{
    const std::vector<DieselGenSpec> fleet{unit("a", 100)};
    const std::vector<StepInputs> series{step(50, 0, 0), step(20, 0, 0), step(500, 0, 0)};
    try {
        optimize_horizon_dp(CommitmentState::all_off(1), series, fleet, CostParams{});
        FAIL() << "expected InfeasibleError";
    } catch (const InfeasibleError& e) {
        EXPECT_EQ(e.step(), 1u);
    }
}

TEST(Dp, StrictlyBeatsGreedyWhenStartupCostMakesGreedyMyopic)
{
    // Blackout, grid, blackout: greedy stops the unit while the grid is up and pays a restart.
    for (double c_up : {20.0, 50.0, 200.0}) {
        const std::vector<DieselGenSpec> fleet{unit("a", 100, c_up)};
        const CostParams c{0.2, 0.0, 1.0, 1.0, 0.0};
        const std::vector<StepInputs> series{step(50, 0, 0), step(50, 0, 1), step(50, 0, 0)};
        const auto init = CommitmentState::all_off(1);
        const auto g = optimize_horizon_greedy(init, series, fleet, c);
        const auto d = optimize_horizon_dp(init, series, fleet, c);
        EXPECT_FALSE(g[1].state[0]);
        EXPECT_TRUE(d[1].state[0]);
        EXPECT_LT(total_objective(d), total_objective(g) - 1.0);
        expect_valid(d, series, init, fleet);
        expect_valid(g, series, init, fleet);
    }
}

namespace {

std::vector<StepInputs> random_series(std::mt19937_64& rng, std::size_t n, double fleet_min, double fleet_max)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<StepInputs> s;
    for (std::size_t t = 0; t < n; ++t) {
        const int grid = u(rng) < 0.6 ? 1 : 0;
        const double load = grid ? 400.0 * u(rng) : fleet_min + (fleet_max - fleet_min) * u(rng);
        s.push_back(step(load, u(rng) < 0.4 ? 0.0 : 500.0 * u(rng), grid, 350.0));
    }
    return s;
}

} // namespace

TEST(Dp, NeverWorseThanGreedyAndValid)
{
    std::mt19937_64 rng(99);
    const std::vector<DieselGenSpec> fleet{unit("a", 200, 15, 5, 3), unit("b", 150, 12, 4, 2), unit("c", 150, 12, 4, 2)};
    for (int trial = 0; trial < 40; ++trial) {
        const auto series = random_series(rng, 48, 45.0, 500.0);
        const CostParams c{0.05 + 0.3 * (rng() % 100) / 100.0, 0.1, 1.4, 0.5, 0.5};
        const auto init = CommitmentState::all_off(3);
        const auto g = optimize_horizon_greedy(init, series, fleet, c);
        const auto d = optimize_horizon_dp(init, series, fleet, c);
        EXPECT_LE(total_objective(d), total_objective(g) + 1e-9);
        expect_valid(d, series, init, fleet);
        expect_valid(g, series, init, fleet);
        for (std::size_t t = 0; t < series.size(); ++t)
            if (series[t].grid_status == 0 && series[t].load_kw > 0) {
                EXPECT_GE(d[t].state.count_on(), 1u);
            }
    }
}

TEST(Dp, EqualsGreedyWithoutTransitionCosts)
{
    std::mt19937_64 rng(5);
    const std::vector<DieselGenSpec> fleet{unit("a", 200, 0, 0, 3), unit("b", 150, 0, 0, 2)};
    for (int trial = 0; trial < 30; ++trial) {
        const auto series = random_series(rng, 36, 45.0, 350.0);
        const CostParams c{0.25, 0.1, 1.4, 0.5, 0.5};
        const auto init = CommitmentState::all_off(2);
        EXPECT_NEAR(total_objective(optimize_horizon_dp(init, series, fleet, c)),
                    total_objective(optimize_horizon_greedy(init, series, fleet, c)), 1e-9);
    }
}

TEST(Dp, CommonWeightScalingKeepsScheduleAndScalesObjective)
{
    std::mt19937_64 rng(8);
    const std::vector<DieselGenSpec> fleet{unit("a", 200, 15, 5, 3), unit("b", 150, 12, 4, 2)};
    for (int trial = 0; trial < 20; ++trial) {
        const auto series = random_series(rng, 24, 45.0, 350.0);
        const CostParams c{0.2, 0.1, 1.4, 0.3, 0.7};
        CostParams c2 = c;
        c2.w1 *= 2.0;
        c2.w2 *= 2.0;
        const auto init = CommitmentState::all_off(2);
        const auto a = optimize_horizon_dp(init, series, fleet, c);
        const auto b = optimize_horizon_dp(init, series, fleet, c2);
        for (std::size_t t = 0; t < a.size(); ++t) {
            EXPECT_EQ(a[t].state, b[t].state);
            EXPECT_EQ(a[t].mode, b[t].mode);
            EXPECT_EQ(a[t].dg_kw, b[t].dg_kw);
            EXPECT_EQ(b[t].stage_cost, 2.0 * a[t].stage_cost);
        }
    }
}

TEST(Dp, MorePvNeverRaisesTheOptimum)
{
    std::mt19937_64 rng(21);
    const std::vector<DieselGenSpec> fleet{unit("a", 200, 15, 5, 3), unit("b", 150, 12, 4, 2)};
    std::uniform_real_distribution<double> extra(0.0, 200.0);
    for (int trial = 0; trial < 30; ++trial) {
        auto series = random_series(rng, 24, 45.0, 350.0);
        const CostParams c{0.2, 0.1, 1.4, 0.5, 0.5};
        const auto init = CommitmentState::all_off(2);
        const double base = total_objective(optimize_horizon_dp(init, series, fleet, c));
        for (auto& s : series) s.pv_available_kw += extra(rng);
        EXPECT_LE(total_objective(optimize_horizon_dp(init, series, fleet, c)), base + 1e-9);
    }
}

TEST(Dp, RejectsEmptySeries)
{
    const std::vector<DieselGenSpec> fleet{unit("a", 100)};
    EXPECT_THROW(optimize_horizon_dp(CommitmentState::all_off(1), {}, fleet, CostParams{}), DomainError);
}

TEST(Validator, FlagsBrokenDecisions)
{
    const std::vector<DieselGenSpec> fleet{unit("a", 200)};
    const auto in = step(100, 50, 0);
    const auto init = CommitmentState::all_off(1);
    auto d = optimize_step_greedy(init, in, fleet, CostParams{});
    EXPECT_TRUE(validate_decision(d, in, init, fleet).empty());

    auto bad = d;
    bad.dg_kw[0] += 1.0;
    EXPECT_FALSE(validate_decision(bad, in, init, fleet).empty());
    bad = d;
    bad.grid_import_kw = 1.0;
    bad.pv_dispatch_kw -= 1.0;
    bad.curtail_kw += 1.0;
    EXPECT_FALSE(validate_decision(bad, in, init, fleet).empty()); // import during blackout
    bad = d;
    bad.import_flag = bad.export_flag = 1;
    EXPECT_FALSE(validate_decision(bad, in, init, fleet).empty());
    bad = d;
    bad.indicators.startup[0] = 0;
    EXPECT_FALSE(validate_decision(bad, in, init, fleet).empty());
}
