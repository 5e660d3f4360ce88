#include "pvdg/config.hpp"
#include "pvdg/scenario.hpp"
#include "pvdg/synthetic.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace pvdg;

namespace {

SyntheticYear short_year(std::size_t hours = 96)
{
    SyntheticOptions opt;
    opt.hours = hours;
    return synthetic_year(opt);
}

DispatchDecision blank_decision(std::size_t n)
{
    DispatchDecision d;
    d.state = CommitmentState::all_off(n);
    d.indicators = transition_indicators(d.state, d.state);
    d.dg_kw.assign(n, 0.0);
    d.fuel_lph.assign(n, 0.0);
    return d;
}

double load_energy_mwh(const ScenarioResult& r)
{
    double e = 0.0;
    for (const auto& s : r.steps) e += s.inputs.load_kw * s.inputs.dt_hours;
    return e / 1000.0;
}

double pv_energy_mwh(const ScenarioResult& r)
{
    double e = 0.0;
    for (const auto& s : r.steps) e += s.inputs.pv_available_kw * s.inputs.dt_hours;
    return e / 1000.0;
}

} // namespace

TEST(BuildCase, FleetsAndPv)
{
    const auto base = default_base_config();
    const auto c1 = build_case(1, base), c2 = build_case(2, base), c3 = build_case(3, base);
    ASSERT_EQ(c1.fleet.size(), 1u);
    EXPECT_EQ(c1.fleet[0].rated_kw, 500.0);
    EXPECT_FALSE(c1.pv);
    ASSERT_TRUE(c2.pv);
    EXPECT_NEAR(array_stc_power_kw(c2.pv->array, c2.pv->cell), 700.0, 7.0);
    ASSERT_EQ(c3.fleet.size(), 3u);
    EXPECT_EQ(c3.fleet[0].rated_kw, 200.0);
    EXPECT_EQ(c3.fleet[1].rated_kw, 150.0);
    EXPECT_EQ(c3.fleet[2].rated_kw, 150.0);
    EXPECT_EQ(c3.fleet[2].id, "DG3");
    EXPECT_THROW(build_case(4, base), DomainError);
}

TEST(RunScenario, CaseTwoWithoutPvEqualsCaseOne)
{
    const auto y = short_year();
    const auto base = default_base_config();
    auto c2 = build_case(2, base);
    c2.pv.reset();
    const auto a = run_scenario(build_case(1, base), y.weather, y.load);
    const auto b = run_scenario(c2, y.weather, y.load);
    ASSERT_EQ(a.schedule.size(), b.schedule.size());
    for (std::size_t t = 0; t < a.schedule.size(); ++t) {
        EXPECT_EQ(a.schedule[t].state, b.schedule[t].state);
        EXPECT_EQ(a.schedule[t].dg_kw, b.schedule[t].dg_kw);
        EXPECT_EQ(a.schedule[t].grid_import_kw, b.schedule[t].grid_import_kw);
    }
}

TEST(RunScenario, ZeroLoadZeroPvYearStaysOff)
{
    auto y = short_year(48);
    for (auto& w : y.weather) w.global = w.beam = w.diffuse = 0.0;
    for (auto& l : y.load) l.load_kw = 0.0;
    const auto r = run_scenario(build_case(3, default_base_config()), y.weather, y.load);
    for (const auto& d : r.schedule) EXPECT_EQ(d.state.count_on(), 0u);
    const auto s = summarize(r);
    EXPECT_EQ(s.cost.total, 0.0);
    EXPECT_EQ(s.energy.grid + s.energy.diesel + s.energy.pv, 0.0);
}

TEST(RunScenario, PermanentGridNeverStartsGenerator)
{
    const auto y = short_year();
    auto cfg = build_case(1, default_base_config());
    cfg.grid.on_hours = cfg.grid.period_hours;
    const auto r = run_scenario(cfg, y.weather, y.load);
    for (const auto& d : r.schedule) {
        EXPECT_EQ(d.state.count_on(), 0u);
        EXPECT_EQ(d.indicators.startup[0], 0);
    }
    EXPECT_NEAR(summarize(r).energy.grid, load_energy_mwh(r), 1e-9);
}

TEST(RunScenario, EnergyClosureAndCostConsistency)
{
    const auto y = short_year(240);
    const auto base = default_base_config();
    for (int id : {1, 2, 3}) {
        for (auto mode : {SolverMode::Greedy, SolverMode::Dp}) {
            auto cfg = build_case(id, base);
            cfg.mode = mode;
            const auto r = run_scenario(cfg, y.weather, y.load);
            const auto s = summarize(r);
            EXPECT_NEAR(s.energy.grid + s.energy.diesel + s.energy.pv, load_energy_mwh(r), 1e-6);
            EXPECT_NEAR(s.energy.pv + s.energy.exported + s.energy.curtailed, pv_energy_mwh(r), 1e-6);
            EXPECT_NEAR(s.cost.grid, cfg.costs.grid_price * s.energy.grid, 1e-9);
            EXPECT_NEAR(s.cost.export_credit, cfg.costs.export_price * s.energy.exported, 1e-9);
            EXPECT_NEAR(s.cost.total, s.cost.grid + s.cost.fuel + s.cost.transitions + s.cost.om, 1e-9);
            EXPECT_TRUE(validate_schedule(r.schedule, r.inputs(), r.initial, r.fleet).empty());
        }
    }
}

TEST(RunScenario, DeterministicAcrossRuns)
{
    const auto y = short_year();
    const auto cfg = build_case(3, default_base_config());
    const auto a = run_scenario(cfg, y.weather, y.load), b = run_scenario(cfg, y.weather, y.load);
    ASSERT_EQ(a.schedule.size(), b.schedule.size());
    for (std::size_t t = 0; t < a.schedule.size(); ++t) {
        EXPECT_EQ(a.schedule[t].stage_cost, b.schedule[t].stage_cost);
        EXPECT_EQ(a.schedule[t].state, b.schedule[t].state);
    }
}

TEST(RunScenario, ConcurrentCasesMatchSequentialRuns)
{
    const auto y = short_year();
    const auto base = default_base_config();
    const std::vector<ScenarioConfig> cfgs{build_case(1, base), build_case(2, base), build_case(3, base)};
    const auto par = run_cases(cfgs, y.weather, y.load);
    for (std::size_t k = 0; k < cfgs.size(); ++k) {
        const auto seq = run_scenario(cfgs[k], y.weather, y.load);
        EXPECT_EQ(total_objective(par[k].schedule), total_objective(seq.schedule));
        EXPECT_EQ(par[k].name, cfgs[k].name);
    }
}

TEST(RunScenario, MisalignedSeriesAreRejected)
{
    auto y = short_year(24);
    const auto cfg = build_case(3, default_base_config());
    auto shifted = y.load;
    shifted[5].timestamp += std::chrono::hours{1};
    EXPECT_THROW(run_scenario(cfg, y.weather, shifted), DataError);
    auto shorter = y.load;
    shorter.pop_back();
    EXPECT_THROW(run_scenario(cfg, y.weather, shorter), DataError);
}

TEST(RunScenario, InfeasibleStepNamesCaseAndTimestamp)
{
    auto y = short_year(24);
    y.load[10].load_kw = 5000.0;
    try {
        run_scenario(build_case(3, default_base_config()), y.weather, y.load);
        FAIL() << "expected InfeasibleError";
    } catch (const InfeasibleError& e) {
        EXPECT_EQ(e.step(), 10u);
        EXPECT_NE(std::string(e.what()).find("2019-01-01T10:00:00Z"), std::string::npos) << e.what();
        EXPECT_NE(std::string(e.what()).find("Case 3"), std::string::npos) << e.what();
    }
}

TEST(RunScenario, ExplicitGridStatusColumnOverridesSchedule)
{
    auto y = short_year(24);
    for (auto& w : y.weather) w.grid_status = 1;
    const auto r = run_scenario(build_case(1, default_base_config()), y.weather, y.load);
    for (const auto& s : r.steps) EXPECT_EQ(s.inputs.grid_status, 1);
}

TEST(Aggregate, ConstantImportForAYear)
{
    std::vector<DispatchDecision> schedule(8760, blank_decision(1));
    for (auto& d : schedule) d.grid_import_kw = 100.0;
    EXPECT_NEAR(aggregate_energy(schedule, 1.0).grid, 876.0, 1e-9);
}

TEST(Aggregate, EnergyColumnsRoundTrip)
{
    std::vector<DispatchDecision> schedule(8760, blank_decision(1));
    for (auto& d : schedule) {
        d.grid_import_kw = 667.32e3 / 8760.0;
        d.dg_kw[0] = 919.98e3 / 8760.0;
        d.pv_dispatch_kw = 766.18e3 / 8760.0;
    }
    const auto e = aggregate_energy(schedule, 1.0);
    EXPECT_NEAR(e.grid, 667.32, 1e-9);
    EXPECT_NEAR(e.diesel, 919.98, 1e-9);
    EXPECT_NEAR(e.pv, 766.18, 1e-9);
}

TEST(Aggregate, EmptyScheduleIsZero)
{
    const std::vector<DispatchDecision> none;
    const auto e = aggregate_energy(none, 1.0);
    EXPECT_EQ(e.grid + e.diesel + e.pv + e.exported + e.curtailed, 0.0);
    const std::vector<DieselGenSpec> fleet{default_generator_template()};
    EXPECT_EQ(aggregate_cost(none, fleet, CostParams{}, 1.0).total, 0.0);
}

TEST(Aggregate, GridPlusDieselTotal)
{
    DieselGenSpec g = default_generator_template();
    g.rated_kw = 500.0;
    g.cost_om = 0.0;
    const std::vector<DieselGenSpec> fleet{g};
    const CostParams costs{0.15, 0.1, 1.4, 0.5, 0.5};
    auto d = blank_decision(1);
    d.grid_import_kw = 100.1e3 / 0.15;
    d.state = CommitmentState({true});
    d.fuel_lph[0] = 382.98e3 / 1.4;
    const std::vector<DispatchDecision> schedule{d};
    const auto c = aggregate_cost(schedule, fleet, costs, 1.0);
    EXPECT_NEAR(c.grid, 100.1, 1e-9);
    EXPECT_NEAR(c.diesel, 382.98, 1e-9);
    EXPECT_NEAR(c.total, 483.08, 1e-9);
}

TEST(Aggregate, DoublingFuelPriceDoublesFuelOnly)
{
    const auto y = short_year();
    const auto r = run_scenario(build_case(3, default_base_config()), y.weather, y.load);
    auto costs = r.costs;
    const auto a = aggregate_cost(r.schedule, r.fleet, costs, r.dt_hours);
    costs.fuel_price *= 2.0;
    const auto b = aggregate_cost(r.schedule, r.fleet, costs, r.dt_hours);
    EXPECT_GT(a.fuel, 0.0);
    EXPECT_NEAR(b.fuel, 2.0 * a.fuel, 1e-9);
    EXPECT_EQ(b.grid, a.grid);
    EXPECT_EQ(b.transitions, a.transitions);
    EXPECT_EQ(b.om, a.om);
}

TEST(CompareCases, ReportedTotals)
{
    std::vector<CostSummary> s(3);
    s[0].total = 862.25;
    s[1].total = 686.55;
    s[2].total = 483.08;
    const auto r = compare_cases(s);
    ASSERT_EQ(r.reductions.size(), 3u);
    EXPECT_EQ(r.find(2, 1)->text, "29.64%");
    EXPECT_EQ(r.find(2, 0)->text, "43.97%");
    EXPECT_EQ(r.find(1, 0)->text, "20.38%");
    EXPECT_EQ(r.reductions[0].baseline_index, 1u);
    EXPECT_EQ(r.find(0, 1), nullptr);
}

TEST(CompareCases, SimpleRatios)
{
    std::vector<CostSummary> s(2);
    s[0].total = s[1].total = 10.0;
    EXPECT_EQ(compare_cases(s).find(1, 0)->text, "0.00%");
    s[0].total = 200.0;
    s[1].total = 100.0;
    EXPECT_EQ(compare_cases(s).find(1, 0)->text, "50.00%");
    s[1].total = 300.0;
    EXPECT_EQ(compare_cases(s).find(1, 0)->text, "-50.00%");
}

TEST(CompareCases, Errors)
{
    std::vector<CostSummary> s(1);
    EXPECT_THROW(compare_cases(s), DomainError);
    s.resize(2);
    s[1].total = 5.0;
    EXPECT_THROW(compare_cases(s), DomainError);
}

TEST(CompareCases, HalfUpRounding)
{
    EXPECT_EQ(round_half_up(0.125, 2), 0.13);
    EXPECT_EQ(round_half_up(29.63658874080547, 2), 29.64);
    EXPECT_EQ(round_half_up(43.97448535807481, 2), 43.97);
    EXPECT_EQ(format_percent(round_half_up(2.0, 2)), "2.00%");
}

TEST(Synthetic, DeterministicAndPhysical)
{
    const auto a = short_year(24 * 14), b = short_year(24 * 14);
    ASSERT_EQ(a.weather.size(), 24u * 14u);
    for (std::size_t k = 0; k < a.weather.size(); ++k) {
        EXPECT_EQ(a.weather[k].global, b.weather[k].global);
        EXPECT_EQ(a.load[k].load_kw, b.load[k].load_kw);
        EXPECT_GE(a.weather[k].beam, 0.0);
        EXPECT_GE(a.weather[k].diffuse, 0.0);
        EXPECT_LE(a.weather[k].beam + a.weather[k].diffuse, a.weather[k].global * (1.0 + kSplitSlack) + 1e-9);
        EXPECT_GE(a.load[k].load_kw, 160.0);
    }
    SyntheticOptions other;
    other.hours = 48;
    other.seed = 7;
    const auto c = synthetic_year(other);
    bool differs = false;
    for (std::size_t k = 0; k < c.load.size(); ++k) differs = differs || c.load[k].load_kw != a.load[k].load_kw;
    EXPECT_TRUE(differs);
}
