#include "pvdg/diesel_model.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace pvdg;

namespace {

DieselGenSpec unit(double rated, double c_up = 0.0, double c_d = 0.0, double c_om = 0.0)
{
    DieselGenSpec g;
    g.id = "g";
    g.rated_kw = rated;
    g.cost_startup = c_up;
    g.cost_shutdown = c_d;
    g.cost_om = c_om;
    return g;
}

} // namespace

TEST(FuelRate, OffIsZero)
{
    EXPECT_EQ(fuel_rate(0.0, unit(200), false), 0.0);
}

TEST(FuelRate, PaperConstants)
{
    EXPECT_NEAR(fuel_rate(100.0, unit(200), true), 41.43, 1e-12);
    EXPECT_NEAR(fuel_rate(45.0, unit(150), true), 23.6925, 1e-12);
}

TEST(FuelRate, RejectsInfeasibleDispatch)
{
    EXPECT_THROW(fuel_rate(59.0, unit(200), true), DomainError);
    EXPECT_THROW(fuel_rate(201.0, unit(200), true), DomainError);
    EXPECT_THROW(fuel_rate(5.0, unit(200), false), DomainError);
}

TEST(FuelRate, AffineOnTheOnBranch)
{
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> rated(10, 1000), frac(0.3, 1.0);
    for (int i = 0; i < 500; ++i) {
        const auto g = unit(rated(rng));
        const double a = frac(rng) * g.rated_kw, b = frac(rng) * g.rated_kw;
        EXPECT_NEAR(fuel_rate(a, g, true) - fuel_rate(b, g, true), g.fuel_a * (a - b), 1e-9);
    }
}

TEST(FeasibleRange, OnAndOff)
{
    const auto off = feasible_range(unit(200), false);
    EXPECT_EQ(off.lo, 0.0);
    EXPECT_EQ(off.hi, 0.0);
    const auto r200 = feasible_range(unit(200), true);
    EXPECT_DOUBLE_EQ(r200.lo, 60.0);
    EXPECT_EQ(r200.hi, 200.0);
    const auto r150 = feasible_range(unit(150), true);
    EXPECT_DOUBLE_EQ(r150.lo, 45.0);
    EXPECT_EQ(r150.hi, 150.0);
}

TEST(TransitionIndicators, StartStopHold)
{
    const auto on = CommitmentState({true});
    const auto off = CommitmentState({false});
    auto t = transition_indicators(on, off);
    EXPECT_EQ(t.startup[0], 1);
    EXPECT_EQ(t.shutdown[0], 0);
    t = transition_indicators(off, on);
    EXPECT_EQ(t.startup[0], 0);
    EXPECT_EQ(t.shutdown[0], 1);
    for (const auto& s : {on, off}) {
        t = transition_indicators(s, s);
        EXPECT_EQ(t.startup[0], 0);
        EXPECT_EQ(t.shutdown[0], 0);
    }
    EXPECT_THROW(transition_indicators(CommitmentState({true, false}), off), DomainError);
}

TEST(TransitionIndicators, TelegraphIdentityAndBalancedStartsOverClosedHorizons)
{
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + rng() % 4;
        const std::size_t horizon = 2 + rng() % 30;
        std::vector<CommitmentState> seq{CommitmentState::all_off(n)};
        for (std::size_t t = 1; t + 1 < horizon; ++t)
            seq.push_back(CommitmentState::decode(static_cast<std::uint32_t>(rng() % (1u << n)), n));
        seq.push_back(CommitmentState::all_off(n));
        std::vector<int> starts(n, 0), stops(n, 0);
        for (std::size_t t = 1; t < seq.size(); ++t) {
            const auto ind = transition_indicators(seq[t], seq[t - 1]);
            for (std::size_t i = 0; i < n; ++i) {
                EXPECT_EQ(ind.startup[i] - ind.shutdown[i], int(seq[t][i]) - int(seq[t - 1][i]));
                EXPECT_EQ(ind.startup[i] * ind.shutdown[i], 0);
                starts[i] += ind.startup[i];
                stops[i] += ind.shutdown[i];
            }
        }
        EXPECT_EQ(starts, stops);
    }
}

TEST(CommitmentState, EncodeDecodeRoundTrip)
{
    for (std::size_t n = 0; n <= 5; ++n)
        for (std::uint32_t code = 0; code < (1u << n); ++code) EXPECT_EQ(CommitmentState::decode(code, n).encode(), code);
    EXPECT_THROW(CommitmentState::decode(4, 2), DomainError);
}

TEST(GridForming, BlackoutNeedsOneUnit)
{
    EXPECT_TRUE(grid_forming_ok(CommitmentState({false, false, false}), true));
    EXPECT_FALSE(grid_forming_ok(CommitmentState({false, false, false}), false));
    EXPECT_TRUE(grid_forming_ok(CommitmentState({false, true, false}), false));
}

TEST(GridForming, MonotoneInCommitments)
{
    for (std::uint32_t code = 0; code < 8; ++code) {
        const auto s = CommitmentState::decode(code, 3);
        for (std::size_t i = 0; i < 3; ++i) {
            const auto more = CommitmentState::decode(code | (1u << i), 3);
            for (bool grid : {false, true})
                if (grid_forming_ok(s, grid)) {
                    EXPECT_TRUE(grid_forming_ok(more, grid));
                }
        }
    }
}

TEST(CommitmentCost, Examples)
{
    const std::vector<DieselGenSpec> specs{unit(200, 5.0, 0.0, 2.0)};
    const auto off = CommitmentState({false});
    const auto on = CommitmentState({true});
    const std::vector<double> none{0.0}, fuel{41.43};
    EXPECT_EQ(commitment_cost(off, transition_indicators(off, off), none, specs, 1.0, 1.0), 0.0);
    EXPECT_NEAR(commitment_cost(on, transition_indicators(on, off), fuel, specs, 1.0, 1.0), 48.43, 1e-12);
    EXPECT_NEAR(commitment_cost(on, transition_indicators(on, off), fuel, specs, 1.0, 0.5), 26.715, 1e-12);
    const std::vector<double> wrong{1.0, 2.0};
    EXPECT_THROW(commitment_cost(on, transition_indicators(on, off), wrong, specs, 1.0, 1.0), DomainError);
}

TEST(DieselGenSpec, Validation)
{
    EXPECT_THROW(unit(0.0).validate(), DomainError);
    auto g = unit(100);
    g.min_load_frac = 0.0;
    EXPECT_THROW(g.validate(), DomainError);
    g.min_load_frac = 1.0;
    EXPECT_NO_THROW(g.validate());
    EXPECT_DOUBLE_EQ(rated_kw_from_kva(500, 0.8), 400.0);
}
