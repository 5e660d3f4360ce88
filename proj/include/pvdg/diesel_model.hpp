#pragma once

// Diesel generator fuel curve, commitment transitions, minimum loading and
// the grid-forming requirement during blackouts.

#include "pvdg/errors.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace pvdg {

inline constexpr double kFuelSlopeDefault = 0.246;     // l/kWh
inline constexpr double kFuelNoLoadDefault = 0.08415;  // l/h per kW rated
inline constexpr double kMinLoadFracDefault = 0.3;

struct DieselGenSpec {
    std::string id;
    double rated_kw = 0.0;
    double fuel_a = kFuelSlopeDefault;
    double fuel_b = kFuelNoLoadDefault;
    double cost_startup = 0.0;  // $ per start
    double cost_shutdown = 0.0; // $ per stop
    double cost_om = 0.0;       // $/h while ON
    double min_load_frac = kMinLoadFracDefault;

    void validate() const
    {
        if (!(rated_kw > 0.0)) throw DomainError("generator '" + id + "': rated power must be positive");
        if (!(fuel_a >= 0.0) || !(fuel_b >= 0.0))
            throw DomainError("generator '" + id + "': fuel curve constants must be non-negative");
        if (!(min_load_frac > 0.0 && min_load_frac <= 1.0))
            throw DomainError("generator '" + id + "': min_load_frac must lie in (0, 1]");
        if (cost_startup < 0.0 || cost_shutdown < 0.0 || cost_om < 0.0)
            throw DomainError("generator '" + id + "': costs must be non-negative");
    }
    [[nodiscard]] double min_kw() const { return min_load_frac * rated_kw; }
};

/// Nameplate kVA to kW.
inline double rated_kw_from_kva(double kva, double power_factor = 1.0) { return kva * power_factor; }

inline constexpr std::size_t kMaxFleetSize = 16;

/// ON/OFF status of each generator. Bit i of the encoding is generator i.
class CommitmentState {
public:
    CommitmentState() = default;
    explicit CommitmentState(std::vector<bool> statuses) : statuses_(std::move(statuses))
    {
        if (statuses_.size() > kMaxFleetSize) throw DomainError("fleet too large for commitment encoding");
    }

    static CommitmentState all_off(std::size_t n) { return CommitmentState(std::vector<bool>(n, false)); }

    static CommitmentState decode(std::uint32_t code, std::size_t n)
    {
        if (n > kMaxFleetSize || (n < 32 && code >= (1u << n))) throw DomainError("commitment code out of range");
        std::vector<bool> s(n);
        for (std::size_t i = 0; i < n; ++i) s[i] = ((code >> i) & 1u) != 0;
        return CommitmentState(std::move(s));
    }

    [[nodiscard]] std::uint32_t encode() const
    {
        std::uint32_t code = 0;
        for (std::size_t i = 0; i < statuses_.size(); ++i)
            if (statuses_[i]) code |= (1u << i);
        return code;
    }

    [[nodiscard]] std::size_t size() const { return statuses_.size(); }
    [[nodiscard]] bool operator[](std::size_t i) const { return statuses_.at(i); }
    [[nodiscard]] const std::vector<bool>& statuses() const { return statuses_; }
    [[nodiscard]] std::size_t count_on() const
    {
        std::size_t n = 0;
        for (bool s : statuses_) n += s ? 1 : 0;
        return n;
    }

    friend bool operator==(const CommitmentState&, const CommitmentState&) = default;

private:
    std::vector<bool> statuses_;
};

struct TransitionIndicators {
    std::vector<int> startup;
    std::vector<int> shutdown;
};

struct PowerInterval {
    double lo = 0.0;
    double hi = 0.0;
};

inline PowerInterval feasible_range(const DieselGenSpec& spec, bool on)
{
    if (!on) return {0.0, 0.0};
    return {spec.min_kw(), spec.rated_kw};
}

/// Absolute slack when checking a dispatch against its feasible range.
inline constexpr double kRangeTolerance = 1e-9;

/// Fuel consumption rate in l/h.
inline double fuel_rate(double p_disp, const DieselGenSpec& spec, bool on)
{
    const auto range = feasible_range(spec, on);
    if (p_disp < range.lo - kRangeTolerance || p_disp > range.hi + kRangeTolerance)
        throw DomainError("generator '" + spec.id + "': dispatch outside feasible range");
    if (!on) return 0.0;
    return spec.fuel_a * p_disp + spec.fuel_b * spec.rated_kw;
}

inline TransitionIndicators transition_indicators(const CommitmentState& current, const CommitmentState& previous)
{
    if (current.size() != previous.size()) throw DomainError("commitment states differ in length");
    TransitionIndicators out;
    out.startup.resize(current.size());
    out.shutdown.resize(current.size());
    for (std::size_t i = 0; i < current.size(); ++i) {
        const int s = current[i] ? 1 : 0;
        const int p = previous[i] ? 1 : 0;
        out.startup[i] = s * (1 - p);
        out.shutdown[i] = p * (1 - s);
    }
    return out;
}

/// At least one unit must form the grid while the public grid is down.
inline bool grid_forming_ok(const CommitmentState& state, bool grid_on)
{
    return grid_on || state.count_on() >= 1;
}

/// Monetary diesel cost of one step in $. Fuel and O&M scale with the step length; start/stop do not.
inline double commitment_cost(const CommitmentState& state, const TransitionIndicators& indicators,
                              std::span<const double> fuel_per_dg, std::span<const DieselGenSpec> specs,
                              double fuel_price, double dt_hours)
{
    const std::size_t n = state.size();
    if (indicators.startup.size() != n || indicators.shutdown.size() != n || fuel_per_dg.size() != n ||
        specs.size() != n) {
        throw DomainError("commitment_cost: vector lengths differ");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        total += fuel_price * fuel_per_dg[i] * dt_hours;
        total += specs[i].cost_startup * indicators.startup[i];
        total += specs[i].cost_shutdown * indicators.shutdown[i];
        total += specs[i].cost_om * (state[i] ? 1.0 : 0.0) * dt_hours;
    }
    return total;
}

} // namespace pvdg
