#pragma once

// Periodic blackout schedule of the public grid and import/export feasibility.

#include "pvdg/errors.hpp"

#include <cmath>
#include <cstddef>
#include <vector>

namespace pvdg {

struct GridSchedule {
    double on_hours = 8.0;      // tau
    double period_hours = 12.0; // T
    double phase_offset = 0.0;  // h, in [0, period)
    double max_power_kw = 500.0;

    void validate() const
    {
        if (!(period_hours > 0.0)) throw DomainError("grid period must be positive");
        if (!(on_hours >= 0.0 && on_hours <= period_hours)) throw DomainError("grid ON span must lie in [0, period]");
        if (!(phase_offset >= 0.0 && phase_offset < period_hours))
            throw DomainError("grid phase offset must lie in [0, period)");
        if (!(max_power_kw > 0.0)) throw DomainError("grid power limit must be positive");
    }
};

/// 1 while the grid is ON. The half-open span [0, tau) of each cycle is ON.
inline int grid_status(double t_hours, const GridSchedule& schedule)
{
    if (t_hours < 0.0) throw DomainError("grid_status: time must be non-negative");
    const double phase = std::fmod(t_hours + schedule.phase_offset, schedule.period_hours);
    return phase < schedule.on_hours ? 1 : 0;
}

inline double grid_capability(int status, double max_power_kw) { return status * max_power_kw; }

inline std::vector<int> grid_status_series(std::size_t steps, double dt_hours, const GridSchedule& schedule)
{
    std::vector<int> out(steps);
    for (std::size_t k = 0; k < steps; ++k) out[k] = grid_status(static_cast<double>(k) * dt_hours, schedule);
    return out;
}

struct GridExchange {
    int import_flag = 0;
    int export_flag = 0;
    double import_kw = 0.0;
    double export_kw = 0.0;
};

inline bool exchange_feasible(const GridExchange& x, double capability_kw)
{
    return x.import_flag * x.import_kw <= capability_kw && x.export_flag * x.export_kw <= capability_kw &&
           x.import_flag + x.export_flag <= 1;
}

} // namespace pvdg
