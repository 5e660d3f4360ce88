#pragma once

// PV-array available power from horizontal-surface weather samples:
// tilted-surface irradiance (beam, diffuse, ground-reflected components),
// NOCT cell temperature and a single-diode cell with series resistance.

#include "pvdg/errors.hpp"
#include "pvdg/timestamp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

namespace pvdg {

/// One horizontal-surface weather sample. Irradiances in W/m², temperature in °C.
struct WeatherRecord {
    Timestamp timestamp{};
    double global = 0.0;
    double beam = 0.0;
    double diffuse = 0.0;
    double ambient_temp = 0.0;
    /// Precomputed plane-of-array irradiance; bypasses the geometry path when set.
    std::optional<double> tilted{};
    /// Per-step grid availability override (0 or 1).
    std::optional<int> grid_status{};
};

/// Slack allowed on beam + diffuse <= global.
inline constexpr double kSplitSlack = 0.05;

/// Site and mounting geometry; angles in degrees.
struct SiteGeometry {
    double latitude = 0.0;
    /// Degrees east. Only shifts UTC clock time to mean solar time.
    double longitude = 0.0;
    double tilt = 0.0;
    /// Degrees from south, east negative, west positive.
    double surface_azimuth = 0.0;
    double albedo = 0.2;

    void validate() const
    {
        if (!(latitude >= -90.0 && latitude <= 90.0)) throw DomainError("latitude must lie in [-90, 90]");
        if (!(longitude >= -180.0 && longitude <= 180.0)) throw DomainError("longitude must lie in [-180, 180]");
        if (!(tilt >= 0.0 && tilt <= 90.0)) throw DomainError("tilt must lie in [0, 90]");
        if (!(surface_azimuth >= -180.0 && surface_azimuth <= 180.0))
            throw DomainError("surface_azimuth must lie in [-180, 180]");
        if (!(albedo >= 0.0 && albedo <= 1.0)) throw DomainError("albedo must lie in [0, 1]");
    }
};

/// Single cell datasheet values at STC.
struct PVCellSpec {
    double voc_stc = 0.6;        // V
    double isc_stc = 8.0;        // A
    double k_v = -0.002;         // V/°C
    double k_i = 0.003;          // A/°C
    double series_resistance = 0.005; // ohm
    double ideality = 1.0;
    double noct = 45.0;          // °C

    void validate() const
    {
        if (!(voc_stc > 0.0)) throw DomainError("V_oc_stc must be positive");
        if (!(isc_stc > 0.0)) throw DomainError("I_sc_stc must be positive");
        if (!(series_resistance >= 0.0)) throw DomainError("R_s must be non-negative");
        if (!(ideality > 0.0)) throw DomainError("ideality factor must be positive");
        if (!(series_resistance * isc_stc < voc_stc)) throw DomainError("R_s * I_sc_stc must be below V_oc_stc");
    }
};

struct PVArraySpec {
    int modules_series = 1;
    int modules_parallel = 1;
    int cells_per_module = 1;

    void validate() const
    {
        if (modules_series < 1 || modules_parallel < 1 || cells_per_module < 1)
            throw DomainError("PV array counts must be >= 1");
    }
    [[nodiscard]] long long cell_count() const
    {
        return static_cast<long long>(modules_series) * modules_parallel * cells_per_module;
    }
};

/// Plane-of-array irradiance components, W/m².
struct TiltedIrradiance {
    double total = 0.0;
    double beam = 0.0;
    double diffuse = 0.0;
    double reflected = 0.0;
};

inline constexpr double kBeamFactorCap = 10.0;

namespace detail {
inline double deg2rad(double deg) { return deg * std::numbers::pi / 180.0; }
} // namespace detail

/// Solar declination in degrees (Cooper's relation).
inline double solar_declination_deg(int day_of_year)
{
    return 23.45 * std::sin(detail::deg2rad(360.0 * (284.0 + day_of_year) / 365.0));
}

/// Hour angle in degrees; zero at solar noon, negative in the morning.
inline double hour_angle_deg(Timestamp ts, double longitude_deg)
{
    const double solar_hour = utc_hour_of_day(ts) + longitude_deg / 15.0;
    return 15.0 * (solar_hour - 12.0);
}

/// Ratio of beam irradiance on the tilted plane to beam irradiance on the horizontal.
/// Zero when the sun is at or below the horizon, capped at kBeamFactorCap.
inline double beam_factor(Timestamp ts, const SiteGeometry& geometry)
{
    using detail::deg2rad;
    const double dec = deg2rad(solar_declination_deg(day_of_year(ts)));
    const double omega = deg2rad(hour_angle_deg(ts, geometry.longitude));
    const double phi = deg2rad(geometry.latitude);
    const double beta = deg2rad(geometry.tilt);
    const double gamma = deg2rad(geometry.surface_azimuth);

    const double cos_zenith = std::cos(phi) * std::cos(dec) * std::cos(omega) + std::sin(phi) * std::sin(dec);
    if (cos_zenith <= 0.0) return 0.0;

    const double cos_incidence = std::sin(dec) * std::sin(phi) * std::cos(beta)
        - std::sin(dec) * std::cos(phi) * std::sin(beta) * std::cos(gamma)
        + std::cos(dec) * std::cos(phi) * std::cos(beta) * std::cos(omega)
        + std::cos(dec) * std::sin(phi) * std::sin(beta) * std::cos(gamma) * std::cos(omega)
        + std::cos(dec) * std::sin(beta) * std::sin(gamma) * std::sin(omega);

    return std::clamp(std::max(0.0, cos_incidence) / cos_zenith, 0.0, kBeamFactorCap);
}

inline TiltedIrradiance tilted_irradiance(const WeatherRecord& record, const SiteGeometry& geometry, double beam_factor)
{
    const double cos_beta = std::cos(detail::deg2rad(geometry.tilt));
    TiltedIrradiance out;
    out.beam = std::max(0.0, beam_factor * record.beam);
    out.diffuse = std::max(0.0, (1.0 + cos_beta) / 2.0 * record.diffuse);
    out.reflected = std::max(0.0, (1.0 - cos_beta) / 2.0 * geometry.albedo * record.global);
    out.total = out.beam + out.diffuse + out.reflected;
    return out;
}

/// NOCT relation.
inline double cell_temperature(double ambient_c, double tilted_irradiance, double noct_c)
{
    return ambient_c + tilted_irradiance * (noct_c - 20.0) / 800.0;
}

inline constexpr double kBoltzmann = 1.380649e-23;       // J/K
inline constexpr double kElementaryCharge = 1.602176634e-19; // C

inline double thermal_voltage(double cell_temp_c)
{
    return kBoltzmann * (cell_temp_c + 273.15) / kElementaryCharge;
}

/// Empirical fill factor of an ideal cell as a function of the normalized open-circuit voltage.
inline double ideal_fill_factor(double normalized_voc)
{
    return (normalized_voc - std::log(normalized_voc + 0.72)) / (normalized_voc + 1.0);
}

/// Fill factor with the first-order series-resistance correction FF0 * (1 - r_s).
inline double fill_factor(double voc, double isc, double cell_temp_c, const PVCellSpec& spec)
{
    if (!(voc > 0.0) || !(isc > 0.0)) throw DomainError("fill_factor requires V_oc > 0 and I_sc > 0");
    const double v_oc = voc / (spec.ideality * thermal_voltage(cell_temp_c));
    const double ff0 = ideal_fill_factor(v_oc);
    const double r_s = spec.series_resistance * isc / voc;
    constexpr double eps = 1e-12;
    return std::clamp(ff0 * (1.0 - r_s), eps, 1.0 - eps);
}

/// Open-circuit voltage and short-circuit current at the given operating point.
struct CellOperatingPoint {
    double voc = 0.0;
    double isc = 0.0;
    double isc_one_sun = 0.0;
    double fill_factor = 0.0;
    double power = 0.0; // W
};

/// Maximum power of one cell. The fill factor is evaluated at the one-sun current for the
/// cell temperature, so power is exactly proportional to irradiance at fixed temperature.
inline CellOperatingPoint cell_operating_point(double tilted_irradiance, double cell_temp_c, const PVCellSpec& spec)
{
    CellOperatingPoint op;
    op.voc = spec.voc_stc + spec.k_v * (cell_temp_c - 25.0);
    op.isc_one_sun = spec.isc_stc + spec.k_i * (cell_temp_c - 25.0);
    op.isc = op.isc_one_sun * tilted_irradiance / 1000.0;
    if (tilted_irradiance <= 0.0 || op.voc <= 0.0 || op.isc_one_sun <= 0.0) return op;
    op.fill_factor = fill_factor(op.voc, op.isc_one_sun, cell_temp_c, spec);
    op.power = op.voc * op.isc * op.fill_factor;
    return op;
}

inline double cell_max_power(double tilted_irradiance, double cell_temp_c, const PVCellSpec& spec)
{
    return cell_operating_point(tilted_irradiance, cell_temp_c, spec).power;
}

/// Array power in kW from single-cell power in W.
inline double array_available_power(double cell_power_w, const PVArraySpec& array)
{
    return static_cast<double>(array.cell_count()) * cell_power_w / 1000.0;
}

/// Full PV block of a scenario.
struct PVSystem {
    PVArraySpec array;
    PVCellSpec cell;
    SiteGeometry site;
};

/// Module rating at STC in kW.
inline double module_stc_power_kw(const PVCellSpec& cell, int cells_per_module)
{
    return cells_per_module * cell_max_power(1000.0, 25.0, cell) / 1000.0;
}

/// Rated array power at STC in kW.
inline double array_stc_power_kw(const PVArraySpec& array, const PVCellSpec& cell)
{
    return array_available_power(cell_max_power(1000.0, 25.0, cell), array);
}

/// Chooses the parallel string count that brings the STC rating closest to the target.
inline PVArraySpec size_array(double target_kwp, const PVCellSpec& cell, int cells_per_module, int modules_series)
{
    if (!(target_kwp > 0.0)) throw DomainError("target kWp must be positive");
    if (cells_per_module < 1 || modules_series < 1) throw DomainError("module counts must be >= 1");
    const double string_kw = module_stc_power_kw(cell, cells_per_module) * modules_series;
    if (!(string_kw > 0.0)) throw DomainError("module has no STC power");
    const int parallel = std::max(1, static_cast<int>(std::lround(target_kwp / string_kw)));
    return PVArraySpec{modules_series, parallel, cells_per_module};
}

/// Available array power for one weather sample, kW.
inline double available_pv_power(const WeatherRecord& record, const PVSystem& pv)
{
    double g_t = 0.0;
    if (record.tilted) {
        g_t = std::max(0.0, *record.tilted);
    } else {
        g_t = tilted_irradiance(record, pv.site, beam_factor(record.timestamp, pv.site)).total;
    }
    const double t_c = cell_temperature(record.ambient_temp, g_t, pv.cell.noct);
    return array_available_power(cell_max_power(g_t, t_c, pv.cell), pv.array);
}

inline std::vector<double> available_pv_series(std::span<const WeatherRecord> weather, const PVSystem& pv)
{
    std::vector<double> out;
    out.reserve(weather.size());
    for (const auto& r : weather) out.push_back(available_pv_power(r, pv));
    return out;
}

} // namespace pvdg
