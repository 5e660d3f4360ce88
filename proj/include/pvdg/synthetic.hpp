#pragma once

// Seeded synthetic weather and load year. Uses only the raw mt19937_64 stream
// (no std distributions) so a seed yields the same data on every platform.

#include "pvdg/scenario.hpp"
#include "pvdg/solar_model.hpp"
#include "pvdg/timestamp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace pvdg {

struct SyntheticYear {
    std::vector<WeatherRecord> weather;
    std::vector<LoadRecord> load;
};

struct SyntheticOptions {
    std::uint64_t seed = 42;
    int year = 2019;
    std::size_t hours = 8760;
    double latitude = 31.5;
    double night_load_kw = 200.0;
    double day_load_kw = 330.0;
    /// Floor on the generated load, kW.
    double min_load_kw = 160.0;
};

namespace detail {

class UnitRng {
public:
    explicit UnitRng(std::uint64_t seed) : engine_(seed) {}
    /// Uniform in [0, 1) from the top 53 bits.
    double next() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double symmetric() { return 2.0 * next() - 1.0; }

private:
    std::mt19937_64 engine_;
};

/// Erbs diffuse fraction as a function of the clearness index.
inline double diffuse_fraction(double kt)
{
    if (kt <= 0.22) return 1.0 - 0.09 * kt;
    if (kt <= 0.80) return 0.9511 - 0.1604 * kt + 4.388 * kt * kt - 16.638 * kt * kt * kt + 12.336 * kt * kt * kt * kt;
    return 0.165;
}

inline double quantize(double v, double step) { return std::round(v / step) * step; }

} // namespace detail

inline SyntheticYear synthetic_year(const SyntheticOptions& opt = {})
{
    using namespace std::chrono;
    constexpr double two_pi = 2.0 * std::numbers::pi;
    detail::UnitRng rng(opt.seed);
    const Timestamp start = sys_days{year{opt.year} / January / 1};
    const double phi = detail::deg2rad(opt.latitude);

    SyntheticYear out;
    out.weather.reserve(opt.hours);
    out.load.reserve(opt.hours);

    double day_kt = 0.6;
    double day_load_scale = 1.0;
    for (std::size_t k = 0; k < opt.hours; ++k) {
        const Timestamp ts = start + hours{static_cast<long>(k)};
        const int n = day_of_year(ts);
        const double hour = utc_hour_of_day(ts);
        const double season = std::sin(two_pi * (n - 110) / 365.0); // +1 around late July

        if (k % 24 == 0) {
            // Clear days are more likely in summer.
            const double p_clear = 0.55 + 0.25 * season;
            const double u = rng.next();
            day_kt = u < p_clear ? 0.70 + 0.05 * rng.next() : (u < p_clear + 0.25 ? 0.50 : 0.28) + 0.05 * rng.next();
            day_load_scale = 1.0 + 0.05 * rng.symmetric();
        }

        const double dec = detail::deg2rad(solar_declination_deg(n));
        const double omega = detail::deg2rad(hour_angle_deg(ts, 0.0));
        const double cos_zenith = std::cos(phi) * std::cos(dec) * std::cos(omega) + std::sin(phi) * std::sin(dec);
        const double extraterrestrial = 1367.0 * (1.0 + 0.033 * std::cos(two_pi * n / 365.0)) * std::max(0.0, cos_zenith);
        const double kt = std::clamp(day_kt + 0.04 * rng.symmetric(), 0.05, 0.80);

        WeatherRecord w;
        w.timestamp = ts;
        w.global = detail::quantize(kt * extraterrestrial, 1e-3);
        w.diffuse = detail::quantize(detail::diffuse_fraction(kt) * w.global, 1e-3);
        w.beam = std::max(0.0, detail::quantize(w.global - w.diffuse, 1e-3));
        w.ambient_temp = detail::quantize(
            20.0 + 8.0 * season + 5.0 * std::sin(two_pi * (hour - 9.0) / 24.0) + rng.symmetric(), 1e-3);
        out.weather.push_back(w);

        const bool working_hours = hour >= 7.0 && hour < 19.0;
        const double base = working_hours ? opt.day_load_kw : opt.night_load_kw;
        const double seasonal = 25.0 * season;
        const double load = base * day_load_scale + seasonal + 15.0 * rng.symmetric();
        out.load.push_back(LoadRecord{ts, detail::quantize(std::max(opt.min_load_kw, load), 1e-3), std::nullopt});
    }
    return out;
}

} // namespace pvdg
