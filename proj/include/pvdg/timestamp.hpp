#pragma once

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>

namespace pvdg {

/// Instant in UTC with one-second resolution.
using Timestamp = std::chrono::sys_seconds;

/// Parses `YYYY-MM-DDTHH:MM:SSZ` (a trailing `Z` is required).
inline std::optional<Timestamp> parse_timestamp(std::string_view text)
{
    if (text.size() != 20 || text[4] != '-' || text[7] != '-' || text[10] != 'T' || text[13] != ':' ||
        text[16] != ':' || text[19] != 'Z') {
        return std::nullopt;
    }
    auto digits = [&](std::size_t pos, std::size_t len) -> std::optional<int> {
        int value = 0;
        for (std::size_t i = pos; i < pos + len; ++i) {
            const char c = text[i];
            if (c < '0' || c > '9') return std::nullopt;
            value = value * 10 + (c - '0');
        }
        return value;
    };
    const auto y = digits(0, 4), mo = digits(5, 2), d = digits(8, 2);
    const auto h = digits(11, 2), mi = digits(14, 2), s = digits(17, 2);
    if (!y || !mo || !d || !h || !mi || !s) return std::nullopt;
    if (*h > 23 || *mi > 59 || *s > 59) return std::nullopt;

    using namespace std::chrono;
    const year_month_day ymd{year{*y}, month{static_cast<unsigned>(*mo)}, day{static_cast<unsigned>(*d)}};
    if (!ymd.ok()) return std::nullopt;
    return sys_days{ymd} + hours{*h} + minutes{*mi} + seconds{*s};
}

inline std::string format_timestamp(Timestamp ts)
{
    using namespace std::chrono;
    const auto day_start = floor<days>(ts);
    const year_month_day ymd{day_start};
    const hh_mm_ss hms{ts - day_start};
    char buf[64];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02ld:%02ld:%02lldZ", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<long>(hms.hours().count()), static_cast<long>(hms.minutes().count()),
                  static_cast<long long>(hms.seconds().count()));
    return buf;
}

/// Day of year, 1 for January 1st.
inline int day_of_year(Timestamp ts)
{
    using namespace std::chrono;
    const auto d = floor<days>(ts);
    const year_month_day ymd{d};
    const sys_days jan1{ymd.year() / January / 1};
    return static_cast<int>((d - jan1).count()) + 1;
}

/// Hours elapsed since UTC midnight, fractional.
inline double utc_hour_of_day(Timestamp ts)
{
    using namespace std::chrono;
    const auto d = floor<days>(ts);
    return static_cast<double>((ts - d).count()) / 3600.0;
}

/// Difference in hours.
inline double hours_between(Timestamp from, Timestamp to)
{
    return static_cast<double>((to - from).count()) / 3600.0;
}

} // namespace pvdg
