#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "hydronet/common.hpp"

namespace hydronet {

namespace detail {

// Civil-calendar conversions (proleptic Gregorian, no time zones).
inline std::int64_t days_from_civil(int y, unsigned m, unsigned d) {
    y -= m <= 2;
    const int era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return static_cast<std::int64_t>(era) * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

struct Civil { int year; unsigned month; unsigned day; };

inline Civil civil_from_days(std::int64_t z) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const int y = static_cast<int>(yoe) + static_cast<int>(era) * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned d = doy - (153 * mp + 2) / 5 + 1;
    const unsigned m = mp + (mp < 10 ? 3 : -9);
    return {y + (m <= 2), m, d};
}

inline bool is_leap(int y) { return y % 4 == 0 && (y % 100 != 0 || y % 400 == 0); }

inline unsigned days_in_month(int y, unsigned m) {
    static const unsigned dm[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    return m == 2 && is_leap(y) ? 29 : dm[m - 1];
}

}  // namespace detail

// A calendar timestamp at minute resolution (naive local time).
struct Timestamp {
    std::int64_t minutes = 0;  // minutes since 1970-01-01T00:00

    static Timestamp from_civil(int year, unsigned month, unsigned day,
                                unsigned hour, unsigned minute) {
        if (month < 1 || month > 12)
            throw Error("Timestamp: month out of range");
        if (day < 1 || day > detail::days_in_month(year, month))
            throw Error("Timestamp: day out of range");
        if (hour > 23 || minute > 59)
            throw Error("Timestamp: time out of range");
        const std::int64_t d = detail::days_from_civil(year, month, day);
        return {d * 1440 + static_cast<std::int64_t>(hour) * 60 + minute};
    }

    // Strict ISO 8601 "YYYY-MM-DDTHH:MM".
    static Timestamp parse(std::string_view s) {
        auto bad = [&] { throw Error("Timestamp: expected YYYY-MM-DDTHH:MM, got '" + std::string(s) + "'"); };
        if (s.size() != 16 || s[4] != '-' || s[7] != '-' || s[10] != 'T' || s[13] != ':') bad();
        auto num = [&](std::size_t pos, std::size_t len) {
            int v = 0;
            for (std::size_t i = pos; i < pos + len; ++i) {
                if (s[i] < '0' || s[i] > '9') bad();
                v = v * 10 + (s[i] - '0');
            }
            return v;
        };
        return from_civil(num(0, 4), static_cast<unsigned>(num(5, 2)), static_cast<unsigned>(num(8, 2)),
                          static_cast<unsigned>(num(11, 2)), static_cast<unsigned>(num(14, 2)));
    }

    std::string to_string() const {
        std::int64_t day_part = minutes / 1440;
        std::int64_t min_of_day = minutes % 1440;
        if (min_of_day < 0) { min_of_day += 1440; day_part -= 1; }
        const auto c = detail::civil_from_days(day_part);
        char buf[24];
        std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02lld:%02lld", c.year, c.month, c.day,
                      static_cast<long long>(min_of_day / 60), static_cast<long long>(min_of_day % 60));
        return buf;
    }

    Timestamp plus_minutes(std::int64_t m) const { return {minutes + m}; }

    int day_of_month() const {
        std::int64_t day_part = minutes / 1440;
        if (minutes % 1440 < 0) day_part -= 1;
        return static_cast<int>(detail::civil_from_days(day_part).day);
    }

    int hour() const {
        std::int64_t m = minutes % 1440;
        if (m < 0) m += 1440;
        return static_cast<int>(m / 60);
    }

    int minute() const {
        std::int64_t m = minutes % 60;
        if (m < 0) m += 60;
        return static_cast<int>(m);
    }

    friend bool operator==(const Timestamp&, const Timestamp&) = default;
    friend auto operator<=>(const Timestamp&, const Timestamp&) = default;
};

struct TimeFeatures {
    int day_of_month;  // 1..31
    int hour;          // 0..23
    int minute_slot;   // 0..3 over {0,15,30,45}
};

inline TimeFeatures time_features(const Timestamp& ts, int cadence_minutes = 15) {
    const int minute = ts.minute();
    if (cadence_minutes <= 0 || minute % cadence_minutes != 0)
        throw Error("time_features: minute " + std::to_string(minute) + " not on the " +
                    std::to_string(cadence_minutes) + "-minute cadence grid");
    return {ts.day_of_month(), ts.hour(), minute / 15};
}

}  // namespace hydronet
