// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace actiload::core {

enum class DayType : std::uint8_t { weekday = 0, saturday = 1, sunday = 2 };
enum class Season : std::uint8_t { winter = 0, spring = 1, summer = 2, autumn = 3 };
enum class Weather : std::uint8_t { good = 0, bad = 1, unknown = 2 };

inline const char* to_string(DayType d) {
    switch (d) {
    case DayType::weekday: return "weekday";
    case DayType::saturday: return "saturday";
    default: return "sunday";
    }
}

inline const char* to_string(Season s) {
    switch (s) {
    case Season::winter: return "winter";
    case Season::spring: return "spring";
    case Season::summer: return "summer";
    default: return "autumn";
    }
}

inline const char* to_string(Weather w) {
    switch (w) {
    case Weather::good: return "good";
    case Weather::bad: return "bad";
    default: return "unknown";
    }
}

DayType day_type_from_string(const std::string& s);
Weather weather_from_string(const std::string& s);

struct Date {
    int year = 2026;
    int month = 1; // 1..12
    int day = 1;   // 1..31
};

// Days since 1970-01-01 (proleptic Gregorian).
std::int64_t days_from_civil(const Date& d);
Date civil_from_days(std::int64_t z);

// 0 = Monday ... 6 = Sunday.
int weekday_of(std::int64_t days_since_epoch);

inline DayType day_type_of_weekday(int dow) {
    if (dow == 5)
        return DayType::saturday;
    if (dow == 6)
        return DayType::sunday;
    return DayType::weekday;
}

// Meteorological seasons: Dec-Feb winter, Mar-May spring, Jun-Aug summer,
// Sep-Nov autumn.
inline Season season_of_month(int month) {
    if (month == 12 || month <= 2)
        return Season::winter;
    if (month <= 5)
        return Season::spring;
    if (month <= 8)
        return Season::summer;
    return Season::autumn;
}

Date parse_date(const std::string& iso); // "YYYY-MM-DD"
std::string format_date(const Date& d);

// Minutes of day from "HH:MM"; accepts "24:00" as 1440.
int parse_minute_of_day(const std::string& hhmm);
std::string format_minute_of_day(int minute);

inline constexpr int kMinutesPerDay = 1440;

} // namespace actiload::core
