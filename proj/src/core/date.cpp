// SPDX-License-Identifier: Apache-2.0
#include "actiload/core/date.hpp"

#include <cstdio>

namespace actiload::core {

DayType day_type_from_string(const std::string& s) {
    if (s == "weekday")
        return DayType::weekday;
    if (s == "saturday")
        return DayType::saturday;
    if (s == "sunday")
        return DayType::sunday;
    throw std::invalid_argument("unknown day type '" + s + "' (expected weekday|saturday|sunday)");
}

Weather weather_from_string(const std::string& s) {
    if (s == "good")
        return Weather::good;
    if (s == "bad")
        return Weather::bad;
    if (s == "unknown")
        return Weather::unknown;
    throw std::invalid_argument("unknown weather '" + s + "' (expected good|bad|unknown)");
}

std::int64_t days_from_civil(const Date& d) {
    int y = d.year;
    const int m = d.month;
    const int dd = d.day;
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2u) / 5u +
                         static_cast<unsigned>(dd) - 1u;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

Date civil_from_days(std::int64_t z) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned dd = doy - (153 * mp + 2) / 5 + 1;
    const unsigned m = mp + (mp < 10 ? 3 : static_cast<unsigned>(-9));
    return Date{static_cast<int>(y + (m <= 2)), static_cast<int>(m), static_cast<int>(dd)};
}

int weekday_of(std::int64_t days_since_epoch) {
    // 1970-01-01 was a Thursday (weekday 3 with Monday = 0).
    std::int64_t w = (days_since_epoch + 3) % 7;
    if (w < 0)
        w += 7;
    return static_cast<int>(w);
}

Date parse_date(const std::string& iso) {
    int y = 0, m = 0, d = 0;
    if (std::sscanf(iso.c_str(), "%d-%d-%d", &y, &m, &d) != 3 || m < 1 || m > 12 || d < 1 || d > 31)
        throw std::invalid_argument("bad date '" + iso + "' (expected YYYY-MM-DD)");
    return Date{y, m, d};
}

std::string format_date(const Date& d) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", d.year, d.month, d.day);
    return buf;
}

int parse_minute_of_day(const std::string& hhmm) {
    int h = 0, m = 0;
    if (std::sscanf(hhmm.c_str(), "%d:%d", &h, &m) != 2 || h < 0 || h > 24 || m < 0 || m > 59 ||
        (h == 24 && m != 0))
        throw std::invalid_argument("bad time '" + hhmm + "' (expected HH:MM)");
    return h * 60 + m;
}

std::string format_minute_of_day(int minute) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%02d:%02d", minute / 60, minute % 60);
    return buf;
}

} // namespace actiload::core
