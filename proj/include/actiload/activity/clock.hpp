// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "actiload/core/config.hpp"
#include "actiload/core/date.hpp"
#include "actiload/core/rng.hpp"

namespace actiload::activity {

struct DayOverlay;

// One-minute simulation clock with calendar-derived context.
struct SimulationClock {
    std::int64_t absolute_minute = 0;
    int day_index = 0;
    int minute_of_day = 0;
    int day_of_week = 0; // 0 = Monday
    std::int64_t epoch_day = 0;
    std::int64_t week_index = 0; // Monday-aligned weeks since 1970
    core::DayType day_type = core::DayType::weekday;
    core::Season season = core::Season::winter;
    core::Weather weather = core::Weather::unknown;
    const DayOverlay* overlay = nullptr; // exceptional-event edits, if any

    bool in_period(int start, int end) const {
        return minute_of_day >= start && minute_of_day < end;
    }
};

// Per-date overrides: day type, weather, and exceptional-event task edits.
struct DayOverlay {
    std::optional<core::DayType> day_type;
    std::optional<core::Weather> weather;
    std::vector<std::string> suppress; // activity codes removed that day
    std::vector<std::string> inject;   // activity codes added that day
};

struct CalendarOverlay {
    std::map<std::int64_t, DayOverlay> days; // keyed by epoch day

    static CalendarOverlay from_config(const core::ConfigDoc& doc);
    static CalendarOverlay load(const std::string& path);
    const DayOverlay* overlay_for(std::int64_t epoch_day) const {
        auto it = days.find(epoch_day);
        return it == days.end() ? nullptr : &it->second;
    }
};

struct WeatherModel {
    double p_good = 0.5; // daily Bernoulli unless the overlay pins the day
};

// Shared calendar: day context is a pure function of (start date, seed, day
// index), so every household and every worker sees identical days.
class Calendar {
public:
    Calendar(core::Date start, WeatherModel weather, CalendarOverlay overlay, std::uint64_t seed)
        : start_(start), start_epoch_day_(core::days_from_civil(start)), weather_(weather),
          overlay_(std::move(overlay)), seed_(seed) {}

    SimulationClock at(int day_index, int minute_of_day) const;
    core::Date start_date() const { return start_; }
    const CalendarOverlay& overlay() const { return overlay_; }

private:
    core::Date start_;
    std::int64_t start_epoch_day_;
    WeatherModel weather_;
    CalendarOverlay overlay_;
    std::uint64_t seed_;
};

} // namespace actiload::activity
