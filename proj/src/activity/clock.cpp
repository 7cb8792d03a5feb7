// SPDX-License-Identifier: Apache-2.0
#include "actiload/activity/clock.hpp"

namespace actiload::activity {

CalendarOverlay CalendarOverlay::from_config(const core::ConfigDoc& doc) {
    CalendarOverlay overlay;
    for (const auto& section : doc.sections()) {
        if (section.name.size() != 10 || section.name[4] != '-')
            continue; // not a date section
        core::Date d = core::parse_date(section.name);
        DayOverlay day;
        if (auto dt = section.get("day_type"))
            day.day_type = core::day_type_from_string(*dt);
        if (auto w = section.get("weather"))
            day.weather = core::weather_from_string(*w);
        if (auto sup = section.get("suppress"))
            day.suppress = core::split_list(*sup);
        if (auto inj = section.get("inject"))
            day.inject = core::split_list(*inj);
        overlay.days[core::days_from_civil(d)] = std::move(day);
    }
    return overlay;
}

CalendarOverlay CalendarOverlay::load(const std::string& path) {
    return from_config(core::ConfigDoc::parse_file(path));
}

SimulationClock Calendar::at(int day_index, int minute_of_day) const {
    SimulationClock clock;
    clock.day_index = day_index;
    clock.minute_of_day = minute_of_day;
    clock.absolute_minute =
        static_cast<std::int64_t>(day_index) * core::kMinutesPerDay + minute_of_day;
    clock.epoch_day = start_epoch_day_ + day_index;
    clock.day_of_week = core::weekday_of(clock.epoch_day);
    clock.week_index = (clock.epoch_day + 3) / 7; // Monday-aligned
    clock.day_type = core::day_type_of_weekday(clock.day_of_week);
    clock.season = core::season_of_month(core::civil_from_days(clock.epoch_day).month);

    // Weather is keyed by calendar date, not run layout, so runs over the
    // same dates share it.
    auto rng = core::RngStream::derive(seed_, {core::streams::kWeather,
                                               static_cast<std::uint64_t>(clock.epoch_day)});
    clock.weather = rng.bernoulli(weather_.p_good) ? core::Weather::good : core::Weather::bad;

    if (const DayOverlay* ov = overlay_.overlay_for(clock.epoch_day)) {
        if (ov->day_type)
            clock.day_type = *ov->day_type;
        if (ov->weather)
            clock.weather = *ov->weather;
        clock.overlay = ov;
    }
    return clock;
}

} // namespace actiload::activity
