// SPDX-License-Identifier: Apache-2.0
//
// Shared fixtures for the unit and acceptance suites.
#pragma once

#include <string>
#include <vector>

#include "actiload/appliance/appliance.hpp"
#include "actiload/popsynth/population.hpp"
#include "actiload/tusdata/taskspec.hpp"

namespace testfix {

// Small synthetic-population spec with adult/child structure and a
// location-conditioned air conditioner.
inline const char* population_spec_text() {
    return R"(
[population]
age_bands = 0-14, 15-24, 25-49, 50-64, 65+

[marginal.household_size]
1 = 0.35
2 = 0.35
3 = 0.20
4 = 0.10

[marginal.gender]
female = 0.5
male = 0.5

[marginal.age_band]
0-14 = 0.15
15-24 = 0.10
25-49 = 0.35
50-64 = 0.20
65+ = 0.20

[conditional.employment]
parents = age_band
0-14 = student:1
15-24 = student:0.5, active:0.4, inactive:0.1
25-49 = active:0.8, inactive:0.1, student:0.1
50-64 = active:0.7, inactive:0.15, retired:0.15
65+ = retired:0.95, inactive:0.05

[marginal.location]
north = 0.5
south = 0.5

[marginal.dwelling_type]
house = 0.6
apartment = 0.4

[marginal.insulation]
poor = 0.3
medium = 0.5
good = 0.2

[marginal.energy_tariff]
base = 0.6
peak_offpeak = 0.4

[marginal.family_type]
single = 0.4
couple = 0.35
family = 0.25

[ownership.tv]
base = 0.95

[ownership.computer]
base = 0.85

[ownership.microwave]
base = 0.9

[ownership.oven]
base = 0.8

[ownership.cooking_plate]
base = 0.75

[ownership.kettle]
base = 0.9

[ownership.washing_machine]
base = 0.95

[ownership.vacuum]
base = 0.9

[ownership.water_heater]
base = 1.0

[ownership.air_conditioner]
base = 0.05
location:south = 0.35
)";
}

inline actiload::popsynth::PopulationSpec population_spec() {
    return actiload::popsynth::parse_population_spec(population_spec_text(), "<test-spec>");
}

inline actiload::popsynth::Population make_population(int n_households, std::uint64_t seed = 42) {
    return actiload::popsynth::synthesize_population(population_spec(), n_households, seed);
}

// Appliance catalog used by the simulation tests; the probability table
// carries the reference task/appliance probabilities the fixtures assert.
inline const char* appliance_catalog_text() {
    return R"(
[appliance.tv]
aum = forced
power = 100
standby = 2

[appliance.computer]
aum = forced
power = 120

[appliance.microwave]
aum = cycle
cycle = 4:900

[appliance.oven]
aum = cycle
cycle = 15:2400, 30:1200

[appliance.cooking_plate]
aum = forced
power = 1500

[appliance.kettle]
aum = cycle
cycle = 3:2000

[appliance.washing_machine]
aum = cycle
cycle = 20:2200, 40:150, 20:300
standby = 1

[appliance.vacuum]
aum = fractional
power = 800
fraction = 0.25
burst = 5

[pu]
row = cooking, microwave, 0.64
row = cooking, tv, 0.05
row = cooking, computer, 0.25
row = cooking, oven, 0.3
row = cooking, cooking_plate, 0.6
row = cooking, kettle, 0.15
row = computer, microwave, 0.02
row = computer, computer, 1
row = tv, microwave, 0.02
row = tv, tv, 1
row = housekeeping, microwave, 0.02
row = housekeeping, tv, 0.16
row = housekeeping, computer, 0.19
row = housekeeping, vacuum, 0.6
row = breakfast, microwave, 0.01
row = breakfast, tv, 0.05
row = breakfast, kettle, 0.3
row = meal, microwave, 0.08
row = meal, tv, 0.05
row = meal, computer, 0.06
row = reading, microwave, 0.02
row = reading, computer, 0.06
row = personal_time, microwave, 0.01
row = personal_time, tv, 0.16
row = personal_time, computer, 0.19
row = laundry, washing_machine, 1

[composite.kitchen]
members = microwave, oven, cooking_plate, kettle
baseline = 5, 15, 20, 10, 25

[composite.home]
baseline = 40, 45, 45, 45, 50

[dhw]
tank_liters = 200
setpoint_c = 55
inlet_c = 12
ambient_c = 20
heater_w = 2400
loss_ua_w_per_k = 1.7
heating_windows = 23:00-08:30, 13:00-15:30
showers_per_week = 5
shower_liters = 40
shower_temp_c = 40
shower_minutes = 6

[reporting]
cooking_appliances = oven, cooking_plate, microwave, kettle
hygiene_activities = hygiene
)";
}

inline actiload::appliance::ApplianceCatalog appliance_catalog() {
    return actiload::appliance::parse_appliance_catalog(appliance_catalog_text(), "<test-appl>");
}

// Task catalog for simulation fixtures: a realistic weekday/weekend mix with
// shared cooking, weekly laundry and enough stochastic slack that consecutive
// days differ.
inline actiload::tusdata::TaskCatalog simulation_catalog() {
    using actiload::core::DayType;
    using actiload::tusdata::HouseholdRule;
    using actiload::tusdata::TaskSpec;

    actiload::tusdata::TaskCatalog cat;
    auto add = [&](const char* act, DayType day, const char* type, int ps, int pe, int dmin,
                   int dmax, double fday, double coll, HouseholdRule rule, double wx_good = 1.0,
                   double wx_bad = 1.0) {
        TaskSpec s;
        s.activity = act;
        s.day_type = day;
        s.type_key = type;
        s.pp_start = ps;
        s.pp_end = pe;
        s.min_duration = dmin;
        s.max_duration = dmax;
        s.freq_per_day = fday;
        s.freq_per_week = 7 * fday;
        s.collectivity = coll;
        s.household_rule = rule;
        s.weather_mult[0] = wx_good;
        s.weather_mult[1] = wx_bad;
        cat.specs.push_back(s);
    };
    for (DayType day : {DayType::weekday, DayType::saturday, DayType::sunday}) {
        add("sleep", day, "*", 0, 480, 430, 480, 1, 0, HouseholdRule::none);
        add("sleep", day, "*", 1320, 1440, 60, 120, 1, 0, HouseholdRule::none);
        // morning chain: routine fills the pre-08:00 gap so hygiene starts in
        // its own period
        add("morning_routine", day, "*", 430, 500, 20, 40, 1, 0.2, HouseholdRule::none);
        add("breakfast", day, "*", 460, 540, 10, 30, 1, 0.4, HouseholdRule::none);
        add("hygiene", day, "*", 480, 560, 10, 20, 1, 0, HouseholdRule::none);
        add("hygiene", day, "*", 1260, 1380, 10, 30, 1, 0, HouseholdRule::none);
        add("errands", day, "*", 540, 840, 60, 180, 1, 0.2, HouseholdRule::none);
        add("cooking", day, "*", 660, 720, 20, 60, 1, 0.6, HouseholdRule::shared);
        add("meal", day, "*", 720, 840, 20, 60, 1, 0.7, HouseholdRule::none);
        add("cooking", day, "*", 1080, 1140, 20, 60, 1, 0.6, HouseholdRule::shared);
        add("meal", day, "*", 1140, 1260, 20, 60, 1, 0.7, HouseholdRule::none);
        add("housekeeping", day, "*", 540, 1080, 20, 90, 0.8, 0.02, HouseholdRule::none);
        // wide-period fillers keep idle agents from dragging evening tasks
        // forward; good weather stretches the outdoor one
        add("leisure_outside", day, "*", 840, 1260, 60, 240, 0.8, 0.25, HouseholdRule::none, 1.2,
            0.8);
        add("personal_time", day, "*", 840, 1230, 30, 120, 1, 0.1, HouseholdRule::none);
        add("reading", day, "*", 960, 1290, 20, 60, 0.7, 0, HouseholdRule::none);
        add("tv", day, "*", 1140, 1440, 30, 180, 1, 0.3, HouseholdRule::none);
        add("computer", day, "*", 960, 1380, 20, 120, 0.5, 0, HouseholdRule::none);
        add("laundry", day, "*", 480, 1320, 10, 20, 0.3, 0, HouseholdRule::size_weekly);
    }
    add("work", DayType::weekday, "*_*_active", 540, 1080, 360, 480, 1, 0, HouseholdRule::none);
    add("school", DayType::weekday, "*_*_student", 530, 1020, 300, 420, 1, 0, HouseholdRule::none);
    cat.validate();
    return cat;
}

// Category map covering the simulation catalog's codes.
inline const char* category_map_text() {
    return R"(
[categories]
sleep = sleep
work_school = work, school
meals = breakfast, meal
cooking = cooking
hygiene = hygiene
housekeeping = housekeeping, laundry
leisure = tv, computer, reading, personal_time
other = errands, morning_routine, leisure_outside
)";
}

// Work-activity diaries built so the X-band extraction recovers the
// reference bands exactly: X=90 -> period 06:00-19:50 with 2-12 h durations,
// X=50 -> 07:40-16:50 with 5-10 h.
inline std::vector<std::pair<int, int>> work_fixture_episodes() {
    return {{390, 460}, {360, 600}, {590, 180}, {530, 330}, {530, 340},
            {140, 570}, {650, 180}, {510, 120}, {600, 40},  {240, 710},
            {380, 980}, {500, 420}, {730, 400}, {460, 550}, {580, 300},
            {630, 720}, {500, 190}, {510, 640}, {550, 580}, {550, 640}};
}

inline std::vector<actiload::tusdata::TusRecord> work_fixture_records() {
    std::vector<actiload::tusdata::TusRecord> records;
    int n = 0;
    for (const auto& [start, duration] : work_fixture_episodes()) {
        actiload::tusdata::TusRecord rec;
        rec.respondent_id = "w" + std::to_string(n++);
        rec.gender = "female";
        rec.age = 55;
        rec.employment = "active";
        rec.day_type = actiload::core::DayType::weekday;
        rec.weather = actiload::core::Weather::unknown;
        for (int s = 0; s < actiload::tusdata::kSlotsPerDay; ++s)
            rec.slots[static_cast<std::size_t>(s)] = {"other", false};
        for (int s = start / 10; s < (start + duration) / 10; ++s)
            rec.slots[static_cast<std::size_t>(s)] = {"work", false};
        records.push_back(std::move(rec));
    }
    return records;
}

} // namespace testfix
