// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "actiload/core/rng.hpp"
#include "actiload/tusdata/tus.hpp"

namespace actiload::tusdata {

// Coverage parameter: the duration / period bands must contain at least X%
// of the observed data, centred on the mean.
struct VariabilityParam {
    double x = 90.0;

    void validate() const {
        if (x <= 0.0 || x > 100.0)
            throw TusError("variability X must be in (0, 100], got " + std::to_string(x));
    }
};

// Band over integer observations: the smallest window [mean-delta, mean+delta]
// with delta on the 10-minute grid that covers at least X% of the values,
// reported as [lowest, highest] observed value inside the window.
struct Band {
    int lo = 0;
    int hi = 0;
    double mean = 0.0;
    int delta = 0;
};

Band x_band(std::span<const int> values, double x_percent);

// Per-(activity, day type, individual type) extracted task description.
enum class HouseholdRule : std::uint8_t {
    none = 0,        // personal task, one per individual
    shared = 1,      // one instance per household per repetition, any adult
    size_weekly = 2, // weekly count = ceil(household size / 2), any adult
};

struct TaskSpec {
    std::string activity;
    core::DayType day_type = core::DayType::weekday;
    std::string type_key;      // individual type, "*" = any
    int pp_start = 0;          // preferred period [start, end) in minutes of day
    int pp_end = core::kMinutesPerDay;
    int min_duration = 10;     // minutes
    int max_duration = 10;
    double freq_per_day = 1.0; // mean repetitions per diary day
    double freq_per_week = 7.0;
    double collectivity = 0.0; // duration-weighted share done with others
    double weather_mult[3] = {1.0, 1.0, 1.0}; // indexed by core::Weather
    HouseholdRule household_rule = HouseholdRule::none;
    bool fallback = false;     // derived from a parent segmentation

    bool household_level() const { return household_rule != HouseholdRule::none; }
    void validate() const;
};

struct ExtractOptions {
    VariabilityParam x{90.0};
    int min_episodes = 5;
    popsynth::AgeBands bands = popsynth::AgeBands::default_bands();
    std::map<std::string, HouseholdRule> household_rules; // activity -> rule
};

// Extraction over the diaries matching (day_type, type_key); below
// min_episodes the segmentation widens: first any employment, then any age
// band, then any individual of that day type, and the result is flagged.
TaskSpec extract_task_spec(std::span<const TusRecord> records, const std::string& activity,
                           core::DayType day_type, const std::string& type_key,
                           const ExtractOptions& opt);

// Duration-weighted share of episodes performed with others.
double compute_collectivity(std::span<const TusRecord> records, const std::string& activity);

// Mean-duration ratio per weather category; all 1.0 when only one category
// is observed.
std::map<core::Weather, double> compute_weather_multipliers(std::span<const TusRecord> records,
                                                            const std::string& activity);

struct TaskCatalog {
    std::vector<TaskSpec> specs;

    // Specs applying to (type_key, day_type): exact type matches plus "*"
    // entries; when the exact type has no personal specs, the nearest parent
    // segmentation is used (any employment, then any type).
    std::vector<const TaskSpec*> specs_for(const std::string& type_key,
                                           core::DayType day_type) const;
    // Household-level specs matching any member type, deduplicated.
    std::vector<const TaskSpec*> household_specs_for(std::span<const std::string> member_types,
                                                     core::DayType day_type) const;
    std::set<std::string> activities() const;
    void validate() const;
};

// Whole-catalog extraction across observed (type, activity, day type) cells.
TaskCatalog extract_catalog(std::span<const TusRecord> records, const ExtractOptions& opt);

void save_catalog(const TaskCatalog& catalog, const std::string& path);
TaskCatalog load_catalog(const std::string& path);

// One day's worth of task templates for an individual type.
struct AssignmentTemplate {
    const TaskSpec* spec = nullptr;
    int count = 1;
};

struct DayInfo {
    int day_of_week = 0; // 0 = Monday
    core::DayType day_type = core::DayType::weekday;
};

// Daily tasks: frequency rounded stochastically. Tasks rarer than daily are
// drawn as weekly counts and placed on seeded days of the week, so a task
// with frequency f < 1/day appears on round(7f) days drawn for this week.
std::vector<AssignmentTemplate> generate_daily_assignment(const std::string& type_key,
                                                          const DayInfo& day,
                                                          const TaskCatalog& catalog,
                                                          core::RngStream& day_rng,
                                                          core::RngStream& week_rng);

} // namespace actiload::tusdata
