// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "actiload/core/config.hpp"
#include "actiload/core/date.hpp"

namespace actiload::appliance {

struct ApplianceError : std::runtime_error {
    explicit ApplianceError(const std::string& msg) : std::runtime_error(msg) {}
};

// Daily time-of-day bands used by PU tables and composite baselines.
struct TimeBands {
    std::vector<int> starts;        // ascending, starts[0] == 0
    std::vector<std::string> names; // same length

    static TimeBands defaults(); // 00-07, 07-11, 11-14, 14-18, 18-24
    int band_of(int minute_of_day) const {
        int band = 0;
        for (std::size_t i = 0; i < starts.size(); ++i)
            if (minute_of_day >= starts[i])
                band = static_cast<int>(i);
        return band;
    }
    int index_of(const std::string& name) const {
        for (std::size_t i = 0; i < names.size(); ++i)
            if (names[i] == name)
                return static_cast<int>(i);
        return -1;
    }
};

struct CyclePhase {
    int minutes = 0;
    double watts = 0.0;
};

// Fixed program; its length never depends on the triggering task.
struct CycleProfile {
    std::vector<CyclePhase> phases;

    int total_minutes() const {
        int total = 0;
        for (const auto& p : phases)
            total += p.minutes;
        return total;
    }
    double energy_wh() const {
        double wh = 0.0;
        for (const auto& p : phases)
            wh += p.watts * p.minutes / 60.0;
        return wh;
    }
};

enum class AumKind : std::uint8_t { forced = 0, fractional = 1, cycle = 2 };

struct ApplianceModel {
    std::string category;
    AumKind kind = AumKind::forced;
    double unit_power_w = 0.0; // forced / fractional operating power
    double standby_w = 0.0;
    double fraction = 1.0;    // fractional: share of the task spent running
    int burst_minutes = 5;    // fractional burst length
    CycleProfile cycle;

    void validate() const;
};

// Probability-of-use rule; season / day type / band may be wildcards.
struct PuRule {
    std::string activity;
    std::string appliance;
    double probability = 0.0;
    int season = -1;   // core::Season or -1 for any
    int day_type = -1; // core::DayType or -1
    int band = -1;     // TimeBands index or -1
};

// Minor appliances grouped behind a shared time-varying baseline.
struct CompositeDef {
    std::string name;
    std::vector<std::string> members;        // appliance categories
    std::vector<double> baseline_w_by_band;  // one value per time band
};

struct DhwConfig {
    bool present = false;
    double tank_liters = 200.0;
    double setpoint_c = 55.0;
    double inlet_c = 12.0;
    double ambient_c = 20.0;
    double heater_w = 2400.0;
    double loss_ua_w_per_k = 1.7;
    std::vector<std::pair<int, int>> windows; // heater allowed in [start, end)
    int showers_per_week = 5;
    double shower_liters = 40.0;
    double shower_temp_c = 40.0;
    int shower_minutes = 6;
    std::vector<std::pair<int, int>> no_shower_windows; // eco-behavior transform

    bool heating_allowed(int minute_of_day) const {
        for (const auto& [s, e] : windows)
            if (minute_of_day >= s && minute_of_day < e)
                return true;
        return false;
    }
    bool shower_suppressed(int minute_of_day) const {
        for (const auto& [s, e] : no_shower_windows)
            if (minute_of_day >= s && minute_of_day < e)
                return true;
        return false;
    }
    void validate() const;
};

struct ApplianceCatalog {
    TimeBands bands = TimeBands::defaults();
    std::vector<ApplianceModel> models;
    std::vector<PuRule> pu_rules;
    std::vector<CompositeDef> composites;
    DhwConfig dhw;
    std::vector<std::string> hygiene_activities = {"hygiene"};
    std::vector<std::string> cooking_categories; // reporting group

    int model_index(const std::string& category) const {
        for (std::size_t i = 0; i < models.size(); ++i)
            if (models[i].category == category)
                return static_cast<int>(i);
        return -1;
    }
    void validate() const;
};

ApplianceCatalog load_appliance_catalog(const std::string& path);
ApplianceCatalog parse_appliance_catalog(const std::string& text, const std::string& origin);
void save_appliance_catalog(const ApplianceCatalog& catalog, const std::string& path);

// Power series in watts; native resolution is one minute.
struct LoadCurve {
    core::Date start_date{2026, 1, 5};
    int start_minute = 0; // minute of day at the first sample
    int step_minutes = 1;
    std::vector<double> values_w;

    void validate() const;
};

// Mean across aligned curves, per timestep.
LoadCurve aggregate_load(std::span<const LoadCurve> curves);

// Average consecutive samples into a coarser step (e.g. 1 -> 30 minutes).
LoadCurve reduce_resolution(const LoadCurve& curve, int step_minutes);

void save_load_curve(const LoadCurve& curve, const std::string& path);
LoadCurve load_load_curve(const std::string& path);

} // namespace actiload::appliance
