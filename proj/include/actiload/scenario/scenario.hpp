// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "actiload/sim/pipeline.hpp"

namespace actiload::scenario {

struct ScenarioError : std::runtime_error {
    explicit ScenarioError(const std::string& msg) : std::runtime_error(msg) {}
};

struct TimeWindow {
    int start = 0;
    int end = 0; // [start, end)
    bool contains(int minute) const { return minute >= start && minute < end; }
};

struct PeakWindows {
    std::vector<TimeWindow> windows;

    static PeakWindows defaults(); // 08:00-13:00 and 18:00-20:00
    bool contains(int minute) const {
        for (const auto& w : windows)
            if (w.contains(minute))
                return true;
        return false;
    }
    void validate() const; // in-day, non-overlapping
};

enum class BehaviorKind : std::uint8_t { cooking_shift = 0, no_shower_peak = 1 };

struct EcoBehavior {
    BehaviorKind kind = BehaviorKind::cooking_shift;
    PeakWindows windows = PeakWindows::defaults();
    int max_shift_min = 45;        // cooking shift cap
    double compliance = 1.0;       // fraction of households applying it
    int chain_threshold_min = 30;  // eating follows cooking when this close

    void validate() const;
};

// Activity codes grouped into reporting categories (idle is implicit).
struct CategoryMap {
    std::vector<std::string> categories;
    std::map<std::string, int> code_to_category;

    static CategoryMap from_config(const core::ConfigDoc& doc);
    static CategoryMap load(const std::string& path);
    int index_of(const std::string& category) const;
    // Every codebook name must be mapped; throws listing the missing codes.
    void check_covers(const activity::ActivityCodebook& codes) const;
};

struct ShiftRecord {
    std::size_t spec_index = 0;
    int delta_min = 0;
};

// Catalog transform for the cooking-shift behavior, plus the per-household
// compliance draw. Complying households use `shifted`; the rest keep `base`.
struct ShiftedCatalogs {
    tusdata::TaskCatalog shifted;
    std::vector<std::uint8_t> complies;
    std::vector<ShiftRecord> shifts;

    activity::CatalogProvider provider(const tusdata::TaskCatalog& base) const {
        return [this, &base](int household) -> const tusdata::TaskCatalog& {
            return complies[static_cast<std::size_t>(household)] ? shifted : base;
        };
    }
};

// Moves cooking preferred periods out of the peak windows, at most
// max_shift_min toward the nearer window edge (residual overlap allowed);
// eating tasks chained within chain_threshold_min shift along.
ShiftedCatalogs apply_cooking_shift(const tusdata::TaskCatalog& base, const EcoBehavior& behavior,
                                    const CategoryMap& categories, int n_households,
                                    std::uint64_t seed);

// Zeroes the shower probability for hygiene tasks starting inside the
// windows; the weekly quota is left unchanged.
void apply_no_shower_peak(appliance::DhwConfig& dhw, const EcoBehavior& behavior);

struct ActivityRateReport {
    int minutes = 0;
    std::vector<std::string> categories; // reporting categories plus "idle"
    std::vector<double> fractions;       // [minute][category], rows sum to 1

    double at(int minute, int category) const {
        return fractions[static_cast<std::size_t>(minute) * categories.size() +
                         static_cast<std::size_t>(category)];
    }
};

ActivityRateReport activity_rates(const activity::ActivityResult& result,
                                  const CategoryMap& categories);

// Paired-run deltas (scenario minus baseline), averaged per minute of day.
struct DeltaReport {
    int n_days = 0;
    std::vector<std::string> categories;        // reporting categories + idle
    std::vector<double> fraction_delta;         // [minute_of_day][category]
    std::vector<double> power_delta_w;          // mean W per dwelling
    std::vector<double> cooking_power_base_w;   // per minute of day
    std::vector<double> cooking_power_scen_w;
    double max_power_gain_w = 0.0;              // largest in-window reduction
    double window_energy_delta_wh = 0.0;        // total power, inside windows
    double cooking_daily_base_wh = 0.0;         // cooking appliances, per dwelling-day
    double cooking_daily_scen_wh = 0.0;
    double cooking_window_base_wh = 0.0;
    double cooking_window_scen_wh = 0.0;
    double energy_dropped_wh = 0.0;             // cooking energy lost per dwelling-day
    double energy_displaced_wh = 0.0;           // cooking energy moved out of windows
};

DeltaReport compare_runs(const sim::RunOutput& baseline, const sim::RunOutput& scenario,
                         const PeakWindows& windows, const CategoryMap& categories,
                         std::span<const std::string> cooking_appliances);

void save_activity_rates(const ActivityRateReport& report, const std::string& path);
void save_delta_report(const DeltaReport& report, const std::string& path_prefix);

} // namespace actiload::scenario
