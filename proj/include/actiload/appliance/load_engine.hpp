// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <map>

#include "actiload/activity/simulation.hpp"
#include "actiload/appliance/appliance.hpp"
#include "actiload/appliance/dhw.hpp"

namespace actiload::appliance {

// Resolved probability-of-use cube: most specific rule wins; among rules of
// equal specificity the later one in the catalog overrides.
class PuResolver {
public:
    PuResolver(const ApplianceCatalog& catalog, const activity::ActivityCodebook& codes);

    double prob(std::uint16_t code, int model, core::Season season, core::DayType day_type,
                int band) const {
        std::size_t idx = (((static_cast<std::size_t>(code) * n_models_ +
                             static_cast<std::size_t>(model)) *
                                4 +
                            static_cast<std::size_t>(season)) *
                               3 +
                           static_cast<std::size_t>(day_type)) *
                              n_bands_ +
                          static_cast<std::size_t>(band);
        return cube_[idx];
    }

private:
    std::size_t n_models_ = 0;
    std::size_t n_bands_ = 0;
    std::vector<double> cube_;
};

// Per-worker accumulation in integer milliwatts, so merged totals are
// identical for any worker count and household order.
struct LoadAccumulator {
    int minutes = 0;
    std::size_t n_categories = 0;
    std::vector<std::int64_t> total_mw;    // [minute], summed over dwellings
    std::vector<std::int64_t> category_mw; // [minute][category]

    void init(int minutes_, std::size_t n_categories_) {
        minutes = minutes_;
        n_categories = n_categories_;
        total_mw.assign(static_cast<std::size_t>(minutes), 0);
        category_mw.assign(static_cast<std::size_t>(minutes) * n_categories, 0);
    }
    void add_from(const LoadAccumulator& other);
};

struct ShowerEvent {
    std::int32_t day = 0;
    std::int16_t minute_of_day = 0;
    std::int32_t household = 0;
    std::int32_t individual = 0;
};

struct DhwDayRecord {
    std::int32_t dwelling = 0;
    std::int32_t day = 0;
    DhwBalance balance;
};

// Immutable run-wide context shared by all workers' engines.
struct LoadContext {
    const ApplianceCatalog* catalog = nullptr;
    const popsynth::Population* population = nullptr;
    const activity::ActivityCodebook* codes = nullptr;
    std::uint64_t seed = 1;
    PuResolver pu;
    std::vector<std::uint8_t> is_hygiene_code;            // per activity code
    std::map<std::string, std::array<double, 7>> hygiene_rest_by_type;
    // Unsuppressed share of a preferred period under the no-shower windows.
    double shower_weight(int pp_start, int pp_end) const;
    std::vector<std::vector<std::int64_t>> cycle_minute_mw; // per model, per minute
    std::vector<std::string> category_names;               // models + baseline + dhw
    std::size_t baseline_category = 0;
    std::size_t dhw_category = 0;
    std::string dhw_ownership_category = "water_heater";

    LoadContext(const ApplianceCatalog& cat, const popsynth::Population& pop,
                const activity::ActivityCodebook& codebook, const tusdata::TaskCatalog& tasks,
                std::uint64_t seed);
};

// One engine per worker; reset per household via begin_household. Implements
// the activity MinuteSink: draws activations at task starts, advances cycle
// programs on the wall clock, meters the tank, and accumulates dwelling power.
class LoadEngine final : public activity::MinuteSink {
public:
    LoadEngine(const LoadContext& ctx, LoadAccumulator* accumulator,
               std::vector<std::vector<ShowerEvent>>* shower_slots,
               std::vector<std::vector<DhwDayRecord>>* dhw_slots,
               std::vector<std::vector<std::int64_t>>* dwelling_curves_mw);

    void begin_household(int household_index);
    void finish(); // flush the last household's tail records

    void on_task_start(const activity::SimulationClock& clock,
                       std::span<const activity::TaskInstance> instances, int instance_index,
                       int undone_same_code_for_owner) override;
    void on_minute(const activity::SimulationClock& clock,
                   std::span<const activity::MinuteSink::Exec> executing,
                   std::span<const activity::TaskInstance> instances) override;

private:
    struct FractionalRun {
        int appliance = 0;
        std::int64_t mw = 0;
        std::vector<int> on_minutes;
        std::size_t cursor = 0;
    };
    struct Attachment {
        std::vector<std::pair<int, std::int64_t>> forced; // appliance, mW
        std::vector<FractionalRun> fractional;
        bool any = false;
    };
    struct ActiveCycle {
        int appliance = 0;
        int model = 0;
        std::int64_t start_abs = 0;
    };

    void roll_day(const activity::SimulationClock& clock);
    void flush_dhw_day(int day);

    const LoadContext* ctx_;
    LoadAccumulator* acc_;
    std::vector<std::vector<ShowerEvent>>* shower_slots_;
    std::vector<std::vector<DhwDayRecord>>* dhw_slots_;
    std::vector<std::vector<std::int64_t>>* dwelling_curves_;

    int household_ = -1;
    std::vector<int> appl_model_;            // per owned appliance instance
    std::vector<std::int64_t> appl_power_mw_;
    std::vector<std::int64_t> appl_standby_mw_;
    std::vector<std::int64_t> appl_busy_until_;
    std::vector<std::uint8_t> appl_active_;
    std::vector<std::int64_t> baseline_mw_by_band_;
    std::vector<Attachment> attachments_;
    std::vector<ActiveCycle> cycles_;
    std::vector<std::pair<int, double>> draws_; // remaining minutes, liters/min
    std::vector<int> member_quota_;
    std::vector<std::string> member_types_;
    std::vector<std::int32_t> member_ids_;
    bool has_dhw_ = false;
    DhwState dhw_;
    int last_day_ = -1;
    std::int64_t last_week_ = -1;
};

} // namespace actiload::appliance
