// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "actiload/core/date.hpp"
#include "actiload/popsynth/population.hpp"

namespace actiload::tusdata {

struct TusError : std::runtime_error {
    explicit TusError(const std::string& msg) : std::runtime_error(msg) {}
};

inline constexpr int kSlotsPerDay = 144; // 10-minute diary grid
inline constexpr int kSlotMinutes = 10;

struct DiarySlot {
    std::string activity;
    bool with_others = false;
};

// One diary day: a respondent's attributes plus 144 ten-minute slots.
struct TusRecord {
    std::string respondent_id;
    std::string gender;
    int age = 0;
    std::string employment;
    core::DayType day_type = core::DayType::weekday;
    core::Weather weather = core::Weather::unknown;
    std::array<DiarySlot, kSlotsPerDay> slots;

    std::string type_key(const popsynth::AgeBands& bands) const {
        return popsynth::individual_type_key(gender, age, employment, bands);
    }
};

// CSV schema, one row per diary slot:
//   respondent_id,gender,age,employment,day_type,weather,slot_index,activity,who_present
// slot_index 0..143; who_present is "alone" or "with_others". Rows for one
// (respondent, day_type) diary may be interleaved with other respondents but
// each diary must cover all 144 slots.
std::vector<TusRecord> parse_tus(const std::string& path);

struct Episode {
    int start_min = 0;    // minute of day, multiple of 10
    int duration_min = 0; // multiple of 10
    bool with_others = false;
    core::Weather weather = core::Weather::unknown;

    int end_min() const { return start_min + duration_min; }
};

// Maximal runs of consecutive identical activity codes.
std::vector<Episode> extract_episodes(const TusRecord& record, const std::string& activity);

} // namespace actiload::tusdata
