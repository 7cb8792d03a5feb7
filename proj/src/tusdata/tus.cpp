// SPDX-License-Identifier: Apache-2.0
#include "actiload/tusdata/tus.hpp"

#include <algorithm>
#include <map>

#include "actiload/core/config.hpp"
#include "actiload/core/csv.hpp"

namespace actiload::tusdata {

std::vector<TusRecord> parse_tus(const std::string& path) {
    core::CsvReader reader(path);
    std::vector<std::string> f;
    if (!reader.next(f))
        throw TusError(path + ": empty file");
    const std::vector<std::string> expected = {"respondent_id", "gender",     "age",
                                               "employment",    "day_type",   "weather",
                                               "slot_index",    "activity",   "who_present"};
    if (f != expected)
        throw TusError(path + ":1: bad header (expected respondent_id,gender,age,employment,"
                              "day_type,weather,slot_index,activity,who_present)");

    struct PartialDiary {
        TusRecord record;
        std::vector<bool> filled = std::vector<bool>(kSlotsPerDay, false);
        int order = 0;
    };
    std::map<std::pair<std::string, std::string>, PartialDiary> diaries;
    int order = 0;

    while (reader.next(f)) {
        const std::string where = path + ":" + std::to_string(reader.line());
        if (f.size() != 9)
            throw TusError(where + ": expected 9 columns, got " + std::to_string(f.size()));
        int slot;
        try {
            slot = core::parse_int(f[6], where + " slot_index");
        } catch (const core::ConfigError& e) {
            throw TusError(e.what());
        }
        if (slot < 0 || slot >= kSlotsPerDay)
            throw TusError(where + ": slot_index " + std::to_string(slot) + " outside 0..143");

        auto key = std::make_pair(f[0], f[4]);
        auto it = diaries.find(key);
        if (it == diaries.end()) {
            PartialDiary pd;
            pd.record.respondent_id = f[0];
            pd.record.gender = f[1];
            try {
                pd.record.age = core::parse_int(f[2], where + " age");
                pd.record.day_type = core::day_type_from_string(f[4]);
                pd.record.weather = core::weather_from_string(f[5]);
            } catch (const std::invalid_argument& e) {
                throw TusError(where + ": " + e.what());
            } catch (const core::ConfigError& e) {
                throw TusError(e.what());
            }
            if (pd.record.age < 0)
                throw TusError(where + ": negative age");
            pd.record.employment = f[3];
            pd.order = order++;
            it = diaries.emplace(key, std::move(pd)).first;
        }
        PartialDiary& pd = it->second;
        if (pd.filled[static_cast<std::size_t>(slot)])
            throw TusError(where + ": duplicate slot " + std::to_string(slot) + " for respondent '" +
                           f[0] + "'");
        if (f[8] != "alone" && f[8] != "with_others")
            throw TusError(where + ": who_present must be 'alone' or 'with_others'");
        pd.record.slots[static_cast<std::size_t>(slot)] =
            DiarySlot{f[7], f[8] == "with_others"};
        pd.filled[static_cast<std::size_t>(slot)] = true;
    }

    std::vector<const PartialDiary*> ordered;
    ordered.reserve(diaries.size());
    for (const auto& [key, pd] : diaries) {
        (void)key;
        ordered.push_back(&pd);
    }
    std::sort(ordered.begin(), ordered.end(),
              [](const PartialDiary* a, const PartialDiary* b) { return a->order < b->order; });

    std::vector<TusRecord> out;
    out.reserve(ordered.size());
    for (const PartialDiary* pd : ordered) {
        std::string missing;
        int n_missing = 0;
        for (int s = 0; s < kSlotsPerDay; ++s) {
            if (!pd->filled[static_cast<std::size_t>(s)]) {
                if (++n_missing <= 8) {
                    if (!missing.empty())
                        missing += ' ';
                    missing += std::to_string(s);
                }
            }
        }
        if (n_missing > 0)
            throw TusError(path + ": incomplete diary for respondent '" + pd->record.respondent_id +
                           "' (" + core::to_string(pd->record.day_type) + "): " +
                           std::to_string(n_missing) + " missing slots [" + missing +
                           (n_missing > 8 ? " ..." : "") + "]");
        out.push_back(pd->record);
    }
    return out;
}

std::vector<Episode> extract_episodes(const TusRecord& record, const std::string& activity) {
    std::vector<Episode> out;
    int run_start = -1;
    for (int s = 0; s <= kSlotsPerDay; ++s) {
        bool match = s < kSlotsPerDay && record.slots[static_cast<std::size_t>(s)].activity == activity;
        if (match && run_start < 0) {
            run_start = s;
        } else if (!match && run_start >= 0) {
            Episode ep;
            ep.start_min = run_start * kSlotMinutes;
            ep.duration_min = (s - run_start) * kSlotMinutes;
            ep.weather = record.weather;
            // An episode counts as collective if any of its slots was shared.
            ep.with_others = false;
            for (int k = run_start; k < s; ++k)
                ep.with_others = ep.with_others || record.slots[static_cast<std::size_t>(k)].with_others;
            out.push_back(ep);
            run_start = -1;
        }
    }
    return out;
}

} // namespace actiload::tusdata
