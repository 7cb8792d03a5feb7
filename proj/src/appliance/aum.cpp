// SPDX-License-Identifier: Apache-2.0
#include "actiload/appliance/aum.hpp"

#include <algorithm>
#include <cmath>

namespace actiload::appliance {

PowerSegment realize_forced(int executed_minutes, double watts) {
    if (executed_minutes < 0)
        throw ApplianceError("realize_forced: negative duration");
    return PowerSegment{0, executed_minutes, watts};
}

std::vector<int> fractional_on_minutes(int duration_minutes, double fraction, int burst_minutes,
                                       core::RngStream& rng) {
    if (duration_minutes < 1)
        return {};
    if (fraction <= 0.0 || fraction > 1.0)
        throw ApplianceError("fractional_on_minutes: fraction outside (0, 1]");
    if (burst_minutes < 1)
        throw ApplianceError("fractional_on_minutes: burst below one minute");

    int on_total = static_cast<int>(std::llround(fraction * duration_minutes));
    on_total = std::min(on_total, duration_minutes);
    if (on_total <= 0)
        return {};
    if (on_total == duration_minutes) {
        std::vector<int> all(static_cast<std::size_t>(duration_minutes));
        for (int i = 0; i < duration_minutes; ++i)
            all[static_cast<std::size_t>(i)] = i;
        return all;
    }

    std::vector<int> lengths;
    if (duration_minutes < burst_minutes) {
        lengths.push_back(on_total);
    } else {
        for (int i = 0; i < on_total / burst_minutes; ++i)
            lengths.push_back(burst_minutes);
        if (on_total % burst_minutes)
            lengths.push_back(on_total % burst_minutes);
    }

    // Distribute the free space: k sorted draws carve the slack into gaps
    // before each burst.
    const int free_minutes = duration_minutes - on_total;
    std::vector<int> cuts(lengths.size());
    for (auto& c : cuts)
        c = rng.next_int(0, free_minutes);
    std::sort(cuts.begin(), cuts.end());

    std::vector<int> on;
    on.reserve(static_cast<std::size_t>(on_total));
    int pos = 0;
    int prev_cut = 0;
    for (std::size_t b = 0; b < lengths.size(); ++b) {
        pos += cuts[b] - prev_cut;
        prev_cut = cuts[b];
        for (int i = 0; i < lengths[b]; ++i)
            on.push_back(pos++);
    }
    return on;
}

std::vector<PowerSegment> realize_cycle(const CycleProfile& profile, int start_min) {
    std::vector<PowerSegment> out;
    int at = start_min;
    for (const auto& phase : profile.phases) {
        if (phase.minutes <= 0)
            continue;
        out.push_back(PowerSegment{at, phase.minutes, phase.watts});
        at += phase.minutes;
    }
    return out;
}

} // namespace actiload::appliance
