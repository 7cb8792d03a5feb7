// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "actiload/appliance/appliance.hpp"
#include "actiload/core/rng.hpp"

namespace actiload::appliance {

struct PowerSegment {
    int start_min = 0; // relative to the realization origin
    int minutes = 0;
    double watts = 0.0;

    double energy_wh() const { return watts * minutes / 60.0; }
};

// Forced use: the appliance runs for every executed minute of the task. The
// segment follows executed minutes, so a suspended task yields one segment
// per execution stretch.
PowerSegment realize_forced(int executed_minutes, double watts);

// Fractional use: round(fraction * duration) minutes on, split into bursts of
// burst_minutes (the last possibly shorter), placed uniformly at random
// without overlap across the task span. Returns the 0-based executed-minute
// indices that are on, sorted ascending. A task shorter than one burst gets a
// single burst of the rounded on-time.
std::vector<int> fractional_on_minutes(int duration_minutes, double fraction, int burst_minutes,
                                       core::RngStream& rng);

// Cycle use: the program runs phase after phase from its start minute and
// always completes, regardless of what the triggering task does.
std::vector<PowerSegment> realize_cycle(const CycleProfile& profile, int start_min);

} // namespace actiload::appliance
