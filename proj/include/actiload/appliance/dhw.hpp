// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "actiload/appliance/appliance.hpp"

namespace actiload::appliance {

// Specific heat of water, J/(kg.K); one liter weighs one kilogram here.
inline constexpr double kWaterHeatJPerLK = 4186.0;

// Mixed tank state with per-day energy bookkeeping (joules).
struct DhwState {
    double temp_c = 55.0;
    double heater_j = 0.0;
    double draw_j = 0.0;
    double loss_j = 0.0;
    double day_start_temp_c = 55.0;

    void start_day() {
        heater_j = draw_j = loss_j = 0.0;
        day_start_temp_c = temp_c;
    }
};

// One-minute tank update: the draw mixes inlet water in, standing losses pull
// toward ambient, and the heater runs at full power during a heating window
// while below the setpoint. Returns the heater power for this minute.
double dhw_step(DhwState& state, const DhwConfig& cfg, double draw_liters, int minute_of_day);

// Shower probability at a hygiene-task start: remaining weekly quota over the
// expected number of hygiene tasks left this week, clamped to [0, 1]; zero
// while a no-shower window suppresses it.
double shower_probability(int quota_left, double expected_remaining_tasks, bool suppressed);

// Energy closure for one day: heater input minus draws, losses and the tank's
// enthalpy change, relative to turnover.
struct DhwBalance {
    double heater_wh = 0.0;
    double draw_wh = 0.0;
    double loss_wh = 0.0;
    double tank_delta_wh = 0.0;

    double residual_wh() const { return heater_wh - draw_wh - loss_wh - tank_delta_wh; }
    double relative_error() const;
};

DhwBalance day_balance(const DhwState& state, const DhwConfig& cfg);

} // namespace actiload::appliance
