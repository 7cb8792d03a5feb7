// SPDX-License-Identifier: Apache-2.0
#include "actiload/appliance/dhw.hpp"

#include <algorithm>
#include <cmath>

namespace actiload::appliance {

double dhw_step(DhwState& state, const DhwConfig& cfg, double draw_liters, int minute_of_day) {
    const double tank_heat_capacity_j_per_k = kWaterHeatJPerLK * cfg.tank_liters;

    if (draw_liters > 0.0) {
        // Hot volume needed to deliver the draw at shower temperature after
        // mixing with inlet water; a cool tank just delivers what it has.
        double hot_liters = draw_liters;
        if (state.temp_c > cfg.shower_temp_c && state.temp_c > cfg.inlet_c) {
            hot_liters = draw_liters * (cfg.shower_temp_c - cfg.inlet_c) /
                         (state.temp_c - cfg.inlet_c);
            hot_liters = std::clamp(hot_liters, 0.0, draw_liters);
        }
        double removed_j = hot_liters * kWaterHeatJPerLK * (state.temp_c - cfg.inlet_c);
        state.draw_j += removed_j;
        state.temp_c -= removed_j / tank_heat_capacity_j_per_k;
    }

    // Heater decision on the post-draw temperature; losses accrue either way.
    const bool heat = cfg.heating_allowed(minute_of_day) && state.temp_c < cfg.setpoint_c;

    double loss_j = cfg.loss_ua_w_per_k * (state.temp_c - cfg.ambient_c) * 60.0;
    state.loss_j += loss_j;
    state.temp_c -= loss_j / tank_heat_capacity_j_per_k;

    double heater_w = 0.0;
    if (heat) {
        double in_j = cfg.heater_w * 60.0;
        state.heater_j += in_j;
        state.temp_c += in_j / tank_heat_capacity_j_per_k;
        heater_w = cfg.heater_w;
    }
    return heater_w;
}

double shower_probability(int quota_left, double expected_remaining_tasks, bool suppressed) {
    if (suppressed || quota_left <= 0)
        return 0.0;
    if (expected_remaining_tasks < 1.0)
        expected_remaining_tasks = 1.0;
    return std::min(1.0, static_cast<double>(quota_left) / expected_remaining_tasks);
}

double DhwBalance::relative_error() const {
    double scale = std::max({std::abs(heater_wh), std::abs(draw_wh) + std::abs(loss_wh),
                             std::abs(tank_delta_wh), 1.0});
    return std::abs(residual_wh()) / scale;
}

DhwBalance day_balance(const DhwState& state, const DhwConfig& cfg) {
    DhwBalance b;
    b.heater_wh = state.heater_j / 3600.0;
    b.draw_wh = state.draw_j / 3600.0;
    b.loss_wh = state.loss_j / 3600.0;
    b.tank_delta_wh =
        (state.temp_c - state.day_start_temp_c) * kWaterHeatJPerLK * cfg.tank_liters / 3600.0;
    return b;
}

} // namespace actiload::appliance
