// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "actiload/activity/clock.hpp"
#include "actiload/tusdata/taskspec.hpp"

namespace actiload::activity {

enum class TaskState : std::uint8_t { pending = 0, ongoing = 1, done = 2, abandoned = 3 };

// A task drawn for one day, owned by an agent or shared by the household.
struct TaskInstance {
    const tusdata::TaskSpec* spec = nullptr;
    std::uint16_t code = 0;   // interned activity code
    int pp_start = 0;
    int pp_end = core::kMinutesPerDay;
    int min_duration = 10;
    int max_duration = 10;
    int chosen_duration = 10; // drawn in [min, max], weather-adjusted then clamped
    int elapsed = 0;          // executed minutes so far
    TaskState state = TaskState::pending;
    int owner = -1;           // agent index in household; -1 = household-level
    std::uint16_t performers = 0; // bitmask of agents executing right now
    bool started = false;     // has emitted its start event

    bool selectable() const {
        return state == TaskState::pending || state == TaskState::ongoing;
    }
    bool in_preferred_period(int minute_of_day) const {
        return minute_of_day >= pp_start && minute_of_day < pp_end;
    }
    int remaining_min_duration() const {
        int rem = min_duration - elapsed;
        return rem > 0 ? rem : 0;
    }
};

struct AgentState {
    int individual_index = -1; // into the population's individual table
    std::string type_key;
    bool adult = false; // may execute household-level tasks
    int current = -1;   // instance index, -1 = idle
    bool idle() const { return current < 0; }
};

// Priority with its factors kept apart for explainability:
//   value = period * (1 + urgency) * (1 + inertia) * (1 + collective)
//           / (1 + pressure)
struct PriorityScore {
    double value = 0.0;
    double period_factor = 0.0;
    double urgency = 0.0;
    double inertia = 0.0;
    double collective = 0.0;
    double pressure = 0.0;
};

struct PriorityParams {
    double in_period_factor = 1.0;
    double out_of_period_factor = 0.1;
    double inertia_bonus = 0.5;
    double collective_weight = 0.5;
    double pressure_weight = 1.0;

    static PriorityParams from_config(const core::ConfigSection& s);
};

// Priority kernel shared by the public scorer and the scheduler hot path.
inline PriorityScore priority_components(const TaskInstance& task, bool is_current, bool co_active,
                                         int in_period_competitors, int minute_of_day,
                                         const PriorityParams& p) {
    PriorityScore s;
    s.period_factor = task.in_preferred_period(minute_of_day) ? p.in_period_factor
                                                              : p.out_of_period_factor;
    int slack = task.pp_end - minute_of_day - task.remaining_min_duration();
    if (slack < 0)
        slack = 0;
    s.urgency = 1.0 / (1.0 + static_cast<double>(slack));
    s.inertia = is_current ? p.inertia_bonus : 0.0;
    s.collective = co_active ? p.collective_weight * task.spec->collectivity : 0.0;
    s.pressure = p.pressure_weight * static_cast<double>(in_period_competitors);
    s.value = s.period_factor * (1.0 + s.urgency) * (1.0 + s.inertia) * (1.0 + s.collective) /
              (1.0 + s.pressure);
    return s;
}

// Context view for scoring one agent's tasks against the household state.
struct HouseholdView {
    std::span<const TaskInstance> instances;
    std::span<const AgentState> agents;

    // True when another member currently executes the same activity code.
    bool co_member_active(std::uint16_t code, int agent_index) const;
    // Selectable in-period tasks of this agent competing with `task_index`.
    int in_period_competitors(int agent_index, int task_index, int minute_of_day) const;
    bool agent_can_select(const AgentState& agent, int agent_index, const TaskInstance& t) const {
        return t.selectable() && (t.owner == agent_index || (t.owner < 0 && agent.adult));
    }
};

PriorityScore compute_priority(const AgentState& agent, int agent_index, int task_index,
                               const SimulationClock& clock, const HouseholdView& view,
                               const PriorityParams& params);

// Argmax over the agent's selectable tasks; ties resolved by earlier
// preferred-period end, then instance order. Returns -1 when nothing is
// selectable (the agent idles this minute).
int select_task(const AgentState& agent, int agent_index, const SimulationClock& clock,
                const HouseholdView& view, const PriorityParams& params);

} // namespace actiload::activity
