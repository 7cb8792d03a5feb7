// SPDX-License-Identifier: Apache-2.0
#include "actiload/activity/task.hpp"

namespace actiload::activity {

PriorityParams PriorityParams::from_config(const core::ConfigSection& s) {
    PriorityParams p;
    p.in_period_factor = s.get_double_or("in_period_factor", p.in_period_factor);
    p.out_of_period_factor = s.get_double_or("out_of_period_factor", p.out_of_period_factor);
    p.inertia_bonus = s.get_double_or("inertia_bonus", p.inertia_bonus);
    p.collective_weight = s.get_double_or("collective_weight", p.collective_weight);
    p.pressure_weight = s.get_double_or("pressure_weight", p.pressure_weight);
    return p;
}

bool HouseholdView::co_member_active(std::uint16_t code, int agent_index) const {
    for (std::size_t a = 0; a < agents.size(); ++a) {
        if (static_cast<int>(a) == agent_index)
            continue;
        int cur = agents[a].current;
        if (cur >= 0 && instances[static_cast<std::size_t>(cur)].code == code)
            return true;
    }
    return false;
}

int HouseholdView::in_period_competitors(int agent_index, int task_index,
                                         int minute_of_day) const {
    const AgentState& agent = agents[static_cast<std::size_t>(agent_index)];
    int count = 0;
    for (std::size_t i = 0; i < instances.size(); ++i) {
        if (static_cast<int>(i) == task_index)
            continue;
        const TaskInstance& t = instances[i];
        if (agent_can_select(agent, agent_index, t) && t.in_preferred_period(minute_of_day))
            ++count;
    }
    return count;
}

PriorityScore compute_priority(const AgentState& agent, int agent_index, int task_index,
                               const SimulationClock& clock, const HouseholdView& view,
                               const PriorityParams& params) {
    const TaskInstance& task = view.instances[static_cast<std::size_t>(task_index)];
    bool is_current = agent.current == task_index;
    bool co_active = view.co_member_active(task.code, agent_index);
    int competitors = view.in_period_competitors(agent_index, task_index, clock.minute_of_day);
    return priority_components(task, is_current, co_active, competitors, clock.minute_of_day,
                               params);
}

int select_task(const AgentState& agent, int agent_index, const SimulationClock& clock,
                const HouseholdView& view, const PriorityParams& params) {
    int best = -1;
    double best_value = 0.0;
    int best_pp_end = 0;
    for (std::size_t i = 0; i < view.instances.size(); ++i) {
        const TaskInstance& t = view.instances[i];
        if (!view.agent_can_select(agent, agent_index, t))
            continue;
        PriorityScore s = compute_priority(agent, agent_index, static_cast<int>(i), clock, view,
                                           params);
        bool better = best < 0 || s.value > best_value ||
                      (s.value == best_value && t.pp_end < best_pp_end);
        if (better) {
            best = static_cast<int>(i);
            best_value = s.value;
            best_pp_end = t.pp_end;
        }
    }
    return best;
}

} // namespace actiload::activity
