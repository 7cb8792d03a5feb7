// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <memory>

#include "actiload/activity/task.hpp"
#include "actiload/popsynth/population.hpp"

namespace actiload::activity {

// Interned activity codes; trace cells store the code plus a collective bit.
struct ActivityCodebook {
    std::vector<std::string> names;

    static constexpr std::uint8_t kIdle = 0x7F;
    static constexpr std::uint8_t kCollectiveBit = 0x80;

    int index_of(const std::string& name) const {
        for (std::size_t i = 0; i < names.size(); ++i)
            if (names[i] == name)
                return static_cast<int>(i);
        return -1;
    }
    std::uint16_t intern(const std::string& name) {
        int i = index_of(name);
        if (i >= 0)
            return static_cast<std::uint16_t>(i);
        if (names.size() >= 126)
            throw std::runtime_error("activity codebook full (126 codes max)");
        names.push_back(name);
        return static_cast<std::uint16_t>(names.size() - 1);
    }
    static ActivityCodebook from_catalog(const tusdata::TaskCatalog& catalog,
                                         const CalendarOverlay& overlay);
};

enum class TaskEventKind : std::uint8_t {
    start = 0,
    resume = 1,
    suspend = 2,
    complete = 3,       // reached its chosen duration
    truncated_done = 4, // day ended after min duration was met
    abandoned = 5,
};

struct TaskEvent {
    std::int32_t day = 0;
    std::int16_t minute_of_day = 0;
    std::int32_t household = 0;
    std::int16_t agent = -1; // household-level tasks report the acting agent
    TaskEventKind kind = TaskEventKind::start;
    std::uint16_t code = 0;
    std::int16_t elapsed = 0;
    std::int16_t chosen = 0;
    std::int16_t min_duration = 0;
    std::int16_t max_duration = 0;
};

// Observer for appliance realization; called while a household advances.
class MinuteSink {
public:
    struct Exec {
        std::int32_t instance;
        std::int32_t executed_minutes; // 1-based count including this minute
    };

    virtual ~MinuteSink() = default;
    virtual void on_task_start(const SimulationClock& clock, std::span<const TaskInstance> instances,
                               int instance_index, int undone_same_code_for_owner) = 0;
    virtual void on_minute(const SimulationClock& clock, std::span<const Exec> executing,
                           std::span<const TaskInstance> instances) = 0;
};

// Minute-stepped scheduler for one household. Each minute every agent
// replans over its undone tasks; the selection pass runs in fixed member
// order so a member starting an activity raises co-members' scores for the
// same activity within the same minute.
class HouseholdEngine {
public:
    struct Config {
        PriorityParams priority;
        std::uint64_t seed = 1;
        bool record_events = true;
        bool cross_check_selection = false; // test hook: engine vs public argmax
        int trace_stride = 0;               // minutes per agent row in the trace
    };

    HouseholdEngine(int household_index, const popsynth::Population& population,
                    const tusdata::TaskCatalog& catalog, const ActivityCodebook& codes,
                    const Config& config);

    // Finalizes the previous day (truncation / abandonment) and draws the new
    // day's assignments.
    void assign_day(const SimulationClock& midnight);
    // One 1-minute tick: replan, advance, report.
    void step_household(const SimulationClock& clock, MinuteSink* sink, std::uint8_t* trace_row,
                        std::uint32_t* code_minute_counts);
    // Close out unfinished tasks at the end of the run.
    void finalize(const SimulationClock& clock);

    std::span<const TaskInstance> instances() const { return instances_; }
    std::span<const AgentState> agents() const { return agents_; }
    std::vector<TaskEvent>& events() { return events_; }
    int n_agents() const { return static_cast<int>(agents_.size()); }

private:
    int select_fast(int agent_index, const SimulationClock& clock) const;
    void set_current(int agent_index, int instance_index, const SimulationClock& clock,
                     MinuteSink* sink);
    void emit(const SimulationClock& clock, TaskEventKind kind, int agent, const TaskInstance& t);
    void finalize_open_tasks(const SimulationClock& clock);
    int undone_same_code(const TaskInstance& t) const;

    int household_index_;
    const popsynth::Population* population_;
    const tusdata::TaskCatalog* catalog_;
    const ActivityCodebook* codes_;
    Config config_;
    std::vector<AgentState> agents_;
    std::vector<TaskInstance> instances_;
    std::vector<std::uint16_t> performing_count_; // per activity code, this minute
    std::vector<MinuteSink::Exec> execs_;         // per-minute scratch
    std::vector<TaskEvent> events_;
    bool day_open_ = false;
};

struct SimOptions {
    int horizon_days = 1;
    std::uint64_t seed = 1;
    core::Date start_date{2026, 1, 5}; // a Monday
    WeatherModel weather;
    CalendarOverlay overlay;
    PriorityParams priority;
    bool record_trace = true;
    bool record_events = true;
    int workers = 1;
};

struct ActivityResult {
    ActivityCodebook codes;
    int n_agents = 0;
    int minutes = 0;
    std::vector<int> household_agent_offset; // per household, plus tail sentinel
    std::vector<int> agent_individual;       // agent -> individual index
    // Per (agent, minute) activity code with the collective bit, when traced.
    std::vector<std::uint8_t> trace;
    // Per (minute, code) count of agents performing; last column is idle.
    std::vector<std::uint32_t> code_minute_counts;
    std::vector<TaskEvent> events;

    std::uint8_t trace_at(int agent, int minute) const {
        return trace[static_cast<std::size_t>(agent) * static_cast<std::size_t>(minutes) +
                     static_cast<std::size_t>(minute)];
    }
    std::uint32_t count_at(int minute, int code_column) const {
        return code_minute_counts[static_cast<std::size_t>(minute) *
                                      (codes.names.size() + 1) +
                                  static_cast<std::size_t>(code_column)];
    }
};

using CatalogProvider = std::function<const tusdata::TaskCatalog&(int household_index)>;
using SinkFactory = std::function<MinuteSink*(int household_index, int worker_id)>;

// Full-population run. Households are independent given the shared calendar;
// they may be distributed across workers, and results are identical for any
// worker count. `sink_factory` may be null; returned sinks are borrowed.
ActivityResult run_simulation(const popsynth::Population& population, CatalogProvider catalogs,
                              const ActivityCodebook& codes, const SimOptions& options,
                              const SinkFactory& sink_factory = {});

// Single-catalog convenience wrapper.
ActivityResult run_simulation(const popsynth::Population& population,
                              const tusdata::TaskCatalog& catalog, const SimOptions& options);

void export_trace_csv(const ActivityResult& result, const popsynth::Population& population,
                      const std::string& path);

} // namespace actiload::activity
