// SPDX-License-Identifier: Apache-2.0
#include "actiload/activity/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "actiload/core/csv.hpp"

namespace actiload::activity {

namespace {

bool can_select(const AgentState& agent, int agent_index, const TaskInstance& t) {
    return t.selectable() && (t.owner == agent_index || (t.owner < 0 && agent.adult));
}

bool suppressed(const SimulationClock& clock, const std::string& activity) {
    if (!clock.overlay)
        return false;
    for (const auto& code : clock.overlay->suppress)
        if (code == activity)
            return true;
    return false;
}

} // namespace

ActivityCodebook ActivityCodebook::from_catalog(const tusdata::TaskCatalog& catalog,
                                                const CalendarOverlay& overlay) {
    ActivityCodebook codes;
    for (const auto& s : catalog.specs)
        codes.intern(s.activity);
    for (const auto& [day, ov] : overlay.days) {
        (void)day;
        for (const auto& code : ov.inject)
            codes.intern(code);
    }
    return codes;
}

HouseholdEngine::HouseholdEngine(int household_index, const popsynth::Population& population,
                                 const tusdata::TaskCatalog& catalog, const ActivityCodebook& codes,
                                 const Config& config)
    : household_index_(household_index), population_(&population), catalog_(&catalog),
      codes_(&codes), config_(config) {
    const popsynth::Household& hh = population.households[static_cast<std::size_t>(household_index)];
    if (hh.member_ids.size() > 16)
        throw std::invalid_argument("household too large for the scheduler (16 max)");
    agents_.reserve(hh.member_ids.size());
    for (std::uint32_t mid : hh.member_ids) {
        const popsynth::Individual& ind = population.individuals[mid];
        AgentState agent;
        agent.individual_index = static_cast<int>(mid);
        agent.type_key = ind.type_key;
        agent.adult = ind.age >= 15;
        agents_.push_back(std::move(agent));
    }
    performing_count_.assign(codes.names.size(), 0);
}

void HouseholdEngine::emit(const SimulationClock& clock, TaskEventKind kind, int agent,
                           const TaskInstance& t) {
    if (!config_.record_events)
        return;
    TaskEvent e;
    e.day = clock.day_index;
    e.minute_of_day = static_cast<std::int16_t>(clock.minute_of_day);
    e.household = household_index_;
    e.agent = static_cast<std::int16_t>(agent);
    e.kind = kind;
    e.code = t.code;
    e.elapsed = static_cast<std::int16_t>(t.elapsed);
    e.chosen = static_cast<std::int16_t>(t.chosen_duration);
    e.min_duration = static_cast<std::int16_t>(t.min_duration);
    e.max_duration = static_cast<std::int16_t>(t.max_duration);
    events_.push_back(e);
}

void HouseholdEngine::finalize_open_tasks(const SimulationClock& clock) {
    for (auto& t : instances_) {
        if (t.state != TaskState::pending && t.state != TaskState::ongoing)
            continue;
        if (t.elapsed >= t.min_duration) {
            t.state = TaskState::done;
            emit(clock, TaskEventKind::truncated_done, t.owner, t);
        } else {
            t.state = TaskState::abandoned;
            emit(clock, TaskEventKind::abandoned, t.owner, t);
        }
        t.performers = 0;
    }
    for (auto& a : agents_)
        a.current = -1;
    std::fill(performing_count_.begin(), performing_count_.end(), 0);
}

int HouseholdEngine::undone_same_code(const TaskInstance& t) const {
    int n = 0;
    for (const auto& other : instances_)
        if (other.code == t.code && other.owner == t.owner && other.selectable())
            ++n;
    return n;
}

void HouseholdEngine::assign_day(const SimulationClock& midnight) {
    if (day_open_)
        finalize_open_tasks(midnight);
    day_open_ = true;
    instances_.clear();

    const std::uint64_t hh = static_cast<std::uint64_t>(household_index_);
    const std::uint64_t day = static_cast<std::uint64_t>(midnight.day_index);
    const std::uint64_t week = static_cast<std::uint64_t>(midnight.week_index);
    tusdata::DayInfo day_info{midnight.day_of_week, midnight.day_type};

    auto add_instance = [&](const tusdata::TaskSpec* spec, int owner) {
        if (suppressed(midnight, spec->activity))
            return;
        TaskInstance t;
        t.spec = spec;
        int code = codes_->index_of(spec->activity);
        if (code < 0)
            throw std::runtime_error("activity '" + spec->activity + "' missing from codebook");
        t.code = static_cast<std::uint16_t>(code);
        t.pp_start = spec->pp_start;
        t.pp_end = spec->pp_end;
        t.min_duration = spec->min_duration;
        t.max_duration = spec->max_duration;
        t.owner = owner;
        instances_.push_back(t);
    };

    for (std::size_t a = 0; a < agents_.size(); ++a) {
        auto day_rng = core::RngStream::derive(config_.seed,
                                               {core::streams::kAssignment, hh, day, a});
        auto week_rng = core::RngStream::derive(config_.seed,
                                                {core::streams::kWeeklyDays, hh, week, a});
        auto templates = tusdata::generate_daily_assignment(agents_[a].type_key, day_info,
                                                            *catalog_, day_rng, week_rng);
        for (const auto& tmpl : templates)
            for (int c = 0; c < tmpl.count; ++c)
                add_instance(tmpl.spec, static_cast<int>(a));

        if (midnight.overlay) {
            for (const auto& code : midnight.overlay->inject) {
                auto candidates = catalog_->specs_for(agents_[a].type_key, midnight.day_type);
                const tusdata::TaskSpec* found = nullptr;
                for (const tusdata::TaskSpec* s : candidates)
                    if (s->activity == code && !s->household_level() && !found)
                        found = s;
                if (found)
                    add_instance(found, static_cast<int>(a));
            }
        }
    }

    // Household-level tasks exist once per household; any adult may run them.
    std::vector<std::string> member_types;
    member_types.reserve(agents_.size());
    for (const auto& a : agents_)
        member_types.push_back(a.type_key);
    auto hh_day_rng = core::RngStream::derive(config_.seed,
                                              {core::streams::kAssignment, hh, day, 0xFFFFu});
    auto hh_week_rng = core::RngStream::derive(config_.seed,
                                               {core::streams::kWeeklyDays, hh, week, 0xFFFFu});
    for (const tusdata::TaskSpec* s : catalog_->household_specs_for(member_types, midnight.day_type)) {
        int count = 0;
        if (s->household_rule == tusdata::HouseholdRule::size_weekly) {
            // Weekly cycle count scales with household size: ceil(size / 2).
            int n_week = (static_cast<int>(agents_.size()) + 1) / 2;
            for (int i = 0; i < n_week; ++i)
                if (hh_week_rng.next_int(0, 6) == midnight.day_of_week)
                    ++count;
        } else if (s->freq_per_day < 1.0) {
            int n_week = hh_week_rng.stochastic_round(s->freq_per_week);
            for (int i = 0; i < n_week; ++i)
                if (hh_week_rng.next_int(0, 6) == midnight.day_of_week)
                    ++count;
        } else {
            count = hh_day_rng.stochastic_round(s->freq_per_day);
        }
        for (int c = 0; c < count; ++c)
            add_instance(s, -1);
    }

    // Durations drawn uniformly in the band, stretched by the day's weather
    // and clamped back into [min, max].
    auto dur_rng = core::RngStream::derive(config_.seed, {core::streams::kTaskDuration, hh, day});
    for (auto& t : instances_) {
        double mult = t.spec->weather_mult[static_cast<int>(midnight.weather)];
        int base = dur_rng.next_int(t.min_duration, t.max_duration);
        int chosen = static_cast<int>(std::llround(base * mult));
        t.chosen_duration = std::clamp(chosen, t.min_duration, t.max_duration);
    }
}

void HouseholdEngine::set_current(int agent_index, int instance_index,
                                  const SimulationClock& clock, MinuteSink* sink) {
    AgentState& agent = agents_[static_cast<std::size_t>(agent_index)];
    if (agent.current == instance_index)
        return;
    const std::uint16_t bit = static_cast<std::uint16_t>(1u << agent_index);

    if (agent.current >= 0) {
        TaskInstance& old_task = instances_[static_cast<std::size_t>(agent.current)];
        old_task.performers = static_cast<std::uint16_t>(old_task.performers & ~bit);
        --performing_count_[old_task.code];
        if (old_task.performers == 0 && old_task.state == TaskState::ongoing &&
            old_task.elapsed < old_task.chosen_duration) {
            old_task.state = TaskState::pending; // resumable
            if (old_task.elapsed > 0)
                emit(clock, TaskEventKind::suspend, agent_index, old_task);
        }
    }

    if (instance_index >= 0) {
        TaskInstance& t = instances_[static_cast<std::size_t>(instance_index)];
        bool was_pending = t.state == TaskState::pending;
        t.performers = static_cast<std::uint16_t>(t.performers | bit);
        ++performing_count_[t.code];
        t.state = TaskState::ongoing;
        if (!t.started) {
            t.started = true;
            emit(clock, TaskEventKind::start, agent_index, t);
            if (sink)
                sink->on_task_start(clock, instances_, instance_index, undone_same_code(t));
        } else if (was_pending && t.elapsed > 0) {
            emit(clock, TaskEventKind::resume, agent_index, t);
        }
    }
    agent.current = instance_index;
}

int HouseholdEngine::select_fast(int agent_index, const SimulationClock& clock) const {
    const AgentState& agent = agents_[static_cast<std::size_t>(agent_index)];
    const int mod = clock.minute_of_day;

    int n_in_period = 0;
    for (const auto& t : instances_)
        if (can_select(agent, agent_index, t) && t.in_preferred_period(mod))
            ++n_in_period;

    const std::uint16_t current_code =
        agent.current >= 0 ? instances_[static_cast<std::size_t>(agent.current)].code : 0xFFFF;

    int best = -1;
    double best_value = 0.0;
    int best_pp_end = 0;
    for (std::size_t i = 0; i < instances_.size(); ++i) {
        const TaskInstance& t = instances_[i];
        if (!can_select(agent, agent_index, t))
            continue;
        int mine = (current_code == t.code) ? 1 : 0;
        bool co_active = performing_count_[t.code] > mine;
        int competitors = n_in_period - (t.in_preferred_period(mod) ? 1 : 0);
        PriorityScore s = priority_components(t, agent.current == static_cast<int>(i), co_active,
                                              competitors, mod, config_.priority);
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

void HouseholdEngine::step_household(const SimulationClock& clock, MinuteSink* sink,
                                     std::uint8_t* trace_row, std::uint32_t* code_minute_counts) {
    const int mod = clock.minute_of_day;

    // A pending task whose period is over and whose minimum can no longer fit
    // in the rest of the day is given up.
    for (auto& t : instances_) {
        if (t.state == TaskState::pending && mod > t.pp_end &&
            (core::kMinutesPerDay - mod) < (t.min_duration - t.elapsed)) {
            t.state = TaskState::abandoned;
            emit(clock, TaskEventKind::abandoned, t.owner, t);
        }
    }

    // Replan in fixed member order; earlier members' choices are visible to
    // later ones within the same minute.
    for (std::size_t a = 0; a < agents_.size(); ++a) {
        int sel = select_fast(static_cast<int>(a), clock);
        if (config_.cross_check_selection) {
            HouseholdView view{instances_, agents_};
            int ref = select_task(agents_[a], static_cast<int>(a), clock, view, config_.priority);
            if (ref != sel)
                throw std::logic_error("scheduler fast path diverged from reference argmax");
        }
        set_current(static_cast<int>(a), sel, clock, sink);
    }

    if (trace_row) {
        for (std::size_t a = 0; a < agents_.size(); ++a) {
            std::uint8_t cell = ActivityCodebook::kIdle;
            if (agents_[a].current >= 0) {
                const TaskInstance& t = instances_[static_cast<std::size_t>(agents_[a].current)];
                cell = static_cast<std::uint8_t>(t.code);
                if (performing_count_[t.code] >= 2)
                    cell |= ActivityCodebook::kCollectiveBit;
            }
            trace_row[a * static_cast<std::size_t>(config_.trace_stride)] = cell;
        }
    }
    if (code_minute_counts) {
        const std::size_t idle_col = codes_->names.size();
        for (const auto& agent : agents_) {
            if (agent.current >= 0)
                ++code_minute_counts[instances_[static_cast<std::size_t>(agent.current)].code];
            else
                ++code_minute_counts[idle_col];
        }
    }

    // Advance every instance someone is executing.
    execs_.clear();
    for (std::size_t i = 0; i < instances_.size(); ++i) {
        TaskInstance& t = instances_[i];
        if (t.performers == 0)
            continue;
        ++t.elapsed;
        execs_.push_back(MinuteSink::Exec{static_cast<std::int32_t>(i), t.elapsed});
        if (t.elapsed >= t.chosen_duration) {
            t.state = TaskState::done;
            emit(clock, TaskEventKind::complete, t.owner, t);
            performing_count_[t.code] = static_cast<std::uint16_t>(
                performing_count_[t.code] - std::popcount(t.performers));
            for (std::size_t a = 0; a < agents_.size(); ++a)
                if (t.performers & (1u << a))
                    agents_[a].current = -1;
            t.performers = 0;
        }
    }

    if (sink)
        sink->on_minute(clock, execs_, instances_);
}

void HouseholdEngine::finalize(const SimulationClock& clock) {
    if (day_open_)
        finalize_open_tasks(clock);
    day_open_ = false;
}

ActivityResult run_simulation(const popsynth::Population& population, CatalogProvider catalogs,
                              const ActivityCodebook& codes, const SimOptions& options,
                              const SinkFactory& sink_factory) {
    if (options.horizon_days < 1)
        throw std::invalid_argument("horizon must be at least one day");

    const int n_households = static_cast<int>(population.households.size());
    Calendar calendar(options.start_date, options.weather, options.overlay, options.seed);

    ActivityResult result;
    result.codes = codes;
    result.minutes = options.horizon_days * core::kMinutesPerDay;
    result.household_agent_offset.resize(static_cast<std::size_t>(n_households) + 1, 0);
    for (int h = 0; h < n_households; ++h)
        result.household_agent_offset[static_cast<std::size_t>(h) + 1] =
            result.household_agent_offset[static_cast<std::size_t>(h)] +
            static_cast<int>(population.households[static_cast<std::size_t>(h)].member_ids.size());
    result.n_agents = result.household_agent_offset.back();
    result.agent_individual.resize(static_cast<std::size_t>(result.n_agents));
    for (int h = 0; h < n_households; ++h) {
        int base = result.household_agent_offset[static_cast<std::size_t>(h)];
        const auto& ids = population.households[static_cast<std::size_t>(h)].member_ids;
        for (std::size_t m = 0; m < ids.size(); ++m)
            result.agent_individual[static_cast<std::size_t>(base) + m] = static_cast<int>(ids[m]);
    }

    if (options.record_trace)
        result.trace.assign(static_cast<std::size_t>(result.n_agents) *
                                static_cast<std::size_t>(result.minutes),
                            ActivityCodebook::kIdle);

    const std::size_t count_cols = codes.names.size() + 1;
    const std::size_t count_cells = static_cast<std::size_t>(result.minutes) * count_cols;

    int workers = std::max(1, options.workers);
    workers = std::min(workers, std::max(1, n_households));
    std::vector<std::vector<std::uint32_t>> worker_counts(
        static_cast<std::size_t>(workers), std::vector<std::uint32_t>(count_cells, 0));
    std::vector<std::vector<TaskEvent>> household_events(static_cast<std::size_t>(n_households));

    std::atomic<int> next_household{0};
    auto worker_fn = [&](int worker_id) {
        std::uint32_t* counts = worker_counts[static_cast<std::size_t>(worker_id)].data();
        while (true) {
            int h = next_household.fetch_add(1);
            if (h >= n_households)
                break;

            HouseholdEngine::Config cfg;
            cfg.priority = options.priority;
            cfg.seed = options.seed;
            cfg.record_events = options.record_events;
            cfg.trace_stride = result.minutes;
            HouseholdEngine engine(h, population, catalogs(h), codes, cfg);
            MinuteSink* sink = sink_factory ? sink_factory(h, worker_id) : nullptr;

            const int agent_base = result.household_agent_offset[static_cast<std::size_t>(h)];
            for (int day = 0; day < options.horizon_days; ++day) {
                SimulationClock clock = calendar.at(day, 0);
                engine.assign_day(clock);
                for (int m = 0; m < core::kMinutesPerDay; ++m) {
                    clock.minute_of_day = m;
                    clock.absolute_minute =
                        static_cast<std::int64_t>(day) * core::kMinutesPerDay + m;
                    std::uint8_t* trace_row = nullptr;
                    if (options.record_trace)
                        trace_row = result.trace.data() +
                                    static_cast<std::size_t>(agent_base) *
                                        static_cast<std::size_t>(result.minutes) +
                                    static_cast<std::size_t>(clock.absolute_minute);
                    std::uint32_t* count_row =
                        counts + static_cast<std::size_t>(clock.absolute_minute) * count_cols;
                    engine.step_household(clock, sink, trace_row, count_row);
                }
            }
            engine.finalize(calendar.at(options.horizon_days, 0));
            household_events[static_cast<std::size_t>(h)] = std::move(engine.events());
        }
    };

    if (workers == 1) {
        worker_fn(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w)
            pool.emplace_back(worker_fn, w);
        for (auto& t : pool)
            t.join();
    }

    result.code_minute_counts.assign(count_cells, 0);
    for (const auto& buf : worker_counts)
        for (std::size_t i = 0; i < count_cells; ++i)
            result.code_minute_counts[i] += buf[i];

    std::size_t total_events = 0;
    for (const auto& ev : household_events)
        total_events += ev.size();
    result.events.reserve(total_events);
    for (auto& ev : household_events)
        result.events.insert(result.events.end(), ev.begin(), ev.end());

    return result;
}

ActivityResult run_simulation(const popsynth::Population& population,
                              const tusdata::TaskCatalog& catalog, const SimOptions& options) {
    ActivityCodebook codes = ActivityCodebook::from_catalog(catalog, options.overlay);
    return run_simulation(
        population, [&catalog](int) -> const tusdata::TaskCatalog& { return catalog; }, codes,
        options);
}

void export_trace_csv(const ActivityResult& result, const popsynth::Population& population,
                      const std::string& path) {
    if (result.trace.empty())
        throw std::runtime_error("trace was not recorded for this run");
    core::CsvWriter w(path);
    w.row({"minute", "household_id", "agent_id", "activity_code", "collective"});
    const int n_households = static_cast<int>(population.households.size());
    for (int m = 0; m < result.minutes; ++m) {
        for (int h = 0; h < n_households; ++h) {
            int base = result.household_agent_offset[static_cast<std::size_t>(h)];
            int end = result.household_agent_offset[static_cast<std::size_t>(h) + 1];
            for (int a = base; a < end; ++a) {
                std::uint8_t cell = result.trace_at(a, m);
                bool collective = cell & ActivityCodebook::kCollectiveBit;
                std::uint8_t code = cell & 0x7F;
                std::string name = code == ActivityCodebook::kIdle
                                       ? "idle"
                                       : result.codes.names[code];
                w.row({std::to_string(m), std::to_string(h),
                       std::to_string(result.agent_individual[static_cast<std::size_t>(a)]), name,
                       collective ? "1" : "0"});
            }
        }
    }
}

} // namespace actiload::activity
