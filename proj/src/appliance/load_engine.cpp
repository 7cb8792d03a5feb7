// SPDX-License-Identifier: Apache-2.0
#include "actiload/appliance/load_engine.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "actiload/appliance/aum.hpp"

namespace actiload::appliance {

namespace {

std::int64_t to_mw(double watts) {
    return static_cast<std::int64_t>(std::llround(watts * 1000.0));
}

} // namespace

PuResolver::PuResolver(const ApplianceCatalog& catalog, const activity::ActivityCodebook& codes) {
    n_models_ = catalog.models.size();
    n_bands_ = catalog.bands.names.size();
    const std::size_t n_codes = codes.names.size();
    cube_.assign(n_codes * n_models_ * 4 * 3 * n_bands_, 0.0);
    std::vector<int> specificity(cube_.size(), -1);

    for (const auto& rule : catalog.pu_rules) {
        int code = codes.index_of(rule.activity);
        if (code < 0)
            continue; // activity not used by this run's catalog
        int model = catalog.model_index(rule.appliance);
        int spec = (rule.season >= 0) + (rule.day_type >= 0) + (rule.band >= 0);
        for (int season = 0; season < 4; ++season) {
            if (rule.season >= 0 && rule.season != season)
                continue;
            for (int day = 0; day < 3; ++day) {
                if (rule.day_type >= 0 && rule.day_type != day)
                    continue;
                for (int band = 0; band < static_cast<int>(n_bands_); ++band) {
                    if (rule.band >= 0 && rule.band != band)
                        continue;
                    std::size_t idx = (((static_cast<std::size_t>(code) * n_models_ +
                                         static_cast<std::size_t>(model)) *
                                            4 +
                                        static_cast<std::size_t>(season)) *
                                           3 +
                                       static_cast<std::size_t>(day)) *
                                          n_bands_ +
                                      static_cast<std::size_t>(band);
                    if (spec >= specificity[idx]) {
                        specificity[idx] = spec;
                        cube_[idx] = rule.probability;
                    }
                }
            }
        }
    }
}

void LoadAccumulator::add_from(const LoadAccumulator& other) {
    for (std::size_t i = 0; i < total_mw.size(); ++i)
        total_mw[i] += other.total_mw[i];
    for (std::size_t i = 0; i < category_mw.size(); ++i)
        category_mw[i] += other.category_mw[i];
}

LoadContext::LoadContext(const ApplianceCatalog& cat, const popsynth::Population& pop,
                         const activity::ActivityCodebook& codebook,
                         const tusdata::TaskCatalog& tasks, std::uint64_t seed_)
    : catalog(&cat), population(&pop), codes(&codebook), seed(seed_), pu(cat, codebook) {
    is_hygiene_code.assign(codebook.names.size(), 0);
    for (const auto& name : cat.hygiene_activities) {
        int code = codebook.index_of(name);
        if (code >= 0)
            is_hygiene_code[static_cast<std::size_t>(code)] = 1;
    }

    cycle_minute_mw.resize(cat.models.size());
    for (std::size_t m = 0; m < cat.models.size(); ++m) {
        if (cat.models[m].kind != AumKind::cycle)
            continue;
        for (const auto& phase : cat.models[m].cycle.phases)
            for (int i = 0; i < phase.minutes; ++i)
                cycle_minute_mw[m].push_back(to_mw(phase.watts));
    }

    for (const auto& m : cat.models)
        category_names.push_back(m.category);
    baseline_category = category_names.size();
    category_names.push_back("baseline");
    dhw_category = category_names.size();
    category_names.push_back("dhw");

    // Expected shower opportunities on the remaining days of the week, per
    // type: hygiene frequencies, discounted by how much of each task's
    // preferred period the no-shower windows cover.
    std::set<std::string> types;
    for (const auto& ind : pop.individuals)
        types.insert(ind.type_key);
    auto daily_freq = [&](const std::string& type, core::DayType dt) {
        double total = 0.0;
        for (const tusdata::TaskSpec* s : tasks.specs_for(type, dt)) {
            if (s->household_level())
                continue;
            bool hygiene = false;
            for (const auto& h : cat.hygiene_activities)
                hygiene = hygiene || s->activity == h;
            if (!hygiene)
                continue;
            double freq = s->freq_per_day < 1.0 ? s->freq_per_week / 7.0 : s->freq_per_day;
            total += freq * shower_weight(s->pp_start, s->pp_end);
        }
        return total;
    };
    for (const auto& type : types) {
        std::array<double, 7> rest{};
        for (int dow = 0; dow < 7; ++dow) {
            double sum = 0.0;
            for (int d = dow + 1; d < 7; ++d)
                sum += daily_freq(type, core::day_type_of_weekday(d));
            rest[static_cast<std::size_t>(dow)] = sum;
        }
        hygiene_rest_by_type[type] = rest;
    }
}

double LoadContext::shower_weight(int pp_start, int pp_end) const {
    if (catalog->dhw.no_shower_windows.empty() || pp_end <= pp_start)
        return 1.0;
    int covered = 0;
    for (const auto& [ws, we] : catalog->dhw.no_shower_windows) {
        int lo = std::max(pp_start, ws);
        int hi = std::min(pp_end, we);
        if (hi > lo)
            covered += hi - lo;
    }
    return 1.0 - static_cast<double>(covered) / static_cast<double>(pp_end - pp_start);
}

LoadEngine::LoadEngine(const LoadContext& ctx, LoadAccumulator* accumulator,
                       std::vector<std::vector<ShowerEvent>>* shower_slots,
                       std::vector<std::vector<DhwDayRecord>>* dhw_slots,
                       std::vector<std::vector<std::int64_t>>* dwelling_curves_mw)
    : ctx_(&ctx), acc_(accumulator), shower_slots_(shower_slots), dhw_slots_(dhw_slots),
      dwelling_curves_(dwelling_curves_mw) {}

void LoadEngine::begin_household(int household_index) {
    finish();
    household_ = household_index;

    const popsynth::Population& pop = *ctx_->population;
    const ApplianceCatalog& cat = *ctx_->catalog;
    const popsynth::Dwelling& dw = pop.dwellings[static_cast<std::size_t>(household_index)];
    const popsynth::Household& hh = pop.households[static_cast<std::size_t>(household_index)];

    appl_model_.clear();
    appl_power_mw_.clear();
    appl_standby_mw_.clear();
    appl_busy_until_.clear();
    has_dhw_ = false;

    std::set<std::string> owned_categories;
    for (std::uint32_t aid : dw.appliance_ids) {
        const std::string& category = pop.appliances[aid].category;
        owned_categories.insert(category);
        if (category == ctx_->dhw_ownership_category && cat.dhw.present)
            has_dhw_ = true;
        int model = cat.model_index(category);
        if (model < 0)
            continue; // ownership marker without an explicit appliance model
        appl_model_.push_back(model);
        appl_power_mw_.push_back(to_mw(cat.models[static_cast<std::size_t>(model)].unit_power_w));
        appl_standby_mw_.push_back(to_mw(cat.models[static_cast<std::size_t>(model)].standby_w));
        appl_busy_until_.push_back(-1);
    }
    appl_active_.assign(appl_model_.size(), 0);

    // Composite baselines: a composite with no members applies everywhere;
    // otherwise the dwelling carries it when it owns the composite marker or
    // any member appliance.
    baseline_mw_by_band_.assign(cat.bands.names.size(), 0);
    for (const auto& comp : cat.composites) {
        bool owned = comp.members.empty() || owned_categories.count(comp.name) > 0;
        for (const auto& m : comp.members)
            owned = owned || owned_categories.count(m) > 0;
        if (!owned)
            continue;
        for (std::size_t b = 0; b < baseline_mw_by_band_.size(); ++b)
            baseline_mw_by_band_[b] += to_mw(comp.baseline_w_by_band[b]);
    }

    member_quota_.assign(hh.member_ids.size(), cat.dhw.showers_per_week);
    member_types_.clear();
    member_ids_.clear();
    for (std::uint32_t mid : hh.member_ids) {
        member_types_.push_back(pop.individuals[mid].type_key);
        member_ids_.push_back(static_cast<std::int32_t>(mid));
    }

    attachments_.clear();
    cycles_.clear();
    draws_.clear();
    dhw_ = DhwState{};
    dhw_.temp_c = cat.dhw.setpoint_c;
    dhw_.day_start_temp_c = dhw_.temp_c;
    last_day_ = -1;
    last_week_ = -1;
}

void LoadEngine::flush_dhw_day(int day) {
    if (!has_dhw_ || !dhw_slots_)
        return;
    DhwDayRecord rec;
    rec.dwelling = household_;
    rec.day = day;
    rec.balance = day_balance(dhw_, ctx_->catalog->dhw);
    (*dhw_slots_)[static_cast<std::size_t>(household_)].push_back(rec);
}

void LoadEngine::finish() {
    if (household_ >= 0 && last_day_ >= 0)
        flush_dhw_day(last_day_);
    household_ = -1;
}

void LoadEngine::roll_day(const activity::SimulationClock& clock) {
    if (clock.day_index == last_day_)
        return;
    if (last_day_ >= 0)
        flush_dhw_day(last_day_);
    dhw_.start_day();
    if (clock.week_index != last_week_) {
        std::fill(member_quota_.begin(), member_quota_.end(),
                  ctx_->catalog->dhw.showers_per_week);
        last_week_ = clock.week_index;
    }
    last_day_ = clock.day_index;
    attachments_.clear(); // instance indices renumber each day
}

void LoadEngine::on_task_start(const activity::SimulationClock& clock,
                               std::span<const activity::TaskInstance> instances,
                               int instance_index, int undone_same_code_for_owner) {
    roll_day(clock);
    if (attachments_.size() < instances.size())
        attachments_.resize(instances.size());

    const activity::TaskInstance& t = instances[static_cast<std::size_t>(instance_index)];
    const ApplianceCatalog& cat = *ctx_->catalog;
    const std::uint64_t hh = static_cast<std::uint64_t>(household_);
    const std::uint64_t day = static_cast<std::uint64_t>(clock.day_index);
    const std::uint64_t inst = static_cast<std::uint64_t>(instance_index);
    const int band = cat.bands.band_of(clock.minute_of_day);

    Attachment& att = attachments_[static_cast<std::size_t>(instance_index)];
    auto rng = core::RngStream::derive(ctx_->seed, {core::streams::kActivation, hh, day, inst});
    for (std::size_t ai = 0; ai < appl_model_.size(); ++ai) {
        const int model = appl_model_[ai];
        const ApplianceModel& m = cat.models[static_cast<std::size_t>(model)];
        double p = ctx_->pu.prob(t.code, model, clock.season, clock.day_type, band);
        double u = rng.next_double(); // always drawn, keeping streams aligned
        if (u >= p)
            continue;
        switch (m.kind) {
        case AumKind::forced:
            att.forced.emplace_back(static_cast<int>(ai), appl_power_mw_[ai]);
            att.any = true;
            break;
        case AumKind::fractional: {
            auto frng = core::RngStream::derive(
                ctx_->seed, {core::streams::kFractional, hh, day, inst, static_cast<std::uint64_t>(ai)});
            FractionalRun run;
            run.appliance = static_cast<int>(ai);
            run.mw = appl_power_mw_[ai];
            run.on_minutes =
                fractional_on_minutes(t.chosen_duration, m.fraction, m.burst_minutes, frng);
            if (!run.on_minutes.empty()) {
                att.fractional.push_back(std::move(run));
                att.any = true;
            }
            break;
        }
        case AumKind::cycle:
            // A physical machine runs one program at a time.
            if (appl_busy_until_[ai] > clock.absolute_minute)
                break;
            appl_busy_until_[ai] =
                clock.absolute_minute +
                static_cast<std::int64_t>(ctx_->cycle_minute_mw[static_cast<std::size_t>(model)].size());
            cycles_.push_back(ActiveCycle{static_cast<int>(ai), model, clock.absolute_minute});
            break;
        }
    }

    // Hygiene tasks may trigger a shower against the weekly quota.
    if (has_dhw_ && t.owner >= 0 && ctx_->is_hygiene_code[t.code]) {
        (void)undone_same_code_for_owner;
        int& quota = member_quota_[static_cast<std::size_t>(t.owner)];
        const auto& rest = ctx_->hygiene_rest_by_type.at(
            member_types_[static_cast<std::size_t>(t.owner)]);
        // Remaining opportunities today, discounted where a no-shower window
        // covers the preferred period, plus the rest of the week.
        double today = 0.0;
        for (const auto& other : instances)
            if (other.code == t.code && other.owner == t.owner && other.selectable())
                today += ctx_->shower_weight(other.pp_start, other.pp_end);
        double expected = today + rest[static_cast<std::size_t>(clock.day_of_week)];
        bool suppressed = cat.dhw.shower_suppressed(clock.minute_of_day);
        double p = shower_probability(quota, expected, suppressed);
        double u = core::RngStream::derive(ctx_->seed, {core::streams::kShower, hh, day, inst})
                       .next_double();
        if (u < p) {
            --quota;
            draws_.emplace_back(cat.dhw.shower_minutes,
                                cat.dhw.shower_liters / cat.dhw.shower_minutes);
            if (shower_slots_) {
                ShowerEvent ev;
                ev.day = clock.day_index;
                ev.minute_of_day = static_cast<std::int16_t>(clock.minute_of_day);
                ev.household = household_;
                ev.individual = member_ids_[static_cast<std::size_t>(t.owner)];
                (*shower_slots_)[static_cast<std::size_t>(household_)].push_back(ev);
            }
        }
    }
}

void LoadEngine::on_minute(const activity::SimulationClock& clock,
                           std::span<const activity::MinuteSink::Exec> executing,
                           std::span<const activity::TaskInstance> instances) {
    roll_day(clock);
    if (attachments_.size() < instances.size())
        attachments_.resize(instances.size());

    const std::size_t abs = static_cast<std::size_t>(clock.absolute_minute);
    std::int64_t* cat_row = acc_->category_mw.data() + abs * acc_->n_categories;
    std::int64_t minute_total = 0;
    auto add = [&](std::size_t category, std::int64_t mw) {
        cat_row[category] += mw;
        minute_total += mw;
    };

    std::fill(appl_active_.begin(), appl_active_.end(), 0);

    for (const auto& exec : executing) {
        Attachment& att = attachments_[static_cast<std::size_t>(exec.instance)];
        if (!att.any)
            continue;
        for (const auto& [ai, mw] : att.forced) {
            add(static_cast<std::size_t>(appl_model_[static_cast<std::size_t>(ai)]), mw);
            appl_active_[static_cast<std::size_t>(ai)] = 1;
        }
        const int k = exec.executed_minutes - 1; // 0-based executed minute
        for (auto& run : att.fractional) {
            while (run.cursor < run.on_minutes.size() && run.on_minutes[run.cursor] < k)
                ++run.cursor;
            if (run.cursor < run.on_minutes.size() && run.on_minutes[run.cursor] == k) {
                add(static_cast<std::size_t>(appl_model_[static_cast<std::size_t>(run.appliance)]),
                    run.mw);
                appl_active_[static_cast<std::size_t>(run.appliance)] = 1;
            }
        }
    }

    for (std::size_t c = 0; c < cycles_.size();) {
        const auto& cyc = cycles_[c];
        const auto& minute_mw = ctx_->cycle_minute_mw[static_cast<std::size_t>(cyc.model)];
        std::int64_t off = clock.absolute_minute - cyc.start_abs;
        if (off >= static_cast<std::int64_t>(minute_mw.size())) {
            cycles_[c] = cycles_.back();
            cycles_.pop_back();
            continue;
        }
        add(static_cast<std::size_t>(cyc.model), minute_mw[static_cast<std::size_t>(off)]);
        appl_active_[static_cast<std::size_t>(cyc.appliance)] = 1;
        ++c;
    }

    // Idle appliances sit at standby.
    for (std::size_t ai = 0; ai < appl_model_.size(); ++ai)
        if (!appl_active_[ai] && appl_standby_mw_[ai] > 0)
            add(static_cast<std::size_t>(appl_model_[ai]), appl_standby_mw_[ai]);

    const int band = ctx_->catalog->bands.band_of(clock.minute_of_day);
    if (baseline_mw_by_band_[static_cast<std::size_t>(band)] > 0)
        add(ctx_->baseline_category, baseline_mw_by_band_[static_cast<std::size_t>(band)]);

    if (has_dhw_) {
        double liters = 0.0;
        for (std::size_t d = 0; d < draws_.size();) {
            liters += draws_[d].second;
            if (--draws_[d].first <= 0) {
                draws_[d] = draws_.back();
                draws_.pop_back();
            } else {
                ++d;
            }
        }
        double heater_w = dhw_step(dhw_, ctx_->catalog->dhw, liters, clock.minute_of_day);
        if (heater_w > 0.0)
            add(ctx_->dhw_category, to_mw(heater_w));
    }

    acc_->total_mw[abs] += minute_total;
    if (dwelling_curves_)
        (*dwelling_curves_)[static_cast<std::size_t>(household_)][abs] = minute_total;
}

} // namespace actiload::appliance
