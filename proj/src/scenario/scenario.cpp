// SPDX-License-Identifier: Apache-2.0
#include "actiload/scenario/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "actiload/core/csv.hpp"

namespace actiload::scenario {

PeakWindows PeakWindows::defaults() {
    PeakWindows p;
    p.windows = {{8 * 60, 13 * 60}, {18 * 60, 20 * 60}};
    return p;
}

void PeakWindows::validate() const {
    for (const auto& w : windows)
        if (w.start < 0 || w.start >= w.end || w.end > core::kMinutesPerDay)
            throw ScenarioError("peak window outside the day");
    for (std::size_t i = 0; i < windows.size(); ++i)
        for (std::size_t j = i + 1; j < windows.size(); ++j)
            if (windows[i].start < windows[j].end && windows[j].start < windows[i].end)
                throw ScenarioError("peak windows overlap");
}

void EcoBehavior::validate() const {
    windows.validate();
    if (max_shift_min < 0)
        throw ScenarioError("max_shift must be non-negative");
    if (compliance < 0.0 || compliance > 1.0)
        throw ScenarioError("compliance must be in [0,1]");
}

CategoryMap CategoryMap::from_config(const core::ConfigDoc& doc) {
    CategoryMap map;
    const core::ConfigSection& s = doc.require("categories");
    for (const auto& e : s.entries) {
        map.categories.push_back(e.key);
        for (const auto& code : core::split_list(e.value))
            map.code_to_category[code] = static_cast<int>(map.categories.size()) - 1;
    }
    if (map.categories.empty())
        throw ScenarioError("[categories] defines no categories");
    return map;
}

CategoryMap CategoryMap::load(const std::string& path) {
    return from_config(core::ConfigDoc::parse_file(path));
}

int CategoryMap::index_of(const std::string& category) const {
    for (std::size_t i = 0; i < categories.size(); ++i)
        if (categories[i] == category)
            return static_cast<int>(i);
    return -1;
}

void CategoryMap::check_covers(const activity::ActivityCodebook& codes) const {
    std::string missing;
    for (const auto& name : codes.names) {
        if (!code_to_category.count(name)) {
            if (!missing.empty())
                missing += ", ";
            missing += name;
        }
    }
    if (!missing.empty())
        throw ScenarioError("activity codes not covered by the category map: " + missing);
}

namespace {

// Shift needed to clear the window in each direction; the nearer edge wins,
// earlier on ties. Returns the applied (possibly capped) signed shift.
int shift_for(int pp_start, int pp_end, const TimeWindow& w, int max_shift) {
    int need_later = w.end - pp_start;
    int need_earlier = pp_end - w.start;
    bool go_earlier = need_earlier <= need_later;
    int need = go_earlier ? need_earlier : need_later;
    int amount = std::min(need, max_shift);
    return go_earlier ? -amount : amount;
}

int clamp_shift_to_day(int pp_start, int pp_end, int delta) {
    if (delta < 0 && pp_start + delta < 0)
        delta = -pp_start;
    if (delta > 0 && pp_end + delta > core::kMinutesPerDay)
        delta = core::kMinutesPerDay - pp_end;
    return delta;
}

} // namespace

ShiftedCatalogs apply_cooking_shift(const tusdata::TaskCatalog& base, const EcoBehavior& behavior,
                                    const CategoryMap& categories, int n_households,
                                    std::uint64_t seed) {
    if (behavior.kind != BehaviorKind::cooking_shift)
        throw ScenarioError("apply_cooking_shift called with a different behavior kind");
    behavior.validate();

    int cooking_cat = categories.index_of("cooking");
    int meals_cat = categories.index_of("meals");
    if (cooking_cat < 0)
        throw ScenarioError("category map needs a 'cooking' category for the cooking shift");

    auto category_of = [&](const std::string& code) {
        auto it = categories.code_to_category.find(code);
        return it == categories.code_to_category.end() ? -1 : it->second;
    };

    ShiftedCatalogs out;
    out.shifted = base;

    // Shift cooking rows first, then drag chained eating rows by the same
    // delta when their period starts shortly after the cooking period ends.
    std::vector<std::pair<std::size_t, int>> cooking_shifts;
    for (std::size_t i = 0; i < out.shifted.specs.size(); ++i) {
        tusdata::TaskSpec& spec = out.shifted.specs[i];
        if (category_of(spec.activity) != cooking_cat)
            continue;
        for (const auto& w : behavior.windows.windows) {
            if (spec.pp_start < w.end && w.start < spec.pp_end) {
                int delta = shift_for(spec.pp_start, spec.pp_end, w, behavior.max_shift_min);
                delta = clamp_shift_to_day(spec.pp_start, spec.pp_end, delta);
                if (delta != 0) {
                    cooking_shifts.emplace_back(i, delta);
                    out.shifts.push_back(ShiftRecord{i, delta});
                    spec.pp_start += delta;
                    spec.pp_end += delta;
                }
                break; // one window drives the shift; residual overlap may remain
            }
        }
    }

    std::set<std::size_t> already;
    for (const auto& [cook_idx, delta] : cooking_shifts) {
        const tusdata::TaskSpec& cook = base.specs[cook_idx];
        for (std::size_t j = 0; j < out.shifted.specs.size(); ++j) {
            if (already.count(j))
                continue;
            tusdata::TaskSpec& spec = out.shifted.specs[j];
            if (category_of(spec.activity) != meals_cat || spec.day_type != cook.day_type)
                continue;
            const tusdata::TaskSpec& orig = base.specs[j];
            int gap = orig.pp_start - cook.pp_end;
            if (gap < 0 || gap > behavior.chain_threshold_min)
                continue;
            int d = clamp_shift_to_day(orig.pp_start, orig.pp_end, delta);
            if (d == 0)
                continue;
            spec.pp_start = orig.pp_start + d;
            spec.pp_end = orig.pp_end + d;
            out.shifts.push_back(ShiftRecord{j, d});
            already.insert(j);
        }
    }

    out.complies.resize(static_cast<std::size_t>(n_households), 0);
    for (int h = 0; h < n_households; ++h) {
        auto rng = core::RngStream::derive(seed, {core::streams::kCompliance,
                                                  static_cast<std::uint64_t>(h)});
        out.complies[static_cast<std::size_t>(h)] = rng.bernoulli(behavior.compliance) ? 1 : 0;
    }
    return out;
}

void apply_no_shower_peak(appliance::DhwConfig& dhw, const EcoBehavior& behavior) {
    if (behavior.kind != BehaviorKind::no_shower_peak)
        throw ScenarioError("apply_no_shower_peak called with a different behavior kind");
    behavior.validate();
    for (const auto& w : behavior.windows.windows)
        dhw.no_shower_windows.emplace_back(w.start, w.end);
}

ActivityRateReport activity_rates(const activity::ActivityResult& result,
                                  const CategoryMap& categories) {
    categories.check_covers(result.codes);

    ActivityRateReport report;
    report.minutes = result.minutes;
    report.categories = categories.categories;
    report.categories.push_back("idle");
    const std::size_t n_cat = report.categories.size();
    report.fractions.assign(static_cast<std::size_t>(result.minutes) * n_cat, 0.0);

    std::vector<int> code_cat(result.codes.names.size(), 0);
    for (std::size_t c = 0; c < result.codes.names.size(); ++c)
        code_cat[c] = categories.code_to_category.at(result.codes.names[c]);

    const std::size_t count_cols = result.codes.names.size() + 1;
    for (int m = 0; m < result.minutes; ++m) {
        double* row = report.fractions.data() + static_cast<std::size_t>(m) * n_cat;
        const std::uint32_t* counts =
            result.code_minute_counts.data() + static_cast<std::size_t>(m) * count_cols;
        for (std::size_t c = 0; c < result.codes.names.size(); ++c)
            row[static_cast<std::size_t>(code_cat[c])] += counts[c];
        row[n_cat - 1] += counts[count_cols - 1]; // idle
        for (std::size_t c = 0; c < n_cat; ++c)
            row[c] /= static_cast<double>(result.n_agents);
    }
    return report;
}

DeltaReport compare_runs(const sim::RunOutput& baseline, const sim::RunOutput& scenario,
                         const PeakWindows& windows, const CategoryMap& categories,
                         std::span<const std::string> cooking_appliances) {
    if (baseline.activity.minutes != scenario.activity.minutes ||
        baseline.n_dwellings != scenario.n_dwellings ||
        baseline.activity.n_agents != scenario.activity.n_agents ||
        baseline.activity.codes.names != scenario.activity.codes.names)
        throw ScenarioError("compare_runs: baseline and scenario runs are not paired");

    const int minutes = baseline.activity.minutes;
    const int n_days = minutes / core::kMinutesPerDay;

    DeltaReport report;
    report.n_days = n_days;

    ActivityRateReport base_rates = activity_rates(baseline.activity, categories);
    ActivityRateReport scen_rates = activity_rates(scenario.activity, categories);
    report.categories = base_rates.categories;
    const std::size_t n_cat = report.categories.size();
    report.fraction_delta.assign(static_cast<std::size_t>(core::kMinutesPerDay) * n_cat, 0.0);
    for (int m = 0; m < minutes; ++m) {
        int mod = m % core::kMinutesPerDay;
        for (std::size_t c = 0; c < n_cat; ++c)
            report.fraction_delta[static_cast<std::size_t>(mod) * n_cat + c] +=
                (scen_rates.at(m, static_cast<int>(c)) - base_rates.at(m, static_cast<int>(c))) /
                n_days;
    }

    appliance::LoadCurve base_mean = baseline.mean_load_curve();
    appliance::LoadCurve scen_mean = scenario.mean_load_curve();
    report.power_delta_w.assign(core::kMinutesPerDay, 0.0);
    for (int m = 0; m < minutes; ++m)
        report.power_delta_w[static_cast<std::size_t>(m % core::kMinutesPerDay)] +=
            (scen_mean.values_w[static_cast<std::size_t>(m)] -
             base_mean.values_w[static_cast<std::size_t>(m)]) /
            n_days;

    report.max_power_gain_w = 0.0;
    for (int mod = 0; mod < core::kMinutesPerDay; ++mod) {
        if (!windows.contains(mod))
            continue;
        double gain = -report.power_delta_w[static_cast<std::size_t>(mod)];
        report.max_power_gain_w = std::max(report.max_power_gain_w, gain);
    }
    for (int m = 0; m < minutes; ++m)
        if (windows.contains(m % core::kMinutesPerDay))
            report.window_energy_delta_wh +=
                (scen_mean.values_w[static_cast<std::size_t>(m)] -
                 base_mean.values_w[static_cast<std::size_t>(m)]) /
                60.0;

    if (!cooking_appliances.empty()) {
        std::vector<double> base_cook = baseline.category_mean_w(cooking_appliances);
        std::vector<double> scen_cook = scenario.category_mean_w(cooking_appliances);
        report.cooking_power_base_w.assign(core::kMinutesPerDay, 0.0);
        report.cooking_power_scen_w.assign(core::kMinutesPerDay, 0.0);
        for (int m = 0; m < minutes; ++m) {
            int mod = m % core::kMinutesPerDay;
            report.cooking_power_base_w[static_cast<std::size_t>(mod)] +=
                base_cook[static_cast<std::size_t>(m)] / n_days;
            report.cooking_power_scen_w[static_cast<std::size_t>(mod)] +=
                scen_cook[static_cast<std::size_t>(m)] / n_days;
            report.cooking_daily_base_wh += base_cook[static_cast<std::size_t>(m)] / 60.0 / n_days;
            report.cooking_daily_scen_wh += scen_cook[static_cast<std::size_t>(m)] / 60.0 / n_days;
            if (windows.contains(mod)) {
                report.cooking_window_base_wh +=
                    base_cook[static_cast<std::size_t>(m)] / 60.0 / n_days;
                report.cooking_window_scen_wh +=
                    scen_cook[static_cast<std::size_t>(m)] / 60.0 / n_days;
            }
        }
        report.energy_dropped_wh = report.cooking_daily_base_wh - report.cooking_daily_scen_wh;
        report.energy_displaced_wh = (report.cooking_window_base_wh -
                                      report.cooking_window_scen_wh) -
                                     report.energy_dropped_wh;
    }
    return report;
}

void save_activity_rates(const ActivityRateReport& report, const std::string& path) {
    core::CsvWriter w(path);
    std::vector<std::string> header = {"minute"};
    for (const auto& c : report.categories)
        header.push_back(c);
    w.row(header);
    for (int m = 0; m < report.minutes; ++m) {
        std::vector<std::string> row = {std::to_string(m)};
        for (std::size_t c = 0; c < report.categories.size(); ++c)
            row.push_back(core::format_double(report.at(m, static_cast<int>(c))));
        w.row(row);
    }
}

void save_delta_report(const DeltaReport& report, const std::string& path_prefix) {
    {
        core::CsvWriter w(path_prefix + "_activity.csv");
        std::vector<std::string> header = {"minute_of_day"};
        for (const auto& c : report.categories)
            header.push_back(c);
        w.row(header);
        const std::size_t n_cat = report.categories.size();
        for (int m = 0; m < core::kMinutesPerDay; ++m) {
            std::vector<std::string> row = {std::to_string(m)};
            for (std::size_t c = 0; c < n_cat; ++c)
                row.push_back(core::format_double(
                    report.fraction_delta[static_cast<std::size_t>(m) * n_cat + c]));
            w.row(row);
        }
    }
    {
        core::CsvWriter w(path_prefix + "_power.csv");
        bool cooking = !report.cooking_power_base_w.empty();
        if (cooking)
            w.row({"minute_of_day", "power_delta_w", "cooking_base_w", "cooking_scenario_w"});
        else
            w.row({"minute_of_day", "power_delta_w"});
        for (int m = 0; m < core::kMinutesPerDay; ++m) {
            std::vector<std::string> row = {
                std::to_string(m),
                core::format_double(report.power_delta_w[static_cast<std::size_t>(m)])};
            if (cooking) {
                row.push_back(core::format_double(
                    report.cooking_power_base_w[static_cast<std::size_t>(m)]));
                row.push_back(core::format_double(
                    report.cooking_power_scen_w[static_cast<std::size_t>(m)]));
            }
            w.row(row);
        }
    }
    {
        core::CsvWriter w(path_prefix + "_summary.csv");
        w.row({"quantity", "value", "unit"});
        w.row({"max_power_gain", core::format_double(report.max_power_gain_w), "W"});
        w.row({"window_energy_delta", core::format_double(report.window_energy_delta_wh), "Wh"});
        w.row({"cooking_daily_baseline", core::format_double(report.cooking_daily_base_wh), "Wh"});
        w.row({"cooking_daily_scenario", core::format_double(report.cooking_daily_scen_wh), "Wh"});
        w.row({"cooking_energy_dropped", core::format_double(report.energy_dropped_wh), "Wh"});
        w.row({"cooking_energy_displaced", core::format_double(report.energy_displaced_wh), "Wh"});
    }
}

} // namespace actiload::scenario
