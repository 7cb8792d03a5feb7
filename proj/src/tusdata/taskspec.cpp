// SPDX-License-Identifier: Apache-2.0
#include "actiload/tusdata/taskspec.hpp"

#include <algorithm>
#include <cmath>

#include "actiload/core/config.hpp"
#include "actiload/core/csv.hpp"

namespace actiload::tusdata {

namespace {

constexpr double kEps = 1e-9;

struct TypeKeyParts {
    std::string gender;
    std::string band;
    std::string employment;
};

TypeKeyParts split_type_key(const std::string& key) {
    std::size_t first = key.find('_');
    std::size_t last = key.rfind('_');
    if (first == std::string::npos || last == first)
        return TypeKeyParts{key, "*", "*"};
    return TypeKeyParts{key.substr(0, first), key.substr(first + 1, last - first - 1),
                        key.substr(last + 1)};
}

bool field_match(const std::string& pattern, const std::string& value) {
    return pattern == "*" || pattern == value;
}

bool type_key_match(const std::string& pattern, const std::string& key) {
    if (pattern == "*" || pattern == key)
        return true;
    TypeKeyParts p = split_type_key(pattern);
    TypeKeyParts k = split_type_key(key);
    return field_match(p.gender, k.gender) && field_match(p.band, k.band) &&
           field_match(p.employment, k.employment);
}

bool is_weekly(const TaskSpec& s) {
    return s.household_rule == HouseholdRule::size_weekly || s.freq_per_day < 1.0;
}

std::vector<Episode> episodes_matching(std::span<const TusRecord> records,
                                       const std::string& activity) {
    std::vector<Episode> out;
    for (const auto& rec : records)
        for (const auto& ep : extract_episodes(rec, activity))
            out.push_back(ep);
    return out;
}

const char* household_rule_name(HouseholdRule r) {
    switch (r) {
    case HouseholdRule::shared: return "shared";
    case HouseholdRule::size_weekly: return "size_weekly";
    default: return "none";
    }
}

HouseholdRule household_rule_from(const std::string& s) {
    if (s == "none")
        return HouseholdRule::none;
    if (s == "shared")
        return HouseholdRule::shared;
    if (s == "size_weekly")
        return HouseholdRule::size_weekly;
    throw TusError("unknown household rule '" + s + "'");
}

} // namespace

Band x_band(std::span<const int> values, double x_percent) {
    if (values.empty())
        throw TusError("x_band: no observations");
    if (x_percent <= 0.0 || x_percent > 100.0)
        throw TusError("x_band: X outside (0, 100]");

    const std::size_t n = values.size();
    double sum = 0.0;
    for (int v : values)
        sum += v;
    const double mean = sum / static_cast<double>(n);

    std::vector<double> dist;
    dist.reserve(n);
    for (int v : values)
        dist.push_back(std::abs(static_cast<double>(v) - mean));
    std::sort(dist.begin(), dist.end());

    std::size_t k = static_cast<std::size_t>(std::ceil(x_percent * static_cast<double>(n) / 100.0 - kEps));
    k = std::clamp<std::size_t>(k, 1, n);

    // Smallest 10-minute-grid half-width whose window holds the k nearest
    // observations.
    const double dk = dist[k - 1];
    const int delta = 10 * static_cast<int>(std::ceil((dk - kEps) / 10.0));

    Band band;
    band.mean = mean;
    band.delta = delta;
    bool any = false;
    for (int v : values) {
        if (std::abs(static_cast<double>(v) - mean) <= static_cast<double>(delta) + kEps) {
            if (!any || v < band.lo)
                band.lo = v;
            if (!any || v > band.hi)
                band.hi = v;
            any = true;
        }
    }
    return band;
}

void TaskSpec::validate() const {
    if (pp_start < 0 || pp_start >= pp_end || pp_end > core::kMinutesPerDay)
        throw TusError("task '" + activity + "': preferred period [" + std::to_string(pp_start) +
                       ", " + std::to_string(pp_end) + ") is not within the day");
    if (min_duration <= 0 || min_duration > max_duration)
        throw TusError("task '" + activity + "': duration band [" + std::to_string(min_duration) +
                       ", " + std::to_string(max_duration) + "] is invalid");
    if (collectivity < 0.0 || collectivity > 1.0)
        throw TusError("task '" + activity + "': collectivity outside [0,1]");
    for (double m : weather_mult)
        if (m <= 0.0)
            throw TusError("task '" + activity + "': weather multiplier must be positive");
    if (freq_per_day < 0.0 || freq_per_week < 0.0)
        throw TusError("task '" + activity + "': negative frequency");
}

double compute_collectivity(std::span<const TusRecord> records, const std::string& activity) {
    auto eps = episodes_matching(records, activity);
    if (eps.empty())
        throw TusError("compute_collectivity: no '" + activity + "' episodes in the given records");
    double total = 0.0;
    double with = 0.0;
    for (const auto& ep : eps) {
        total += ep.duration_min;
        if (ep.with_others)
            with += ep.duration_min;
    }
    return with / total;
}

std::map<core::Weather, double> compute_weather_multipliers(std::span<const TusRecord> records,
                                                            const std::string& activity) {
    auto eps = episodes_matching(records, activity);
    if (eps.empty())
        throw TusError("compute_weather_multipliers: no '" + activity + "' episodes");

    std::map<core::Weather, std::pair<double, int>> by_weather; // sum, count
    double total = 0.0;
    for (const auto& ep : eps) {
        auto& slot = by_weather[ep.weather];
        slot.first += ep.duration_min;
        slot.second += 1;
        total += ep.duration_min;
    }

    std::map<core::Weather, double> out = {{core::Weather::good, 1.0},
                                           {core::Weather::bad, 1.0},
                                           {core::Weather::unknown, 1.0}};
    if (by_weather.size() < 2)
        return out; // single-category signal: no contrast to estimate

    const double overall_mean = total / static_cast<double>(eps.size());
    for (const auto& [w, slot] : by_weather)
        out[w] = (slot.first / slot.second) / overall_mean;
    return out;
}

TaskSpec extract_task_spec(std::span<const TusRecord> records, const std::string& activity,
                           core::DayType day_type, const std::string& type_key,
                           const ExtractOptions& opt) {
    opt.x.validate();
    TypeKeyParts want = split_type_key(type_key);

    // Segmentation levels, widest last: exact type, any employment, any type.
    auto collect = [&](int level, std::vector<const TusRecord*>& matched) {
        matched.clear();
        for (const auto& rec : records) {
            if (rec.day_type != day_type)
                continue;
            TypeKeyParts got = split_type_key(rec.type_key(opt.bands));
            bool ok = true;
            if (level <= 1)
                ok = ok && got.gender == want.gender && got.band == want.band;
            if (level == 0)
                ok = ok && got.employment == want.employment;
            if (level == 2)
                ok = ok && got.gender == want.gender;
            if (ok)
                matched.push_back(&rec);
        }
    };

    std::vector<const TusRecord*> matched;
    std::vector<Episode> eps;
    int level = 0;
    for (; level <= 3; ++level) {
        collect(level, matched);
        eps.clear();
        for (const TusRecord* rec : matched)
            for (const auto& ep : extract_episodes(*rec, activity))
                eps.push_back(ep);
        if (static_cast<int>(eps.size()) >= opt.min_episodes)
            break;
    }
    if (eps.empty())
        throw TusError("extract_task_spec: no '" + activity + "' episodes for type '" + type_key +
                       "' (" + std::string(core::to_string(day_type)) + ") at any segmentation level");

    std::vector<int> durations, starts, ends;
    durations.reserve(eps.size());
    for (const auto& ep : eps) {
        durations.push_back(ep.duration_min);
        starts.push_back(ep.start_min);
        ends.push_back(ep.end_min());
    }

    Band dur_band = x_band(durations, opt.x.x);
    Band start_band = x_band(starts, opt.x.x);
    Band end_band = x_band(ends, opt.x.x);

    TaskSpec spec;
    spec.activity = activity;
    spec.day_type = day_type;
    spec.type_key = type_key;
    spec.min_duration = dur_band.lo;
    spec.max_duration = dur_band.hi;
    spec.pp_start = start_band.lo;
    spec.pp_end = end_band.hi;
    spec.freq_per_day = static_cast<double>(eps.size()) / static_cast<double>(matched.size());
    spec.freq_per_week = 7.0 * spec.freq_per_day;

    double total = 0.0, with = 0.0;
    for (const auto& ep : eps) {
        total += ep.duration_min;
        if (ep.with_others)
            with += ep.duration_min;
    }
    spec.collectivity = with / total;

    std::map<core::Weather, std::pair<double, int>> by_weather;
    for (const auto& ep : eps) {
        auto& slot = by_weather[ep.weather];
        slot.first += ep.duration_min;
        slot.second += 1;
    }
    if (by_weather.size() >= 2) {
        const double overall_mean = total / static_cast<double>(eps.size());
        for (const auto& [w, slot] : by_weather)
            spec.weather_mult[static_cast<int>(w)] = (slot.first / slot.second) / overall_mean;
    }

    auto rule = opt.household_rules.find(activity);
    if (rule != opt.household_rules.end())
        spec.household_rule = rule->second;
    spec.fallback = level > 0;
    spec.validate();
    return spec;
}

std::vector<const TaskSpec*> TaskCatalog::specs_for(const std::string& type_key,
                                                    core::DayType day_type) const {
    auto day_ok = [&](const TaskSpec& s) { return s.day_type == day_type; };

    std::vector<const TaskSpec*> out;
    for (const auto& s : specs)
        if (day_ok(s) && type_key_match(s.type_key, type_key))
            out.push_back(&s);

    bool has_personal = false;
    for (const TaskSpec* s : out)
        has_personal = has_personal || !s->household_level();
    if (has_personal)
        return out;

    // Nearest-parent fallback for types missing from the catalog: drop
    // employment, then age band, then everything.
    TypeKeyParts want = split_type_key(type_key);
    for (int level = 1; level <= 3; ++level) {
        std::vector<const TaskSpec*> widened = out;
        for (const auto& s : specs) {
            if (!day_ok(s) || s.household_level())
                continue;
            TypeKeyParts got = split_type_key(s.type_key);
            bool ok = false;
            if (level == 1)
                ok = got.gender == want.gender && got.band == want.band;
            else if (level == 2)
                ok = got.gender == want.gender;
            else
                ok = true;
            if (ok && std::find(widened.begin(), widened.end(), &s) == widened.end())
                widened.push_back(&s);
        }
        bool found = false;
        for (const TaskSpec* s : widened)
            found = found || !s->household_level();
        if (found)
            return widened;
    }
    return out;
}

std::vector<const TaskSpec*> TaskCatalog::household_specs_for(
    std::span<const std::string> member_types, core::DayType day_type) const {
    std::vector<const TaskSpec*> out;
    for (const auto& s : specs) {
        if (!s.household_level())
            continue;
        if (s.day_type != day_type)
            continue;
        bool match = false;
        for (const auto& type : member_types)
            match = match || type_key_match(s.type_key, type);
        if (match)
            out.push_back(&s);
    }
    return out;
}

std::set<std::string> TaskCatalog::activities() const {
    std::set<std::string> out;
    for (const auto& s : specs)
        out.insert(s.activity);
    return out;
}

void TaskCatalog::validate() const {
    for (const auto& s : specs)
        s.validate();
}

TaskCatalog extract_catalog(std::span<const TusRecord> records, const ExtractOptions& opt) {
    // Observed cells, in first-appearance order for reproducible output.
    std::vector<std::string> types;
    std::vector<std::string> acts;
    std::set<core::DayType> days;
    for (const auto& rec : records) {
        std::string key = rec.type_key(opt.bands);
        if (std::find(types.begin(), types.end(), key) == types.end())
            types.push_back(key);
        days.insert(rec.day_type);
        for (const auto& slot : rec.slots)
            if (std::find(acts.begin(), acts.end(), slot.activity) == acts.end())
                acts.push_back(slot.activity);
    }

    TaskCatalog catalog;
    for (const auto& type : types) {
        for (core::DayType day : days) {
            for (const auto& act : acts) {
                // Skip cells with no direct observation at all.
                bool observed = false;
                for (const auto& rec : records) {
                    if (rec.day_type != day || rec.type_key(opt.bands) != type)
                        continue;
                    for (const auto& slot : rec.slots)
                        observed = observed || slot.activity == act;
                    if (observed)
                        break;
                }
                if (!observed)
                    continue;
                catalog.specs.push_back(extract_task_spec(records, act, day, type, opt));
            }
        }
    }
    catalog.validate();
    return catalog;
}

void save_catalog(const TaskCatalog& catalog, const std::string& path) {
    core::CsvWriter w(path);
    w.row({"activity", "day_type", "type_key", "pp_start", "pp_end", "min_duration", "max_duration",
           "freq_per_day", "freq_per_week", "collectivity", "wx_good", "wx_bad", "wx_unknown",
           "household_rule", "fallback"});
    for (const auto& s : catalog.specs)
        w.row({s.activity, core::to_string(s.day_type), s.type_key, std::to_string(s.pp_start),
               std::to_string(s.pp_end), std::to_string(s.min_duration),
               std::to_string(s.max_duration), core::format_double(s.freq_per_day),
               core::format_double(s.freq_per_week), core::format_double(s.collectivity),
               core::format_double(s.weather_mult[0]), core::format_double(s.weather_mult[1]),
               core::format_double(s.weather_mult[2]), household_rule_name(s.household_rule),
               s.fallback ? "1" : "0"});
}

TaskCatalog load_catalog(const std::string& path) {
    core::CsvReader r(path);
    std::vector<std::string> f;
    if (!r.next(f))
        throw TusError(path + ": empty catalog");
    TaskCatalog catalog;
    while (r.next(f)) {
        if (f.size() != 15)
            throw TusError(path + ":" + std::to_string(r.line()) + ": expected 15 columns");
        const std::string where = path + ":" + std::to_string(r.line());
        TaskSpec s;
        s.activity = f[0];
        s.day_type = core::day_type_from_string(f[1]);
        s.type_key = f[2];
        s.pp_start = core::parse_int(f[3], where);
        s.pp_end = core::parse_int(f[4], where);
        s.min_duration = core::parse_int(f[5], where);
        s.max_duration = core::parse_int(f[6], where);
        s.freq_per_day = core::parse_double(f[7], where);
        s.freq_per_week = core::parse_double(f[8], where);
        s.collectivity = core::parse_double(f[9], where);
        s.weather_mult[0] = core::parse_double(f[10], where);
        s.weather_mult[1] = core::parse_double(f[11], where);
        s.weather_mult[2] = core::parse_double(f[12], where);
        s.household_rule = household_rule_from(f[13]);
        s.fallback = f[14] == "1";
        s.validate();
        catalog.specs.push_back(std::move(s));
    }
    return catalog;
}

std::vector<AssignmentTemplate> generate_daily_assignment(const std::string& type_key,
                                                          const DayInfo& day,
                                                          const TaskCatalog& catalog,
                                                          core::RngStream& day_rng,
                                                          core::RngStream& week_rng) {
    auto specs = catalog.specs_for(type_key, day.day_type);
    if (specs.empty())
        throw TusError("generate_daily_assignment: catalog has no tasks for type '" + type_key +
                       "' on " + core::to_string(day.day_type));

    std::vector<AssignmentTemplate> out;
    for (const TaskSpec* s : specs) {
        if (s->household_level())
            continue; // instantiated once per household by the caller
        int count = 0;
        if (is_weekly(*s)) {
            // Weekly tasks land on days drawn once per week per spec.
            int n_week = week_rng.stochastic_round(s->freq_per_week);
            for (int i = 0; i < n_week; ++i)
                if (week_rng.next_int(0, 6) == day.day_of_week)
                    ++count;
        } else {
            count = day_rng.stochastic_round(s->freq_per_day);
        }
        if (count >= 1)
            out.push_back(AssignmentTemplate{s, count});
    }
    return out;
}

} // namespace actiload::tusdata
