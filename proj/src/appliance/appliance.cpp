// SPDX-License-Identifier: Apache-2.0
#include "actiload/appliance/appliance.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "actiload/core/csv.hpp"

namespace actiload::appliance {

namespace {

int parse_season_or_any(const std::string& s) {
    if (s == "*")
        return -1;
    if (s == "winter")
        return static_cast<int>(core::Season::winter);
    if (s == "spring")
        return static_cast<int>(core::Season::spring);
    if (s == "summer")
        return static_cast<int>(core::Season::summer);
    if (s == "autumn")
        return static_cast<int>(core::Season::autumn);
    throw ApplianceError("unknown season '" + s + "'");
}

int parse_day_type_or_any(const std::string& s) {
    if (s == "*")
        return -1;
    return static_cast<int>(core::day_type_from_string(s));
}

std::vector<std::pair<int, int>> parse_windows(const std::string& value,
                                               const std::string& context) {
    // "23:00-07:00, 13:00-15:30"; a range crossing midnight splits in two.
    std::vector<std::pair<int, int>> out;
    for (const auto& item : core::split_list(value)) {
        std::size_t dash = item.find('-');
        if (dash == std::string::npos)
            throw ApplianceError(context + ": expected 'HH:MM-HH:MM', got '" + item + "'");
        int a = core::parse_minute_of_day(core::trim(item.substr(0, dash)));
        int b = core::parse_minute_of_day(core::trim(item.substr(dash + 1)));
        if (a == b)
            throw ApplianceError(context + ": empty window '" + item + "'");
        if (a < b) {
            out.emplace_back(a, b);
        } else {
            out.emplace_back(a, core::kMinutesPerDay);
            if (b > 0)
                out.emplace_back(0, b);
        }
    }
    return out;
}

std::string format_windows(const std::vector<std::pair<int, int>>& windows) {
    std::string out;
    for (std::size_t i = 0; i < windows.size(); ++i) {
        if (i)
            out += ", ";
        out += core::format_minute_of_day(windows[i].first) + "-" +
               (windows[i].second == core::kMinutesPerDay
                    ? "24:00"
                    : core::format_minute_of_day(windows[i].second));
    }
    return out;
}

} // namespace

TimeBands TimeBands::defaults() {
    TimeBands b;
    b.starts = {0, 420, 660, 840, 1080};
    b.names = {"night", "morning", "midday", "afternoon", "evening"};
    return b;
}

void ApplianceModel::validate() const {
    if (category.empty())
        throw ApplianceError("appliance without a category name");
    if (unit_power_w < 0.0 || standby_w < 0.0)
        throw ApplianceError("appliance '" + category + "': negative power");
    if (kind == AumKind::fractional && (fraction <= 0.0 || fraction > 1.0))
        throw ApplianceError("appliance '" + category + "': fraction must be in (0, 1]");
    if (kind == AumKind::fractional && burst_minutes < 1)
        throw ApplianceError("appliance '" + category + "': burst must be at least one minute");
    if (kind == AumKind::cycle) {
        if (cycle.total_minutes() <= 0)
            throw ApplianceError("appliance '" + category + "': cycle has no duration");
        for (const auto& p : cycle.phases)
            if (p.watts < 0.0 || p.minutes < 0)
                throw ApplianceError("appliance '" + category + "': bad cycle phase");
    }
}

void DhwConfig::validate() const {
    if (!present)
        return;
    if (tank_liters <= 0.0 || heater_w < 0.0 || loss_ua_w_per_k < 0.0)
        throw ApplianceError("dhw: tank, heater and loss parameters must be non-negative");
    if (setpoint_c <= inlet_c)
        throw ApplianceError("dhw: setpoint must exceed the inlet temperature");
    if (showers_per_week < 0 || shower_liters < 0.0 || shower_minutes < 1)
        throw ApplianceError("dhw: bad shower parameters");
}

void ApplianceCatalog::validate() const {
    if (bands.starts.empty() || bands.starts[0] != 0 || bands.starts.size() != bands.names.size())
        throw ApplianceError("time bands must start at 00:00 and carry one name per band");
    for (std::size_t i = 1; i < bands.starts.size(); ++i)
        if (bands.starts[i] <= bands.starts[i - 1])
            throw ApplianceError("time bands must be ascending");

    std::set<std::string> seen;
    for (const auto& m : models) {
        m.validate();
        if (!seen.insert(m.category).second)
            throw ApplianceError("duplicate appliance category '" + m.category + "'");
    }
    for (const auto& r : pu_rules) {
        if (r.probability < 0.0 || r.probability > 1.0)
            throw ApplianceError("pu rule " + r.activity + "/" + r.appliance +
                                 ": probability outside [0,1]");
        if (model_index(r.appliance) < 0)
            throw ApplianceError("pu rule references unknown appliance '" + r.appliance + "'");
        if (r.band >= static_cast<int>(bands.names.size()))
            throw ApplianceError("pu rule references band index out of range");
    }
    for (const auto& c : composites) {
        if (c.baseline_w_by_band.size() != bands.names.size())
            throw ApplianceError("composite '" + c.name + "': baseline needs one value per band");
        for (double w : c.baseline_w_by_band)
            if (w < 0.0)
                throw ApplianceError("composite '" + c.name + "': negative baseline");
        for (const auto& m : c.members)
            if (model_index(m) < 0)
                throw ApplianceError("composite '" + c.name + "' references unknown appliance '" +
                                     m + "'");
    }
    dhw.validate();
}

ApplianceCatalog parse_appliance_catalog(const std::string& text, const std::string& origin) {
    core::ConfigDoc doc = core::ConfigDoc::parse_string(text, origin);
    ApplianceCatalog catalog;

    if (const core::ConfigSection* bands = doc.find("bands")) {
        catalog.bands.starts.clear();
        catalog.bands.names.clear();
        for (const auto& e : bands->entries) {
            catalog.bands.names.push_back(e.key);
            catalog.bands.starts.push_back(core::parse_minute_of_day(e.value));
        }
    }

    for (const core::ConfigSection* s : doc.with_prefix("appliance.")) {
        ApplianceModel m;
        m.category = s->name.substr(std::string("appliance.").size());
        std::string kind = s->get_or("aum", "forced");
        if (kind == "forced")
            m.kind = AumKind::forced;
        else if (kind == "fractional")
            m.kind = AumKind::fractional;
        else if (kind == "cycle")
            m.kind = AumKind::cycle;
        else
            throw ApplianceError("[" + s->name + "] unknown aum kind '" + kind + "'");
        m.unit_power_w = s->get_double_or("power", 0.0);
        m.standby_w = s->get_double_or("standby", 0.0);
        m.fraction = s->get_double_or("fraction", 1.0);
        m.burst_minutes = s->get_int_or("burst", 5);
        if (auto cycle = s->get("cycle")) {
            for (const auto& item : core::split_list(*cycle)) {
                std::size_t colon = item.find(':');
                if (colon == std::string::npos)
                    throw ApplianceError("[" + s->name + "] cycle: expected 'minutes:watts' phases");
                CyclePhase phase;
                phase.minutes = core::parse_int(item.substr(0, colon), s->name + " cycle");
                phase.watts = core::parse_double(item.substr(colon + 1), s->name + " cycle");
                m.cycle.phases.push_back(phase);
            }
        }
        catalog.models.push_back(std::move(m));
    }

    if (const core::ConfigSection* pu = doc.find("pu")) {
        for (const auto& e : pu->entries) {
            if (e.key != "row")
                throw ApplianceError("[pu] unexpected key '" + e.key + "' (rows use 'row = ...')");
            auto fields = core::split_list(e.value);
            if (fields.size() != 3 && fields.size() != 6)
                throw ApplianceError("[pu] line " + std::to_string(e.line) +
                                     ": expected 'activity, appliance, p' or "
                                     "'activity, appliance, p, season, day_type, band'");
            PuRule r;
            r.activity = fields[0];
            r.appliance = fields[1];
            r.probability = core::parse_double(fields[2], "[pu] probability");
            if (fields.size() == 6) {
                r.season = parse_season_or_any(fields[3]);
                r.day_type = parse_day_type_or_any(fields[4]);
                if (fields[5] != "*") {
                    r.band = catalog.bands.index_of(fields[5]);
                    if (r.band < 0)
                        throw ApplianceError("[pu] line " + std::to_string(e.line) +
                                             ": unknown band '" + fields[5] + "'");
                }
            }
            catalog.pu_rules.push_back(std::move(r));
        }
    }

    for (const core::ConfigSection* s : doc.with_prefix("composite.")) {
        CompositeDef c;
        c.name = s->name.substr(std::string("composite.").size());
        if (auto members = s->get("members"))
            c.members = core::split_list(*members);
        auto baseline = s->require("baseline");
        for (const auto& item : core::split_list(baseline))
            c.baseline_w_by_band.push_back(core::parse_double(item, "[" + s->name + "] baseline"));
        catalog.composites.push_back(std::move(c));
    }

    if (const core::ConfigSection* dhw = doc.find("dhw")) {
        DhwConfig& d = catalog.dhw;
        d.present = true;
        d.tank_liters = dhw->get_double_or("tank_liters", d.tank_liters);
        d.setpoint_c = dhw->get_double_or("setpoint_c", d.setpoint_c);
        d.inlet_c = dhw->get_double_or("inlet_c", d.inlet_c);
        d.ambient_c = dhw->get_double_or("ambient_c", d.ambient_c);
        d.heater_w = dhw->get_double_or("heater_w", d.heater_w);
        d.loss_ua_w_per_k = dhw->get_double_or("loss_ua_w_per_k", d.loss_ua_w_per_k);
        d.windows = parse_windows(dhw->get_or("heating_windows", "23:00-07:00"), "[dhw] heating_windows");
        d.showers_per_week = dhw->get_int_or("showers_per_week", d.showers_per_week);
        d.shower_liters = dhw->get_double_or("shower_liters", d.shower_liters);
        d.shower_temp_c = dhw->get_double_or("shower_temp_c", d.shower_temp_c);
        d.shower_minutes = dhw->get_int_or("shower_minutes", d.shower_minutes);
        if (auto ns = dhw->get("no_shower_windows"))
            d.no_shower_windows = parse_windows(*ns, "[dhw] no_shower_windows");
    }

    if (const core::ConfigSection* rep = doc.find("reporting")) {
        if (auto cooking = rep->get("cooking_appliances"))
            catalog.cooking_categories = core::split_list(*cooking);
        if (auto hyg = rep->get("hygiene_activities"))
            catalog.hygiene_activities = core::split_list(*hyg);
    }

    catalog.validate();
    return catalog;
}

ApplianceCatalog load_appliance_catalog(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ApplianceError("cannot open appliance catalog '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_appliance_catalog(buf.str(), path);
}

void save_appliance_catalog(const ApplianceCatalog& catalog, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw ApplianceError("cannot write appliance catalog '" + path + "'");

    out << "[bands]\n";
    for (std::size_t i = 0; i < catalog.bands.names.size(); ++i)
        out << catalog.bands.names[i] << " = " << core::format_minute_of_day(catalog.bands.starts[i])
            << "\n";
    out << "\n";

    for (const auto& m : catalog.models) {
        out << "[appliance." << m.category << "]\n";
        switch (m.kind) {
        case AumKind::forced: out << "aum = forced\n"; break;
        case AumKind::fractional: out << "aum = fractional\n"; break;
        case AumKind::cycle: out << "aum = cycle\n"; break;
        }
        if (m.kind != AumKind::cycle)
            out << "power = " << core::format_double(m.unit_power_w) << "\n";
        if (m.standby_w > 0.0)
            out << "standby = " << core::format_double(m.standby_w) << "\n";
        if (m.kind == AumKind::fractional) {
            out << "fraction = " << core::format_double(m.fraction) << "\n";
            out << "burst = " << m.burst_minutes << "\n";
        }
        if (m.kind == AumKind::cycle) {
            out << "cycle = ";
            for (std::size_t i = 0; i < m.cycle.phases.size(); ++i) {
                if (i)
                    out << ", ";
                out << m.cycle.phases[i].minutes << ":"
                    << core::format_double(m.cycle.phases[i].watts);
            }
            out << "\n";
        }
        out << "\n";
    }

    if (!catalog.pu_rules.empty()) {
        out << "[pu]\n";
        const char* seasons[] = {"winter", "spring", "summer", "autumn"};
        const char* day_types[] = {"weekday", "saturday", "sunday"};
        for (const auto& r : catalog.pu_rules) {
            out << "row = " << r.activity << ", " << r.appliance << ", "
                << core::format_double(r.probability);
            if (r.season >= 0 || r.day_type >= 0 || r.band >= 0) {
                out << ", " << (r.season >= 0 ? seasons[r.season] : "*") << ", "
                    << (r.day_type >= 0 ? day_types[r.day_type] : "*") << ", "
                    << (r.band >= 0 ? catalog.bands.names[static_cast<std::size_t>(r.band)] : "*");
            }
            out << "\n";
        }
        out << "\n";
    }

    for (const auto& c : catalog.composites) {
        out << "[composite." << c.name << "]\n";
        if (!c.members.empty()) {
            out << "members = ";
            for (std::size_t i = 0; i < c.members.size(); ++i)
                out << (i ? ", " : "") << c.members[i];
            out << "\n";
        }
        out << "baseline = ";
        for (std::size_t i = 0; i < c.baseline_w_by_band.size(); ++i)
            out << (i ? ", " : "") << core::format_double(c.baseline_w_by_band[i]);
        out << "\n\n";
    }

    if (catalog.dhw.present) {
        const DhwConfig& d = catalog.dhw;
        out << "[dhw]\n";
        out << "tank_liters = " << core::format_double(d.tank_liters) << "\n";
        out << "setpoint_c = " << core::format_double(d.setpoint_c) << "\n";
        out << "inlet_c = " << core::format_double(d.inlet_c) << "\n";
        out << "ambient_c = " << core::format_double(d.ambient_c) << "\n";
        out << "heater_w = " << core::format_double(d.heater_w) << "\n";
        out << "loss_ua_w_per_k = " << core::format_double(d.loss_ua_w_per_k) << "\n";
        out << "heating_windows = " << format_windows(d.windows) << "\n";
        out << "showers_per_week = " << d.showers_per_week << "\n";
        out << "shower_liters = " << core::format_double(d.shower_liters) << "\n";
        out << "shower_temp_c = " << core::format_double(d.shower_temp_c) << "\n";
        out << "shower_minutes = " << d.shower_minutes << "\n";
        if (!d.no_shower_windows.empty())
            out << "no_shower_windows = " << format_windows(d.no_shower_windows) << "\n";
        out << "\n";
    }

    if (!catalog.cooking_categories.empty() || !catalog.hygiene_activities.empty()) {
        out << "[reporting]\n";
        if (!catalog.cooking_categories.empty()) {
            out << "cooking_appliances = ";
            for (std::size_t i = 0; i < catalog.cooking_categories.size(); ++i)
                out << (i ? ", " : "") << catalog.cooking_categories[i];
            out << "\n";
        }
        if (!catalog.hygiene_activities.empty()) {
            out << "hygiene_activities = ";
            for (std::size_t i = 0; i < catalog.hygiene_activities.size(); ++i)
                out << (i ? ", " : "") << catalog.hygiene_activities[i];
            out << "\n";
        }
    }
}

void LoadCurve::validate() const {
    if (step_minutes < 1)
        throw ApplianceError("load curve: step must be at least one minute");
    for (double v : values_w)
        if (v < 0.0)
            throw ApplianceError("load curve: negative power value");
}

LoadCurve aggregate_load(std::span<const LoadCurve> curves) {
    if (curves.empty())
        throw ApplianceError("aggregate_load: no curves");
    const LoadCurve& first = curves.front();
    LoadCurve out = first;
    for (const auto& c : curves) {
        if (c.values_w.size() != first.values_w.size() || c.step_minutes != first.step_minutes ||
            c.start_minute != first.start_minute ||
            core::days_from_civil(c.start_date) != core::days_from_civil(first.start_date))
            throw ApplianceError("aggregate_load: curves are not aligned");
    }
    for (std::size_t i = 0; i < out.values_w.size(); ++i) {
        double sum = 0.0;
        for (const auto& c : curves)
            sum += c.values_w[i];
        out.values_w[i] = sum / static_cast<double>(curves.size());
    }
    return out;
}

LoadCurve reduce_resolution(const LoadCurve& curve, int step_minutes) {
    if (step_minutes <= curve.step_minutes || step_minutes % curve.step_minutes != 0)
        throw ApplianceError("reduce_resolution: target step must be a multiple of the source step");
    int group = step_minutes / curve.step_minutes;
    LoadCurve out;
    out.start_date = curve.start_date;
    out.start_minute = curve.start_minute;
    out.step_minutes = step_minutes;
    std::size_t n = curve.values_w.size() / static_cast<std::size_t>(group);
    out.values_w.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        double sum = 0.0;
        for (int k = 0; k < group; ++k)
            sum += curve.values_w[i * static_cast<std::size_t>(group) + static_cast<std::size_t>(k)];
        out.values_w.push_back(sum / group);
    }
    return out;
}

void save_load_curve(const LoadCurve& curve, const std::string& path) {
    core::CsvWriter w(path);
    w.row({"start_date", "start_minute", "step_minutes"});
    w.row({core::format_date(curve.start_date), std::to_string(curve.start_minute),
           std::to_string(curve.step_minutes)});
    w.row({"index", "watts"});
    for (std::size_t i = 0; i < curve.values_w.size(); ++i)
        w.row({std::to_string(i), core::format_double(curve.values_w[i])});
}

LoadCurve load_load_curve(const std::string& path) {
    core::CsvReader r(path);
    std::vector<std::string> f;
    LoadCurve curve;
    if (!r.next(f) || f.empty() || f[0] != "start_date")
        throw ApplianceError(path + ": not a load curve file");
    if (!r.next(f) || f.size() < 3)
        throw ApplianceError(path + ": missing curve header row");
    curve.start_date = core::parse_date(f[0]);
    curve.start_minute = core::parse_int(f[1], path + " start_minute");
    curve.step_minutes = core::parse_int(f[2], path + " step_minutes");
    if (!r.next(f))
        throw ApplianceError(path + ": missing column header");
    while (r.next(f)) {
        if (f.size() < 2)
            throw ApplianceError(path + ":" + std::to_string(r.line()) + ": bad row");
        curve.values_w.push_back(core::parse_double(f[1], path + " watts"));
    }
    curve.validate();
    return curve;
}

} // namespace actiload::appliance
