// SPDX-License-Identifier: Apache-2.0
#include "actiload/popsynth/population.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>
#include <sstream>

#include "actiload/core/config.hpp"
#include "actiload/core/csv.hpp"

namespace actiload::popsynth {

namespace {

// Attribute scopes for sequential sampling. Anything else with a marginal is
// carried as an opaque individual attribute.
const std::set<std::string> kHouseholdAttrs = {"household_size", "family_type", "energy_tariff",
                                               "absence"};
const std::set<std::string> kIndividualAttrs = {"gender", "age_band", "employment"};
const std::set<std::string> kDwellingAttrs = {"location", "dwelling_type", "insulation"};

using AttrContext = std::map<std::string, std::string>;

CategoricalDist parse_dist_value(const std::string& attribute, const std::string& value,
                                 const std::string& context) {
    // "label:prob, label:prob, ..."
    CategoricalDist dist;
    dist.attribute = attribute;
    for (const auto& item : core::split_list(value)) {
        std::size_t colon = item.rfind(':');
        if (colon == std::string::npos)
            throw SpecError(context + ": expected 'label:probability' items, got '" + item + "'");
        dist.labels.push_back(core::trim(item.substr(0, colon)));
        dist.probs.push_back(core::parse_double(item.substr(colon + 1), context));
    }
    return dist;
}

std::string join_parent_values(const std::vector<std::string>& parents, const AttrContext& ctx,
                               const std::string& attribute) {
    std::string key;
    for (std::size_t i = 0; i < parents.size(); ++i) {
        auto it = ctx.find(parents[i]);
        if (it == ctx.end())
            throw SpecError("conditional '" + attribute + "': parent attribute '" + parents[i] +
                            "' is not available at sampling time");
        if (i)
            key += '|';
        key += it->second;
    }
    return key;
}

const CategoricalDist& conditional_row(const Conditional& cond, const AttrContext& ctx) {
    std::string key = join_parent_values(cond.parents, ctx, cond.attribute);
    auto it = cond.table.find(key);
    if (it != cond.table.end())
        return it->second;
    it = cond.table.find("*");
    if (it != cond.table.end())
        return it->second;
    throw SpecError("conditional '" + cond.attribute + "': no row for parent combination '" + key +
                    "' and no '*' fallback");
}

std::string sample_attr(const PopulationSpec& spec, const std::string& attribute,
                        const AttrContext& ctx, core::RngStream& rng) {
    if (const Conditional* cond = spec.conditional(attribute)) {
        const CategoricalDist& row = conditional_row(*cond, ctx);
        return row.labels[row.sample(rng)];
    }
    const CategoricalDist* m = spec.marginal(attribute);
    if (!m)
        throw SpecError("no marginal or conditional distribution for attribute '" + attribute + "'");
    return m->labels[m->sample(rng)];
}

// Restrict an age-band draw to adult bands (lower bound >= 15); the first
// household member anchors the household as an adult.
std::string sample_adult_age_band(const PopulationSpec& spec, const AttrContext& ctx,
                                  core::RngStream& rng) {
    const CategoricalDist* base = spec.marginal("age_band");
    CategoricalDist from_cond;
    if (const Conditional* cond = spec.conditional("age_band")) {
        from_cond = conditional_row(*cond, ctx);
        base = &from_cond;
    }
    if (!base)
        throw SpecError("no distribution for attribute 'age_band'");
    std::vector<double> weights(base->labels.size(), 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < base->labels.size(); ++i) {
        for (std::size_t j = 0; j < spec.age_bands.names.size(); ++j) {
            if (spec.age_bands.names[j] == base->labels[i] && spec.age_bands.lower[j] >= 15) {
                weights[i] = base->probs[i];
                total += weights[i];
            }
        }
    }
    if (total <= 0.0)
        throw SpecError("age_band distribution has no adult bands to anchor a household");
    return base->labels[rng.pick(weights)];
}

double ownership_probability(const OwnershipRule& rule, const AttrContext& ctx) {
    for (const auto& ov : rule.overrides) {
        auto it = ctx.find(ov.attribute);
        if (it != ctx.end() && it->second == ov.value)
            return ov.prob;
    }
    return rule.base;
}

std::string normal_context(const std::string& attr) {
    return "distribution '" + attr + "'";
}

} // namespace

void CategoricalDist::validate() const {
    if (labels.empty())
        throw SpecError(normal_context(attribute) + " is empty");
    double sum = 0.0;
    for (double p : probs) {
        if (p < 0.0 || p > 1.0)
            throw SpecError(normal_context(attribute) + " has probability " + core::format_double(p) +
                            " outside [0,1]");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw SpecError(normal_context(attribute) + " sums to " + core::format_double(sum) +
                        ", expected 1");
    std::set<std::string> seen;
    for (const auto& l : labels)
        if (!seen.insert(l).second)
            throw SpecError(normal_context(attribute) + " repeats label '" + l + "'");
}

std::size_t CategoricalDist::sample(core::RngStream& rng) const {
    return rng.pick(probs);
}

std::optional<std::size_t> CategoricalDist::index_of(const std::string& label) const {
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] == label)
            return i;
    return std::nullopt;
}

AgeBands AgeBands::default_bands() {
    AgeBands b;
    b.lower = {0, 15, 25, 50, 65};
    b.upper = {14, 24, 49, 64, 200};
    b.names = {"0-14", "15-24", "25-49", "50-64", "65+"};
    return b;
}

std::size_t AgeBands::band_of(int age) const {
    for (std::size_t i = 0; i < lower.size(); ++i)
        if (age >= lower[i] && age <= upper[i])
            return i;
    return lower.size() - 1;
}

const CategoricalDist* PopulationSpec::marginal(const std::string& attribute) const {
    for (const auto& m : marginals)
        if (m.attribute == attribute)
            return &m;
    return nullptr;
}

const Conditional* PopulationSpec::conditional(const std::string& attribute) const {
    for (const auto& c : conditionals)
        if (c.attribute == attribute)
            return &c;
    return nullptr;
}

void PopulationSpec::validate() const {
    std::set<std::string> known;
    for (const auto& m : marginals) {
        m.validate();
        known.insert(m.attribute);
    }
    for (const auto& c : conditionals)
        known.insert(c.attribute);
    for (const auto& name : {"household_size", "gender", "age_band"})
        if (!known.count(name))
            throw SpecError(std::string("population spec must define a distribution for '") + name +
                            "'");
    for (const auto& c : conditionals) {
        if (c.parents.empty())
            throw SpecError("conditional '" + c.attribute + "' lists no parent attributes");
        for (const auto& p : c.parents)
            if (!known.count(p))
                throw SpecError("conditional '" + c.attribute + "' references unknown parent '" + p +
                                "'");
        if (c.table.empty())
            throw SpecError("conditional '" + c.attribute + "' has no rows");
        for (const auto& [key, dist] : c.table) {
            (void)key;
            dist.validate();
        }
    }
    if (const CategoricalDist* hs = marginal("household_size")) {
        for (const auto& label : hs->labels) {
            int size = core::parse_int(label, "household_size label");
            if (size < 1 || size > 12)
                throw SpecError("household_size label '" + label + "' outside 1..12");
        }
    }
    if (const CategoricalDist* ab = marginal("age_band")) {
        for (const auto& label : ab->labels) {
            bool found = false;
            for (const auto& n : age_bands.names)
                found = found || n == label;
            if (!found)
                throw SpecError("age_band label '" + label + "' is not a configured band");
        }
    }
    for (const auto& rule : ownership) {
        if (rule.base < 0.0 || rule.base > 1.0)
            throw SpecError("ownership '" + rule.category + "' base probability outside [0,1]");
        for (const auto& ov : rule.overrides)
            if (ov.prob < 0.0 || ov.prob > 1.0)
                throw SpecError("ownership '" + rule.category + "' override " + ov.attribute + ":" +
                                ov.value + " outside [0,1]");
    }
    if (floor_area.min_m2 <= 0.0 || floor_area.base_sd_m2 < 0.0)
        throw SpecError("floor_area parameters must be positive");
}

std::string individual_type_key(const std::string& gender, int age, const std::string& employment,
                                const AgeBands& bands) {
    char initial = gender.empty() ? '?' : static_cast<char>(std::toupper(gender[0]));
    return std::string(1, initial) + "_" + bands.names[bands.band_of(age)] + "_" + employment;
}

PopulationSpec parse_population_spec(const std::string& text, const std::string& origin) {
    core::ConfigDoc doc = core::ConfigDoc::parse_string(text, origin);
    PopulationSpec spec;

    if (const core::ConfigSection* pop = doc.find("population")) {
        if (auto bands = pop->get("age_bands")) {
            AgeBands b;
            for (const auto& item : core::split_list(*bands)) {
                std::size_t dash = item.find('-');
                if (dash != std::string::npos) {
                    b.lower.push_back(core::parse_int(item.substr(0, dash), "age band"));
                    b.upper.push_back(core::parse_int(item.substr(dash + 1), "age band"));
                } else if (!item.empty() && item.back() == '+') {
                    b.lower.push_back(core::parse_int(item.substr(0, item.size() - 1), "age band"));
                    b.upper.push_back(200);
                } else {
                    throw SpecError("bad age band '" + item + "' (expected LO-HI or LO+)");
                }
                b.names.push_back(item);
            }
            spec.age_bands = b;
        }
        spec.max_age = pop->get_int_or("max_age", spec.max_age);
    }

    if (const core::ConfigSection* fa = doc.find("floor_area")) {
        spec.floor_area.base_mean_m2 = fa->get_double_or("base_mean", spec.floor_area.base_mean_m2);
        spec.floor_area.base_sd_m2 = fa->get_double_or("base_sd", spec.floor_area.base_sd_m2);
        spec.floor_area.min_m2 = fa->get_double_or("min", spec.floor_area.min_m2);
        spec.floor_area.per_extra_member_m2 =
            fa->get_double_or("per_extra_member", spec.floor_area.per_extra_member_m2);
    }

    for (const core::ConfigSection* s : doc.with_prefix("marginal.")) {
        CategoricalDist dist;
        dist.attribute = s->name.substr(std::string("marginal.").size());
        for (const auto& e : s->entries) {
            dist.labels.push_back(e.key);
            dist.probs.push_back(core::parse_double(e.value, "[" + s->name + "] " + e.key));
        }
        spec.marginals.push_back(std::move(dist));
    }

    for (const core::ConfigSection* s : doc.with_prefix("conditional.")) {
        Conditional cond;
        cond.attribute = s->name.substr(std::string("conditional.").size());
        for (const auto& e : s->entries) {
            if (e.key == "parents") {
                cond.parents = core::split_list(e.value);
                continue;
            }
            cond.table[e.key] =
                parse_dist_value(cond.attribute, e.value, "[" + s->name + "] " + e.key);
        }
        spec.conditionals.push_back(std::move(cond));
    }

    for (const core::ConfigSection* s : doc.with_prefix("ownership.")) {
        OwnershipRule rule;
        rule.category = s->name.substr(std::string("ownership.").size());
        for (const auto& e : s->entries) {
            if (e.key == "base") {
                rule.base = core::parse_double(e.value, "[" + s->name + "] base");
                continue;
            }
            std::size_t colon = e.key.find(':');
            if (colon == std::string::npos)
                throw SpecError("[" + s->name + "] '" + e.key +
                                "': expected 'base' or 'attribute:value' override");
            rule.overrides.push_back(OwnershipRule::Override{
                e.key.substr(0, colon), e.key.substr(colon + 1),
                core::parse_double(e.value, "[" + s->name + "] " + e.key)});
        }
        spec.ownership.push_back(std::move(rule));
    }

    spec.validate();
    return spec;
}

PopulationSpec load_population_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw SpecError("cannot open population spec '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_population_spec(buf.str(), path);
}

Population synthesize_population(const PopulationSpec& spec, int n_households, std::uint64_t seed) {
    if (n_households < 0)
        throw SpecError("n_households must be >= 0");
    spec.validate();

    Population pop;
    pop.households.reserve(static_cast<std::size_t>(n_households));
    pop.dwellings.reserve(static_cast<std::size_t>(n_households));

    std::uint32_t next_individual = 0;
    std::uint32_t next_appliance = 0;

    for (int h = 0; h < n_households; ++h) {
        auto hh_rng = core::RngStream::derive(seed, {core::streams::kPopHousehold,
                                                     static_cast<std::uint64_t>(h)});
        AttrContext ctx;

        Household household;
        household.id = static_cast<std::uint32_t>(h);
        ctx["household_size"] = sample_attr(spec, "household_size", ctx, hh_rng);
        int size = core::parse_int(ctx["household_size"], "household_size");
        if (spec.marginal("family_type") || spec.conditional("family_type"))
            ctx["family_type"] = sample_attr(spec, "family_type", ctx, hh_rng);
        if (spec.marginal("energy_tariff") || spec.conditional("energy_tariff"))
            ctx["energy_tariff"] = sample_attr(spec, "energy_tariff", ctx, hh_rng);
        ctx["absence"] = (spec.marginal("absence") || spec.conditional("absence"))
                             ? sample_attr(spec, "absence", ctx, hh_rng)
                             : "none";
        household.family_type = ctx.count("family_type") ? ctx["family_type"] : "unspecified";
        household.energy_tariff = ctx.count("energy_tariff") ? ctx["energy_tariff"] : "base";
        household.absence = ctx["absence"];

        for (int m = 0; m < size; ++m) {
            auto m_rng = core::RngStream::derive(
                seed, {core::streams::kPopMember, static_cast<std::uint64_t>(h),
                       static_cast<std::uint64_t>(m)});
            AttrContext mctx = ctx;

            Individual ind;
            ind.id = next_individual++;
            ind.household_id = household.id;
            ind.gender = sample_attr(spec, "gender", mctx, m_rng);
            mctx["gender"] = ind.gender;

            std::string band_label = (m == 0) ? sample_adult_age_band(spec, mctx, m_rng)
                                              : sample_attr(spec, "age_band", mctx, m_rng);
            mctx["age_band"] = band_label;
            std::size_t band = 0;
            for (std::size_t i = 0; i < spec.age_bands.names.size(); ++i)
                if (spec.age_bands.names[i] == band_label)
                    band = i;
            int hi = std::min(spec.age_bands.upper[band], spec.max_age);
            ind.age = m_rng.next_int(spec.age_bands.lower[band], hi);

            ind.employment = (spec.marginal("employment") || spec.conditional("employment"))
                                 ? sample_attr(spec, "employment", mctx, m_rng)
                                 : "active";
            mctx["employment"] = ind.employment;

            for (const auto& marg : spec.marginals) {
                if (kHouseholdAttrs.count(marg.attribute) || kIndividualAttrs.count(marg.attribute) ||
                    kDwellingAttrs.count(marg.attribute))
                    continue;
                std::string value = sample_attr(spec, marg.attribute, mctx, m_rng);
                mctx[marg.attribute] = value;
                ind.extras.emplace_back(marg.attribute, value);
            }

            ind.type_key = individual_type_key(ind, spec.age_bands);
            household.member_ids.push_back(ind.id);
            pop.individuals.push_back(std::move(ind));
        }

        auto d_rng = core::RngStream::derive(seed, {core::streams::kPopDwelling,
                                                    static_cast<std::uint64_t>(h)});
        Dwelling dw;
        dw.id = household.id;
        dw.household_id = household.id;
        dw.location = (spec.marginal("location") || spec.conditional("location"))
                          ? sample_attr(spec, "location", ctx, d_rng)
                          : "default";
        ctx["location"] = dw.location;
        dw.dwelling_type = (spec.marginal("dwelling_type") || spec.conditional("dwelling_type"))
                               ? sample_attr(spec, "dwelling_type", ctx, d_rng)
                               : "house";
        ctx["dwelling_type"] = dw.dwelling_type;
        dw.insulation = (spec.marginal("insulation") || spec.conditional("insulation"))
                            ? sample_attr(spec, "insulation", ctx, d_rng)
                            : "medium";
        ctx["insulation"] = dw.insulation;

        // Base area from a normal draw, shifted up per member beyond the first.
        double u1 = d_rng.next_double();
        double u2 = d_rng.next_double();
        double gauss = std::sqrt(-2.0 * std::log(std::max(u1, 1e-300))) *
                       std::cos(2.0 * 3.14159265358979323846 * u2);
        double area = spec.floor_area.base_mean_m2 + spec.floor_area.base_sd_m2 * gauss +
                      spec.floor_area.per_extra_member_m2 * (size - 1);
        dw.floor_area_m2 = std::max(spec.floor_area.min_m2, area);

        auto a_rng = core::RngStream::derive(seed, {core::streams::kPopAppliance,
                                                    static_cast<std::uint64_t>(h)});
        for (const auto& rule : spec.ownership) {
            double p = ownership_probability(rule, ctx);
            if (a_rng.bernoulli(p)) {
                ApplianceInstance inst;
                inst.id = next_appliance++;
                inst.dwelling_id = dw.id;
                inst.category = rule.category;
                dw.appliance_ids.push_back(inst.id);
                pop.appliances.push_back(std::move(inst));
            }
        }

        pop.households.push_back(std::move(household));
        pop.dwellings.push_back(std::move(dw));
    }

    pop.check_integrity();
    return pop;
}

void Population::check_integrity() const {
    for (const auto& hh : households) {
        if (hh.member_ids.empty())
            throw SpecError("household " + std::to_string(hh.id) + " has no members");
        if (hh.member_ids.size() > 12)
            throw SpecError("household " + std::to_string(hh.id) + " exceeds 12 members");
        for (auto mid : hh.member_ids) {
            if (mid >= individuals.size() || individuals[mid].household_id != hh.id)
                throw SpecError("household " + std::to_string(hh.id) + " member id " +
                                std::to_string(mid) + " does not resolve");
        }
    }
    if (dwellings.size() != households.size())
        throw SpecError("expected exactly one dwelling per household");
    for (const auto& dw : dwellings) {
        if (dw.household_id >= households.size())
            throw SpecError("dwelling " + std::to_string(dw.id) + " household does not resolve");
        if (dw.floor_area_m2 <= 0.0)
            throw SpecError("dwelling " + std::to_string(dw.id) + " has non-positive floor area");
        for (auto aid : dw.appliance_ids)
            if (aid >= appliances.size() || appliances[aid].dwelling_id != dw.id)
                throw SpecError("dwelling " + std::to_string(dw.id) + " appliance id " +
                                std::to_string(aid) + " does not resolve");
    }
    for (const auto& ind : individuals)
        if (ind.age < 0)
            throw SpecError("individual " + std::to_string(ind.id) + " has negative age");
}

namespace {

std::string join_ids(const std::vector<std::uint32_t>& ids) {
    std::string out;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (i)
            out += ';';
        out += std::to_string(ids[i]);
    }
    return out;
}

std::vector<std::uint32_t> split_ids(const std::string& s) {
    std::vector<std::uint32_t> out;
    std::string cur;
    std::stringstream ss(s);
    while (std::getline(ss, cur, ';'))
        if (!cur.empty())
            out.push_back(static_cast<std::uint32_t>(std::stoul(cur)));
    return out;
}

} // namespace

void save_population(const Population& pop, const std::string& dir) {
    {
        core::CsvWriter w(dir + "/individuals.csv");
        std::vector<std::string> header = {"id", "household_id", "age", "gender", "employment",
                                           "type_key"};
        if (!pop.individuals.empty())
            for (const auto& [k, v] : pop.individuals.front().extras) {
                (void)v;
                header.push_back(k);
            }
        w.row(header);
        for (const auto& ind : pop.individuals) {
            std::vector<std::string> row = {std::to_string(ind.id),
                                            std::to_string(ind.household_id),
                                            std::to_string(ind.age),
                                            ind.gender,
                                            ind.employment,
                                            ind.type_key};
            for (const auto& [k, v] : ind.extras) {
                (void)k;
                row.push_back(v);
            }
            w.row(row);
        }
    }
    {
        core::CsvWriter w(dir + "/households.csv");
        w.row({"id", "family_type", "energy_tariff", "absence", "member_ids"});
        for (const auto& hh : pop.households)
            w.row({std::to_string(hh.id), hh.family_type, hh.energy_tariff, hh.absence,
                   join_ids(hh.member_ids)});
    }
    {
        core::CsvWriter w(dir + "/dwellings.csv");
        w.row({"id", "household_id", "floor_area_m2", "dwelling_type", "insulation", "location",
               "appliance_ids"});
        for (const auto& dw : pop.dwellings)
            w.row({std::to_string(dw.id), std::to_string(dw.household_id),
                   core::format_double(dw.floor_area_m2), dw.dwelling_type, dw.insulation,
                   dw.location, join_ids(dw.appliance_ids)});
    }
    {
        core::CsvWriter w(dir + "/appliances.csv");
        w.row({"id", "dwelling_id", "category"});
        for (const auto& a : pop.appliances)
            w.row({std::to_string(a.id), std::to_string(a.dwelling_id), a.category});
    }
}

Population load_population(const std::string& dir) {
    Population pop;
    {
        core::CsvReader r(dir + "/individuals.csv");
        std::vector<std::string> f;
        if (!r.next(f))
            throw core::CsvError(dir + "/individuals.csv: empty");
        std::vector<std::string> extra_names(f.begin() + 6, f.end());
        while (r.next(f)) {
            if (f.size() != 6 + extra_names.size())
                throw core::CsvError(dir + "/individuals.csv:" + std::to_string(r.line()) +
                                     ": wrong column count");
            Individual ind;
            ind.id = static_cast<std::uint32_t>(std::stoul(f[0]));
            ind.household_id = static_cast<std::uint32_t>(std::stoul(f[1]));
            ind.age = std::stoi(f[2]);
            ind.gender = f[3];
            ind.employment = f[4];
            ind.type_key = f[5];
            for (std::size_t i = 0; i < extra_names.size(); ++i)
                ind.extras.emplace_back(extra_names[i], f[6 + i]);
            pop.individuals.push_back(std::move(ind));
        }
    }
    {
        core::CsvReader r(dir + "/households.csv");
        std::vector<std::string> f;
        r.next(f); // header
        while (r.next(f)) {
            if (f.size() != 5)
                throw core::CsvError(dir + "/households.csv:" + std::to_string(r.line()) +
                                     ": wrong column count");
            Household hh;
            hh.id = static_cast<std::uint32_t>(std::stoul(f[0]));
            hh.family_type = f[1];
            hh.energy_tariff = f[2];
            hh.absence = f[3];
            hh.member_ids = split_ids(f[4]);
            pop.households.push_back(std::move(hh));
        }
    }
    {
        core::CsvReader r(dir + "/dwellings.csv");
        std::vector<std::string> f;
        r.next(f);
        while (r.next(f)) {
            if (f.size() != 7)
                throw core::CsvError(dir + "/dwellings.csv:" + std::to_string(r.line()) +
                                     ": wrong column count");
            Dwelling dw;
            dw.id = static_cast<std::uint32_t>(std::stoul(f[0]));
            dw.household_id = static_cast<std::uint32_t>(std::stoul(f[1]));
            dw.floor_area_m2 = std::stod(f[2]);
            dw.dwelling_type = f[3];
            dw.insulation = f[4];
            dw.location = f[5];
            dw.appliance_ids = split_ids(f[6]);
            pop.dwellings.push_back(std::move(dw));
        }
    }
    {
        core::CsvReader r(dir + "/appliances.csv");
        std::vector<std::string> f;
        r.next(f);
        while (r.next(f)) {
            if (f.size() != 3)
                throw core::CsvError(dir + "/appliances.csv:" + std::to_string(r.line()) +
                                     ": wrong column count");
            ApplianceInstance a;
            a.id = static_cast<std::uint32_t>(std::stoul(f[0]));
            a.dwelling_id = static_cast<std::uint32_t>(std::stoul(f[1]));
            a.category = f[2];
            pop.appliances.push_back(std::move(a));
        }
    }
    pop.check_integrity();
    return pop;
}

} // namespace actiload::popsynth
