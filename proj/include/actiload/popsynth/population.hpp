// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "actiload/core/rng.hpp"

namespace actiload::popsynth {

struct SpecError : std::runtime_error {
    explicit SpecError(const std::string& msg) : std::runtime_error(msg) {}
};

struct CategoricalDist {
    std::string attribute;
    std::vector<std::string> labels;
    std::vector<double> probs;

    void validate() const; // probabilities sum to 1 within 1e-9
    std::size_t sample(core::RngStream& rng) const;
    std::optional<std::size_t> index_of(const std::string& label) const;
};

// Conditional distribution: child attribute distributed per combination of
// parent attribute values. Parent combinations are keyed "v1|v2|..."; a "*"
// row is the fallback when no exact combination matches.
struct Conditional {
    std::string attribute;
    std::vector<std::string> parents;
    std::map<std::string, CategoricalDist> table;
};

// Ownership probability for one appliance category, with optional overrides
// keyed on a household or dwelling attribute value ("location:south = 0.35").
struct OwnershipRule {
    std::string category;
    double base = 0.0;
    struct Override {
        std::string attribute;
        std::string value;
        double prob;
    };
    std::vector<Override> overrides;
};

struct AgeBands {
    std::vector<int> lower;         // inclusive
    std::vector<int> upper;         // inclusive
    std::vector<std::string> names; // e.g. "50-64", "65+"

    static AgeBands default_bands();
    std::size_t band_of(int age) const;
};

struct FloorAreaModel {
    double base_mean_m2 = 60.0;
    double base_sd_m2 = 20.0;
    double min_m2 = 15.0;
    double per_extra_member_m2 = 15.0;
};

struct PopulationSpec {
    AgeBands age_bands = AgeBands::default_bands();
    std::vector<CategoricalDist> marginals; // sampling order = file order
    std::vector<Conditional> conditionals;
    std::vector<OwnershipRule> ownership;
    FloorAreaModel floor_area;
    int max_age = 95;

    const CategoricalDist* marginal(const std::string& attribute) const;
    const Conditional* conditional(const std::string& attribute) const;
    void validate() const;
};

struct Individual {
    std::uint32_t id = 0;
    std::uint32_t household_id = 0;
    int age = 0;
    std::string gender;
    std::string employment;
    std::string type_key;
    std::vector<std::pair<std::string, std::string>> extras; // opaque attributes
};

struct Household {
    std::uint32_t id = 0;
    std::vector<std::uint32_t> member_ids;
    std::string family_type;
    std::string energy_tariff;
    std::string absence; // "none", "holiday", "weekend", "holiday+weekend"
};

struct ApplianceInstance {
    std::uint32_t id = 0;
    std::uint32_t dwelling_id = 0;
    std::string category;
};

struct Dwelling {
    std::uint32_t id = 0; // one dwelling per household, same id
    std::uint32_t household_id = 0;
    double floor_area_m2 = 0.0;
    std::string dwelling_type;
    std::string insulation;
    std::string location;
    std::vector<std::uint32_t> appliance_ids;
};

struct Population {
    std::vector<Individual> individuals;
    std::vector<Household> households;
    std::vector<Dwelling> dwellings;
    std::vector<ApplianceInstance> appliances;

    void check_integrity() const; // every reference resolves
};

// Deterministic segmentation key: gender initial, age band, employment.
std::string individual_type_key(const std::string& gender, int age, const std::string& employment,
                                const AgeBands& bands);
inline std::string individual_type_key(const Individual& ind, const AgeBands& bands) {
    return individual_type_key(ind.gender, ind.age, ind.employment, bands);
}

PopulationSpec load_population_spec(const std::string& path);
PopulationSpec parse_population_spec(const std::string& text, const std::string& origin);

Population synthesize_population(const PopulationSpec& spec, int n_households, std::uint64_t seed);

// One CSV per entity kind; loading the directory back reproduces the
// population exactly.
void save_population(const Population& pop, const std::string& dir);
Population load_population(const std::string& dir);

} // namespace actiload::popsynth
