// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "actiload/appliance/load_engine.hpp"

namespace actiload::sim {

struct PipelineOptions {
    activity::SimOptions sim;
    bool record_dwelling_curves = false;
};

// A complete simulated run: activity trace plus metered loads.
struct RunOutput {
    activity::ActivityResult activity;
    appliance::LoadAccumulator loads;
    std::vector<std::string> load_categories;
    std::vector<appliance::ShowerEvent> showers;
    std::vector<appliance::DhwDayRecord> dhw_days;
    std::vector<std::vector<std::int64_t>> dwelling_curves_mw;
    int n_dwellings = 0;
    core::Date start_date;

    int category_index(const std::string& name) const {
        for (std::size_t i = 0; i < load_categories.size(); ++i)
            if (load_categories[i] == name)
                return static_cast<int>(i);
        return -1;
    }
    // Mean power per dwelling at one-minute resolution.
    appliance::LoadCurve mean_load_curve() const;
    appliance::LoadCurve dwelling_curve(int dwelling) const;
    // Mean power per dwelling for a set of appliance categories.
    std::vector<double> category_mean_w(std::span<const std::string> categories) const;
};

// Runs activity and appliance realization together over the population.
// `catalogs` may give per-household variants (eco-behavior compliance);
// passing a null appliance catalog yields an activity-only run.
RunOutput run(const popsynth::Population& population, activity::CatalogProvider catalogs,
              const tusdata::TaskCatalog& base_catalog, const activity::ActivityCodebook& codes,
              const appliance::ApplianceCatalog* appliances, const PipelineOptions& options);

// Single-catalog convenience.
RunOutput run(const popsynth::Population& population, const tusdata::TaskCatalog& catalog,
              const appliance::ApplianceCatalog* appliances, const PipelineOptions& options);

} // namespace actiload::sim
