// SPDX-License-Identifier: Apache-2.0
#include "actiload/sim/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

namespace actiload::sim {

appliance::LoadCurve RunOutput::mean_load_curve() const {
    appliance::LoadCurve curve;
    curve.start_date = start_date;
    curve.step_minutes = 1;
    curve.values_w.resize(loads.total_mw.size());
    const double scale = 1.0 / (1000.0 * std::max(1, n_dwellings));
    for (std::size_t i = 0; i < loads.total_mw.size(); ++i)
        curve.values_w[i] = static_cast<double>(loads.total_mw[i]) * scale;
    return curve;
}

appliance::LoadCurve RunOutput::dwelling_curve(int dwelling) const {
    if (dwelling_curves_mw.empty())
        throw appliance::ApplianceError("per-dwelling curves were not recorded for this run");
    appliance::LoadCurve curve;
    curve.start_date = start_date;
    curve.step_minutes = 1;
    const auto& mw = dwelling_curves_mw[static_cast<std::size_t>(dwelling)];
    curve.values_w.resize(mw.size());
    for (std::size_t i = 0; i < mw.size(); ++i)
        curve.values_w[i] = static_cast<double>(mw[i]) / 1000.0;
    return curve;
}

std::vector<double> RunOutput::category_mean_w(std::span<const std::string> categories) const {
    std::vector<int> idx;
    for (const auto& name : categories) {
        int i = category_index(name);
        if (i < 0)
            throw appliance::ApplianceError("unknown load category '" + name + "'");
        idx.push_back(i);
    }
    std::vector<double> out(static_cast<std::size_t>(loads.minutes), 0.0);
    const double scale = 1.0 / (1000.0 * std::max(1, n_dwellings));
    for (int m = 0; m < loads.minutes; ++m) {
        std::int64_t sum = 0;
        for (int i : idx)
            sum += loads.category_mw[static_cast<std::size_t>(m) * loads.n_categories +
                                     static_cast<std::size_t>(i)];
        out[static_cast<std::size_t>(m)] = static_cast<double>(sum) * scale;
    }
    return out;
}

RunOutput run(const popsynth::Population& population, activity::CatalogProvider catalogs,
              const tusdata::TaskCatalog& base_catalog, const activity::ActivityCodebook& codes,
              const appliance::ApplianceCatalog* appliances, const PipelineOptions& options) {
    RunOutput out;
    out.n_dwellings = static_cast<int>(population.dwellings.size());
    out.start_date = options.sim.start_date;

    const int minutes = options.sim.horizon_days * core::kMinutesPerDay;

    if (!appliances) {
        out.activity = activity::run_simulation(population, catalogs, codes, options.sim);
        out.loads.init(minutes, 0);
        return out;
    }

    appliance::LoadContext ctx(*appliances, population, codes, base_catalog, options.sim.seed);
    out.load_categories = ctx.category_names;

    int workers = std::max(1, options.sim.workers);
    workers = std::min(workers, std::max(1, out.n_dwellings));

    std::vector<appliance::LoadAccumulator> accumulators(static_cast<std::size_t>(workers));
    for (auto& acc : accumulators)
        acc.init(minutes, ctx.category_names.size());

    std::vector<std::vector<appliance::ShowerEvent>> shower_slots(
        static_cast<std::size_t>(out.n_dwellings));
    std::vector<std::vector<appliance::DhwDayRecord>> dhw_slots(
        static_cast<std::size_t>(out.n_dwellings));
    if (options.record_dwelling_curves)
        out.dwelling_curves_mw.assign(static_cast<std::size_t>(out.n_dwellings),
                                      std::vector<std::int64_t>(static_cast<std::size_t>(minutes), 0));

    std::vector<std::unique_ptr<appliance::LoadEngine>> engines;
    engines.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w)
        engines.push_back(std::make_unique<appliance::LoadEngine>(
            ctx, &accumulators[static_cast<std::size_t>(w)], &shower_slots, &dhw_slots,
            options.record_dwelling_curves ? &out.dwelling_curves_mw : nullptr));

    auto factory = [&engines](int household, int worker) -> activity::MinuteSink* {
        appliance::LoadEngine* engine = engines[static_cast<std::size_t>(worker)].get();
        engine->begin_household(household);
        return engine;
    };

    out.activity = activity::run_simulation(population, catalogs, codes, options.sim, factory);

    for (auto& engine : engines)
        engine->finish();

    out.loads = std::move(accumulators.front());
    for (std::size_t w = 1; w < accumulators.size(); ++w)
        out.loads.add_from(accumulators[w]);

    std::size_t n_showers = 0, n_dhw = 0;
    for (const auto& s : shower_slots)
        n_showers += s.size();
    for (const auto& d : dhw_slots)
        n_dhw += d.size();
    out.showers.reserve(n_showers);
    out.dhw_days.reserve(n_dhw);
    for (const auto& s : shower_slots)
        out.showers.insert(out.showers.end(), s.begin(), s.end());
    for (const auto& d : dhw_slots)
        out.dhw_days.insert(out.dhw_days.end(), d.begin(), d.end());

    return out;
}

RunOutput run(const popsynth::Population& population, const tusdata::TaskCatalog& catalog,
              const appliance::ApplianceCatalog* appliances, const PipelineOptions& options) {
    activity::ActivityCodebook codes =
        activity::ActivityCodebook::from_catalog(catalog, options.sim.overlay);
    return run(
        population, [&catalog](int) -> const tusdata::TaskCatalog& { return catalog; }, catalog,
        codes, appliances, options);
}

} // namespace actiload::sim
