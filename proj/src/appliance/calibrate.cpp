// SPDX-License-Identifier: Apache-2.0
#include "actiload/appliance/calibrate.hpp"

#include <algorithm>
#include <cmath>

#include "actiload/core/csv.hpp"
#include "actiload/sim/pipeline.hpp"

namespace actiload::appliance {

namespace {

// Population-total annual kWh per category: one simulated week per season,
// summed and scaled to 52 weeks.
std::map<std::string, double> simulate_annual_kwh(const popsynth::Population& population,
                                                  const tusdata::TaskCatalog& catalog,
                                                  const ApplianceCatalog& appliances,
                                                  std::uint64_t seed,
                                                  const CalibrationOptions& options) {
    std::map<std::string, double> totals;
    for (const core::Date& start : options.week_starts) {
        sim::PipelineOptions po;
        po.sim.horizon_days = 7;
        po.sim.seed = seed;
        po.sim.start_date = start;
        po.sim.record_trace = false;
        po.sim.record_events = false;
        po.sim.workers = options.workers;
        sim::RunOutput run = sim::run(population, catalog, &appliances, po);
        for (std::size_t c = 0; c < run.load_categories.size(); ++c) {
            double mwmin = 0.0;
            for (int m = 0; m < run.loads.minutes; ++m)
                mwmin += static_cast<double>(
                    run.loads.category_mw[static_cast<std::size_t>(m) * run.loads.n_categories + c]);
            // mW-minutes -> kWh
            totals[run.load_categories[c]] += mwmin / (1000.0 * 60.0 * 1000.0);
        }
    }
    for (auto& [cat, kwh] : totals) {
        (void)cat;
        kwh *= 52.0 / static_cast<double>(options.week_starts.size());
    }
    return totals;
}

void scale_category(ApplianceCatalog& catalog, const std::string& category, double factor) {
    int idx = catalog.model_index(category);
    if (idx < 0)
        throw ApplianceError("calibration target '" + category + "' is not an appliance category");
    ApplianceModel& m = catalog.models[static_cast<std::size_t>(idx)];
    if (m.kind == AumKind::cycle) {
        for (auto& phase : m.cycle.phases)
            phase.watts *= factor;
    } else {
        m.unit_power_w *= factor;
    }
}

} // namespace

CalibrationResult calibrate_unit_powers(const popsynth::Population& population,
                                        const tusdata::TaskCatalog& catalog,
                                        const ApplianceCatalog& appliances,
                                        std::span<const CalibrationTarget> targets,
                                        std::uint64_t seed, const CalibrationOptions& options) {
    for (const auto& t : targets)
        if (t.annual_kwh <= 0.0)
            throw ApplianceError("calibration target '" + t.category + "' must be positive");

    CalibrationResult result;
    result.calibrated = appliances;

    for (int iter = 1; iter <= options.max_iterations; ++iter) {
        auto simulated = simulate_annual_kwh(population, catalog, result.calibrated, seed, options);

        bool all_within = true;
        std::vector<double> factors(targets.size(), 1.0);
        for (std::size_t i = 0; i < targets.size(); ++i) {
            double sim_kwh = simulated.count(targets[i].category) ? simulated[targets[i].category]
                                                                  : 0.0;
            double rel_err = std::abs(sim_kwh - targets[i].annual_kwh) / targets[i].annual_kwh;
            double factor = 1.0;
            if (rel_err > options.tolerance) {
                all_within = false;
                if (sim_kwh <= 0.0)
                    throw ApplianceError("category '" + targets[i].category +
                                         "' consumed no energy; it cannot be calibrated "
                                         "(no activations in the calibration run)");
                factor = std::clamp(targets[i].annual_kwh / sim_kwh, options.factor_floor,
                                    options.factor_ceil);
            }
            factors[i] = factor;
            result.report.push_back(CalibrationRow{iter, targets[i].category, sim_kwh,
                                                   targets[i].annual_kwh, factor});
        }

        result.iterations = iter;
        if (all_within) {
            result.converged = true;
            return result;
        }
        for (std::size_t i = 0; i < targets.size(); ++i)
            if (factors[i] != 1.0)
                scale_category(result.calibrated, targets[i].category, factors[i]);
    }
    return result; // not converged; the report carries the final errors
}

void save_calibration_report(std::span<const CalibrationRow> report, const std::string& path) {
    core::CsvWriter w(path);
    w.row({"iteration", "category", "simulated_kwh", "target_kwh", "factor"});
    for (const auto& row : report)
        w.row({std::to_string(row.iteration), row.category, core::format_double(row.simulated_kwh),
               core::format_double(row.target_kwh), core::format_double(row.factor)});
}

} // namespace actiload::appliance
