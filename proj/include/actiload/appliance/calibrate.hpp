// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "actiload/appliance/appliance.hpp"
#include "actiload/popsynth/population.hpp"
#include "actiload/tusdata/taskspec.hpp"

namespace actiload::appliance {

struct CalibrationTarget {
    std::string category;
    double annual_kwh = 0.0; // population-total target for the category
};

struct CalibrationRow {
    int iteration = 0;
    std::string category;
    double simulated_kwh = 0.0;
    double target_kwh = 0.0;
    double factor = 1.0;
};

struct CalibrationResult {
    ApplianceCatalog calibrated;
    std::vector<CalibrationRow> report;
    bool converged = false;
    int iterations = 0;
};

struct CalibrationOptions {
    int max_iterations = 20;
    double tolerance = 0.01;       // relative error per category
    double factor_floor = 0.5;     // per-iteration multiplicative clamp
    double factor_ceil = 2.0;
    int workers = 1;
    // One representative week per season; annual energy = 13 x their sum.
    std::vector<core::Date> week_starts = {{2026, 1, 5}, {2026, 4, 6}, {2026, 7, 6}, {2026, 10, 5}};
};

// Iterative multiplicative scaling of unit powers (cycle profiles scale as a
// whole) until every targeted category lands within tolerance. The same seed
// is used for every iteration, so a category whose energy is linear in its
// unit power converges in a single step.
CalibrationResult calibrate_unit_powers(const popsynth::Population& population,
                                        const tusdata::TaskCatalog& catalog,
                                        const ApplianceCatalog& appliances,
                                        std::span<const CalibrationTarget> targets,
                                        std::uint64_t seed, const CalibrationOptions& options);

void save_calibration_report(std::span<const CalibrationRow> report, const std::string& path);

} // namespace actiload::appliance
