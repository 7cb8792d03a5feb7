// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <span>
#include <stdexcept>
#include <string>

#include "actiload/appliance/appliance.hpp"

namespace actiload::metrics {

struct MetricsError : std::runtime_error {
    explicit MetricsError(const std::string& msg) : std::runtime_error(msg) {}
};

inline constexpr int kSlotsPerWeek = 7 * 48; // 30-minute slots, Monday-aligned

// Slot-wise mean week of a month: 336 half-hour values starting Monday 00:00.
struct AverageWeek {
    std::array<double, kSlotsPerWeek> slots{};
};

// Reduce a 1-minute (or 30-minute) curve to the mean week of a month: the
// first four Monday-aligned weeks starting at the first Monday of the month,
// 30-minute averaged then averaged slot-wise across the four weeks. Throws
// when the curve does not cover four whole weeks from that Monday.
AverageWeek reduce_to_average_week(const appliance::LoadCurve& curve, int year, int month);

// Same reduction from an explicit Monday-00:00 offset into the curve.
AverageWeek reduce_to_average_week_at(const appliance::LoadCurve& curve,
                                      std::int64_t offset_minutes);

double mae(std::span<const double> a, std::span<const double> b);
double rmse(std::span<const double> a, std::span<const double> b);
// Fraction (not percent); every reference value must be non-zero.
double mape(std::span<const double> a, std::span<const double> reference);
double wape(std::span<const double> a, std::span<const double> reference);
// Share of matching step directions; a zero change only matches a zero change.
double mda(std::span<const double> a, std::span<const double> b);
// Discrete Fréchet distance on power values, |delta watts| as the metric.
double frechet_discrete(std::span<const double> a, std::span<const double> b);

struct MetricReport {
    double mae = 0.0;
    double rmse = 0.0;
    double mape = 0.0;
    double wape = 0.0;
    double mda = 0.0;
    double frechet = 0.0;
};

MetricReport compare(const AverageWeek& model, const AverageWeek& reference);

void save_metric_report(const MetricReport& report, const std::string& path);
void save_average_week(const AverageWeek& week, const std::string& path);
AverageWeek load_average_week(const std::string& path);

} // namespace actiload::metrics
