// SPDX-License-Identifier: Apache-2.0
#include "actiload/metrics/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "actiload/core/csv.hpp"

namespace actiload::metrics {

namespace {

void check_lengths(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size())
        throw MetricsError("series lengths differ (" + std::to_string(a.size()) + " vs " +
                           std::to_string(b.size()) + ")");
    if (a.empty())
        throw MetricsError("empty series");
}

int sign_of(double d) {
    if (d > 0.0)
        return 1;
    if (d < 0.0)
        return -1;
    return 0;
}

} // namespace

AverageWeek reduce_to_average_week_at(const appliance::LoadCurve& curve,
                                      std::int64_t offset_minutes) {
    if (curve.step_minutes != 1 && curve.step_minutes != 30)
        throw MetricsError("average week needs a 1-minute or 30-minute curve");
    if (offset_minutes < 0 || offset_minutes % curve.step_minutes != 0)
        throw MetricsError("window offset must be non-negative and step-aligned");

    const std::int64_t samples_per_slot = 30 / curve.step_minutes;
    const std::int64_t first = offset_minutes / curve.step_minutes;
    const std::int64_t needed = first + 4 * kSlotsPerWeek * samples_per_slot;
    if (needed > static_cast<std::int64_t>(curve.values_w.size()))
        throw MetricsError("curve does not cover four whole weeks from the window start");

    AverageWeek out;
    for (int slot = 0; slot < kSlotsPerWeek; ++slot) {
        double sum = 0.0;
        for (int week = 0; week < 4; ++week) {
            std::int64_t base =
                first + (static_cast<std::int64_t>(week) * kSlotsPerWeek + slot) * samples_per_slot;
            for (std::int64_t k = 0; k < samples_per_slot; ++k)
                sum += curve.values_w[static_cast<std::size_t>(base + k)];
        }
        out.slots[static_cast<std::size_t>(slot)] = sum / (4.0 * samples_per_slot);
    }
    return out;
}

AverageWeek reduce_to_average_week(const appliance::LoadCurve& curve, int year, int month) {
    if (month < 1 || month > 12)
        throw MetricsError("month must be 1..12");
    std::int64_t month_start = core::days_from_civil(core::Date{year, month, 1});
    int dow = core::weekday_of(month_start);
    std::int64_t first_monday = month_start + (dow == 0 ? 0 : 7 - dow);

    std::int64_t curve_start =
        core::days_from_civil(curve.start_date) * core::kMinutesPerDay + curve.start_minute;
    std::int64_t window_start = first_monday * core::kMinutesPerDay;
    if (window_start < curve_start)
        throw MetricsError("curve starts after the month's first Monday");
    return reduce_to_average_week_at(curve, window_start - curve_start);
}

double mae(std::span<const double> a, std::span<const double> b) {
    check_lengths(a, b);
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        sum += std::abs(a[i] - b[i]);
    return sum / static_cast<double>(a.size());
}

double rmse(std::span<const double> a, std::span<const double> b) {
    check_lengths(a, b);
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double d = a[i] - b[i];
        sum += d * d;
    }
    return std::sqrt(sum / static_cast<double>(a.size()));
}

double mape(std::span<const double> a, std::span<const double> reference) {
    check_lengths(a, reference);
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (reference[i] == 0.0)
            throw MetricsError("mape undefined: reference contains a zero (use wape)");
        sum += std::abs(a[i] - reference[i]) / std::abs(reference[i]);
    }
    return sum / static_cast<double>(a.size());
}

double wape(std::span<const double> a, std::span<const double> reference) {
    check_lengths(a, reference);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += std::abs(a[i] - reference[i]);
        den += std::abs(reference[i]);
    }
    if (den == 0.0)
        throw MetricsError("wape undefined: reference sums to zero");
    return num / den;
}

double mda(std::span<const double> a, std::span<const double> b) {
    check_lengths(a, b);
    if (a.size() < 2)
        throw MetricsError("mda needs at least two points");
    int matches = 0;
    for (std::size_t i = 1; i < a.size(); ++i)
        if (sign_of(a[i] - a[i - 1]) == sign_of(b[i] - b[i - 1]))
            ++matches;
    return static_cast<double>(matches) / static_cast<double>(a.size() - 1);
}

double frechet_discrete(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty())
        throw MetricsError("frechet needs non-empty series");
    const std::size_t n = a.size(), m = b.size();
    std::vector<double> prev(m), cur(m);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            double d = std::abs(a[i] - b[j]);
            double reach;
            if (i == 0 && j == 0)
                reach = d;
            else if (i == 0)
                reach = std::max(cur[j - 1], d);
            else if (j == 0)
                reach = std::max(prev[0], d);
            else
                reach = std::max(std::min({cur[j - 1], prev[j - 1], prev[j]}), d);
            cur[j] = reach;
        }
        std::swap(prev, cur);
    }
    return prev[m - 1];
}

MetricReport compare(const AverageWeek& model, const AverageWeek& reference) {
    MetricReport r;
    r.mae = mae(model.slots, reference.slots);
    r.rmse = rmse(model.slots, reference.slots);
    r.mape = mape(model.slots, reference.slots);
    r.wape = wape(model.slots, reference.slots);
    r.mda = mda(model.slots, reference.slots);
    r.frechet = frechet_discrete(model.slots, reference.slots);
    return r;
}

void save_metric_report(const MetricReport& report, const std::string& path) {
    core::CsvWriter w(path);
    w.row({"metric", "value", "unit"});
    w.row({"mae", core::format_double(report.mae), "W"});
    w.row({"rmse", core::format_double(report.rmse), "W"});
    w.row({"mape", core::format_double(report.mape), "fraction"});
    w.row({"wape", core::format_double(report.wape), "fraction"});
    w.row({"mda", core::format_double(report.mda), "fraction"});
    w.row({"frechet", core::format_double(report.frechet), "W"});
}

void save_average_week(const AverageWeek& week, const std::string& path) {
    core::CsvWriter w(path);
    w.row({"slot", "day_of_week", "minute_of_day", "watts"});
    for (int slot = 0; slot < kSlotsPerWeek; ++slot)
        w.row({std::to_string(slot), std::to_string(slot / 48), std::to_string((slot % 48) * 30),
               core::format_double(week.slots[static_cast<std::size_t>(slot)])});
}

AverageWeek load_average_week(const std::string& path) {
    core::CsvReader r(path);
    std::vector<std::string> f;
    if (!r.next(f))
        throw MetricsError(path + ": empty file");
    AverageWeek week;
    int count = 0;
    while (r.next(f)) {
        if (f.size() != 4)
            throw MetricsError(path + ":" + std::to_string(r.line()) + ": expected 4 columns");
        int slot = core::parse_int(f[0], path + " slot");
        if (slot < 0 || slot >= kSlotsPerWeek)
            throw MetricsError(path + ": slot index out of range");
        week.slots[static_cast<std::size_t>(slot)] = core::parse_double(f[3], path + " watts");
        ++count;
    }
    if (count != kSlotsPerWeek)
        throw MetricsError(path + ": expected " + std::to_string(kSlotsPerWeek) + " slots, got " +
                           std::to_string(count));
    return week;
}

} // namespace actiload::metrics
