// SPDX-License-Identifier: Apache-2.0
//
// Pipeline driver: synth | extract | simulate | calibrate | metrics | scenario.
// One config file defines a run; every command is deterministic for a fixed
// (config, seed) and emits plain CSV artifacts plus a hashed manifest.
#include <cstdlib>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "actiload/appliance/calibrate.hpp"
#include "actiload/core/csv.hpp"
#include "actiload/metrics/metrics.hpp"
#include "actiload/scenario/scenario.hpp"
#include "actiload/sim/pipeline.hpp"

namespace {

using namespace actiload;

struct CliContext {
    core::ConfigDoc config;
    std::string out_dir;
    std::uint64_t seed = 1;
    std::vector<std::string> artifacts;

    const core::ConfigSection* find(const std::string& name) const { return config.find(name); }

    std::string path_of(const std::string& key) const {
        const core::ConfigSection* paths = config.find("paths");
        if (!paths)
            throw core::ConfigError("config has no [paths] section");
        return paths->require(key);
    }
    std::optional<std::string> optional_path(const std::string& key) const {
        const core::ConfigSection* paths = config.find("paths");
        if (!paths)
            return std::nullopt;
        return paths->get(key);
    }

    std::string out(const std::string& name) {
        std::filesystem::create_directories(out_dir);
        std::string p = out_dir + "/" + name;
        artifacts.push_back(p);
        return p;
    }

    void write_manifest() {
        std::filesystem::create_directories(out_dir);
        core::CsvWriter w(out_dir + "/manifest.csv");
        w.row({"artifact", "fnv64"});
        for (const auto& p : artifacts)
            w.row({std::filesystem::path(p).filename().string(), core::file_content_hash(p)});
    }
};

activity::SimOptions sim_options(const CliContext& ctx) {
    activity::SimOptions opt;
    const core::ConfigSection* run = ctx.find("run");
    if (run) {
        opt.horizon_days = run->get_int_or("horizon_days", 7);
        opt.start_date = core::parse_date(run->get_or("start_date", "2026-01-05"));
        opt.workers = run->get_int_or("workers", 1);
        opt.weather.p_good = run->get_double_or("weather_p_good", 0.5);
    }
    opt.seed = ctx.seed;
    if (const core::ConfigSection* prio = ctx.find("priority"))
        opt.priority = activity::PriorityParams::from_config(*prio);
    if (auto calendar = ctx.optional_path("calendar"))
        opt.overlay = activity::CalendarOverlay::load(*calendar);
    return opt;
}

popsynth::Population load_or_synthesize(CliContext& ctx) {
    if (auto dir = ctx.optional_path("population_dir")) {
        std::cerr << "loading population from " << *dir << "\n";
        return popsynth::load_population(*dir);
    }
    popsynth::PopulationSpec spec = popsynth::load_population_spec(ctx.path_of("population_spec"));
    int n = 100;
    if (const core::ConfigSection* synth = ctx.find("synth"))
        n = synth->get_int_or("n_households", n);
    std::cerr << "synthesizing " << n << " households (seed " << ctx.seed << ")\n";
    return popsynth::synthesize_population(spec, n, ctx.seed);
}

tusdata::TaskCatalog load_or_extract_catalog(CliContext& ctx) {
    if (auto catalog = ctx.optional_path("task_catalog")) {
        std::cerr << "loading task catalog from " << *catalog << "\n";
        return tusdata::load_catalog(*catalog);
    }
    tusdata::ExtractOptions opt;
    if (const core::ConfigSection* run = ctx.find("run"))
        opt.x.x = run->get_double_or("x", 90.0);
    if (const core::ConfigSection* extract = ctx.find("extract")) {
        opt.min_episodes = extract->get_int_or("min_episodes", opt.min_episodes);
        for (const auto& code : core::split_list(extract->get_or("household_shared", "")))
            opt.household_rules[code] = tusdata::HouseholdRule::shared;
        for (const auto& code : core::split_list(extract->get_or("household_size_weekly", "")))
            opt.household_rules[code] = tusdata::HouseholdRule::size_weekly;
    }
    auto records = tusdata::parse_tus(ctx.path_of("tus"));
    std::cerr << "extracting catalog from " << records.size() << " diaries (X=" << opt.x.x << ")\n";
    return tusdata::extract_catalog(records, opt);
}

int cmd_synth(CliContext& ctx) {
    popsynth::PopulationSpec spec = popsynth::load_population_spec(ctx.path_of("population_spec"));
    int n = 100;
    if (const core::ConfigSection* synth = ctx.find("synth"))
        n = synth->get_int_or("n_households", n);
    popsynth::Population pop = popsynth::synthesize_population(spec, n, ctx.seed);
    std::filesystem::create_directories(ctx.out_dir);
    popsynth::save_population(pop, ctx.out_dir);
    for (const char* name : {"individuals.csv", "households.csv", "dwellings.csv", "appliances.csv"})
        ctx.artifacts.push_back(ctx.out_dir + "/" + name);
    std::cerr << "wrote " << pop.individuals.size() << " individuals in " << pop.households.size()
              << " households\n";
    return 0;
}

int cmd_extract(CliContext& ctx) {
    tusdata::TaskCatalog catalog = load_or_extract_catalog(ctx);
    tusdata::save_catalog(catalog, ctx.out("task_catalog.csv"));
    std::cerr << "wrote " << catalog.specs.size() << " task specs\n";
    return 0;
}

int cmd_simulate(CliContext& ctx) {
    popsynth::Population pop = load_or_synthesize(ctx);
    tusdata::TaskCatalog catalog = load_or_extract_catalog(ctx);
    appliance::ApplianceCatalog appliances = appliance::load_appliance_catalog(ctx.path_of("appliances"));

    sim::PipelineOptions po;
    po.sim = sim_options(ctx);
    po.sim.record_trace = false;
    if (const core::ConfigSection* simulate = ctx.find("simulate"))
        po.sim.record_trace = simulate->get_bool_or("export_trace", false);
    std::cerr << "simulating " << pop.households.size() << " households x " << po.sim.horizon_days
              << " days\n";
    sim::RunOutput run = sim::run(pop, catalog, &appliances, po);

    appliance::LoadCurve mean = run.mean_load_curve();
    appliance::save_load_curve(mean, ctx.out("load_1min.csv"));
    appliance::save_load_curve(appliance::reduce_resolution(mean, 30), ctx.out("load_30min.csv"));

    if (auto categories = ctx.optional_path("categories")) {
        scenario::CategoryMap map = scenario::CategoryMap::load(*categories);
        scenario::save_activity_rates(scenario::activity_rates(run.activity, map),
                                      ctx.out("activity_rates.csv"));
    }
    if (po.sim.record_trace)
        activity::export_trace_csv(run.activity, pop, ctx.out("trace.csv"));
    return 0;
}

int cmd_calibrate(CliContext& ctx) {
    popsynth::Population pop = load_or_synthesize(ctx);
    tusdata::TaskCatalog catalog = load_or_extract_catalog(ctx);
    appliance::ApplianceCatalog appliances = appliance::load_appliance_catalog(ctx.path_of("appliances"));

    const core::ConfigSection* cal = ctx.find("calibrate");
    if (!cal)
        throw core::ConfigError("config has no [calibrate] section");
    std::vector<appliance::CalibrationTarget> targets;
    for (const auto& e : cal->entries) {
        if (e.key.rfind("target.", 0) != 0)
            continue;
        targets.push_back(appliance::CalibrationTarget{
            e.key.substr(7), core::parse_double(e.value, "[calibrate] " + e.key)});
    }
    if (targets.empty())
        throw core::ConfigError("[calibrate] lists no target.<category> entries");

    appliance::CalibrationOptions opt;
    opt.max_iterations = cal->get_int_or("max_iterations", opt.max_iterations);
    opt.tolerance = cal->get_double_or("tolerance", opt.tolerance);
    if (const core::ConfigSection* run = ctx.find("run"))
        opt.workers = run->get_int_or("workers", 1);

    std::cerr << "calibrating " << targets.size() << " categories\n";
    appliance::CalibrationResult result =
        appliance::calibrate_unit_powers(pop, catalog, appliances, targets, ctx.seed, opt);
    appliance::save_appliance_catalog(result.calibrated, ctx.out("appliances_calibrated.conf"));
    appliance::save_calibration_report(result.report, ctx.out("calibration_report.csv"));
    std::cerr << (result.converged ? "converged" : "NOT converged") << " after "
              << result.iterations << " iterations\n";
    return result.converged ? 0 : 3;
}

metrics::AverageWeek load_week_or_reduce(CliContext& ctx, const std::string& path) {
    // Average-week CSVs start with a "slot" header; anything else is a curve.
    {
        core::CsvReader probe(path);
        std::vector<std::string> f;
        if (probe.next(f) && !f.empty() && f[0] == "slot")
            return metrics::load_average_week(path);
    }
    appliance::LoadCurve curve = appliance::load_load_curve(path);
    const core::ConfigSection* m = ctx.find("metrics");
    if (!m || !m->has("month"))
        throw core::ConfigError("[metrics] month = YYYY-MM is required to reduce a raw curve");
    std::string month = m->require("month");
    int year = core::parse_int(month.substr(0, 4), "[metrics] month");
    int mon = core::parse_int(month.substr(5), "[metrics] month");
    return metrics::reduce_to_average_week(curve, year, mon);
}

int cmd_metrics(CliContext& ctx) {
    metrics::AverageWeek model = load_week_or_reduce(ctx, ctx.path_of("model_curve"));
    metrics::AverageWeek reference = load_week_or_reduce(ctx, ctx.path_of("reference_curve"));
    metrics::MetricReport report = metrics::compare(model, reference);
    metrics::save_metric_report(report, ctx.out("metrics.csv"));
    metrics::save_average_week(model, ctx.out("average_week_model.csv"));
    metrics::save_average_week(reference, ctx.out("average_week_reference.csv"));
    std::cerr << "mae " << report.mae << " W, rmse " << report.rmse << " W\n";
    return 0;
}

int cmd_scenario(CliContext& ctx) {
    popsynth::Population pop = load_or_synthesize(ctx);
    tusdata::TaskCatalog catalog = load_or_extract_catalog(ctx);
    appliance::ApplianceCatalog appliances = appliance::load_appliance_catalog(ctx.path_of("appliances"));
    scenario::CategoryMap categories = scenario::CategoryMap::load(ctx.path_of("categories"));

    activity::SimOptions opt = sim_options(ctx);
    opt.record_trace = false;

    // Behaviors come from [behavior.*] sections; all listed apply together.
    appliance::ApplianceCatalog scen_appliances = appliances;
    activity::CatalogProvider scen_catalogs;
    scenario::ShiftedCatalogs shifted;
    bool any_behavior = false;
    for (const core::ConfigSection* s : ctx.config.with_prefix("behavior.")) {
        scenario::EcoBehavior behavior;
        std::string kind = s->name.substr(std::string("behavior.").size());
        if (kind == "cooking_shift")
            behavior.kind = scenario::BehaviorKind::cooking_shift;
        else if (kind == "no_shower_peak")
            behavior.kind = scenario::BehaviorKind::no_shower_peak;
        else
            throw core::ConfigError("unknown behavior kind '" + kind + "'");
        if (auto w = s->get("windows")) {
            behavior.windows.windows.clear();
            for (const auto& item : core::split_list(*w)) {
                std::size_t dash = item.find('-');
                if (dash == std::string::npos)
                    throw core::ConfigError("[" + s->name + "] windows: expected HH:MM-HH:MM");
                behavior.windows.windows.push_back(scenario::TimeWindow{
                    core::parse_minute_of_day(core::trim(item.substr(0, dash))),
                    core::parse_minute_of_day(core::trim(item.substr(dash + 1)))});
            }
        }
        behavior.max_shift_min = s->get_int_or("max_shift", behavior.max_shift_min);
        behavior.compliance = s->get_double_or("compliance", behavior.compliance);
        behavior.chain_threshold_min = s->get_int_or("chain_threshold", behavior.chain_threshold_min);

        if (behavior.kind == scenario::BehaviorKind::cooking_shift) {
            shifted = scenario::apply_cooking_shift(catalog, behavior, categories,
                                                    static_cast<int>(pop.households.size()),
                                                    ctx.seed);
            scen_catalogs = shifted.provider(catalog);
        } else {
            scenario::apply_no_shower_peak(scen_appliances.dhw, behavior);
        }
        any_behavior = true;
    }

    sim::PipelineOptions po;
    po.sim = opt;
    activity::ActivityCodebook codes = activity::ActivityCodebook::from_catalog(catalog, opt.overlay);

    std::cerr << "running paired baseline/scenario simulations\n";
    sim::RunOutput baseline = sim::run(
        pop, [&catalog](int) -> const tusdata::TaskCatalog& { return catalog; }, catalog, codes,
        &appliances, po);
    sim::RunOutput scen = sim::run(
        pop,
        scen_catalogs ? scen_catalogs
                      : [&catalog](int) -> const tusdata::TaskCatalog& { return catalog; },
        catalog, codes, &scen_appliances, po);

    scenario::PeakWindows windows = scenario::PeakWindows::defaults();
    scenario::DeltaReport report = scenario::compare_runs(baseline, scen, windows, categories,
                                                          appliances.cooking_categories);
    std::filesystem::create_directories(ctx.out_dir);
    scenario::save_delta_report(report, ctx.out_dir + "/delta");
    for (const char* suffix : {"_activity.csv", "_power.csv", "_summary.csv"})
        ctx.artifacts.push_back(ctx.out_dir + "/delta" + suffix);

    if (!any_behavior)
        std::cerr << "no [behavior.*] sections: scenario equals baseline, deltas are zero\n";
    std::cerr << "max in-window power gain: " << report.max_power_gain_w << " W\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"residential activity and load curve simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::int64_t seed_override = -1;
    const char* env_config = std::getenv("ACTILOAD_CONFIG");
    app.add_option("--config", config_path, "run configuration file")
        ->default_val(env_config ? env_config : "");
    app.add_option("--seed", seed_override, "override the config seed");
    app.add_option("--out", out_dir, "override the output directory");

    for (const char* name : {"synth", "extract", "simulate", "calibrate", "metrics", "scenario"})
        app.add_subcommand(name);

    CLI11_PARSE(app, argc, argv);

    try {
        if (config_path.empty())
            throw actiload::core::ConfigError(
                "no config given (use --config or the ACTILOAD_CONFIG environment variable)");
        CliContext ctx{actiload::core::ConfigDoc::parse_file(config_path), "out", 1, {}};
        if (const auto* run = ctx.find("run")) {
            ctx.seed = static_cast<std::uint64_t>(run->get_int_or("seed", 1));
            ctx.out_dir = run->get_or("out_dir", "out");
        }
        if (seed_override >= 0)
            ctx.seed = static_cast<std::uint64_t>(seed_override);
        if (!out_dir.empty())
            ctx.out_dir = out_dir;

        int rc = 1;
        if (app.got_subcommand("synth"))
            rc = cmd_synth(ctx);
        else if (app.got_subcommand("extract"))
            rc = cmd_extract(ctx);
        else if (app.got_subcommand("simulate"))
            rc = cmd_simulate(ctx);
        else if (app.got_subcommand("calibrate"))
            rc = cmd_calibrate(ctx);
        else if (app.got_subcommand("metrics"))
            rc = cmd_metrics(ctx);
        else if (app.got_subcommand("scenario"))
            rc = cmd_scenario(ctx);
        if (rc == 0 || rc == 3)
            ctx.write_manifest();
        return rc;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
