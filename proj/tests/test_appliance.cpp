// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <set>

#include "actiload/appliance/aum.hpp"
#include "actiload/appliance/calibrate.hpp"
#include "actiload/appliance/dhw.hpp"
#include "actiload/appliance/load_engine.hpp"
#include "actiload/sim/pipeline.hpp"
#include "helpers.hpp"

using namespace actiload;

namespace {

// Minimal one-household population with a fixed appliance inventory.
popsynth::Population one_household(const std::vector<std::string>& appliances, int members = 1) {
    popsynth::Population pop;
    popsynth::Household hh;
    hh.id = 0;
    hh.family_type = "test";
    hh.energy_tariff = "base";
    hh.absence = "none";
    auto bands = popsynth::AgeBands::default_bands();
    for (int m = 0; m < members; ++m) {
        popsynth::Individual ind;
        ind.id = static_cast<std::uint32_t>(m);
        ind.household_id = 0;
        ind.age = 40;
        ind.gender = m % 2 ? "male" : "female";
        ind.employment = "active";
        ind.type_key = popsynth::individual_type_key(ind, bands);
        hh.member_ids.push_back(ind.id);
        pop.individuals.push_back(std::move(ind));
    }
    pop.households.push_back(std::move(hh));
    popsynth::Dwelling dw;
    dw.id = 0;
    dw.household_id = 0;
    dw.floor_area_m2 = 80;
    dw.dwelling_type = "house";
    dw.insulation = "medium";
    dw.location = "north";
    for (const auto& cat : appliances) {
        popsynth::ApplianceInstance inst;
        inst.id = static_cast<std::uint32_t>(pop.appliances.size());
        inst.dwelling_id = 0;
        inst.category = cat;
        dw.appliance_ids.push_back(inst.id);
        pop.appliances.push_back(std::move(inst));
    }
    pop.dwellings.push_back(std::move(dw));
    return pop;
}

tusdata::TaskCatalog single_task_catalog(const std::vector<tusdata::TaskSpec>& specs) {
    tusdata::TaskCatalog cat;
    for (core::DayType day :
         {core::DayType::weekday, core::DayType::saturday, core::DayType::sunday}) {
        for (tusdata::TaskSpec s : specs) {
            s.day_type = day;
            cat.specs.push_back(std::move(s));
        }
    }
    cat.validate();
    return cat;
}

tusdata::TaskSpec simple_spec(const char* act, int ps, int pe, int dmin, int dmax,
                              double freq = 1.0) {
    tusdata::TaskSpec s;
    s.activity = act;
    s.day_type = core::DayType::weekday;
    s.type_key = "*";
    s.pp_start = ps;
    s.pp_end = pe;
    s.min_duration = dmin;
    s.max_duration = dmax;
    s.freq_per_day = freq;
    s.freq_per_week = 7 * freq;
    return s;
}

double category_energy_wh(const sim::RunOutput& run, const std::string& category) {
    int idx = run.category_index(category);
    REQUIRE(idx >= 0);
    double mw_min = 0;
    for (int m = 0; m < run.loads.minutes; ++m)
        mw_min += static_cast<double>(
            run.loads.category_mw[static_cast<std::size_t>(m) * run.loads.n_categories +
                                  static_cast<std::size_t>(idx)]);
    return mw_min / 1000.0 / 60.0;
}

} // namespace

TEST_CASE("forced realization is power times executed minutes") {
    auto seg = appliance::realize_forced(90, 100.0);
    CHECK(seg.minutes == 90);
    CHECK(seg.energy_wh() == doctest::Approx(150.0));
    CHECK(appliance::realize_forced(0, 100.0).minutes == 0);
    CHECK_THROWS_AS(appliance::realize_forced(-1, 100.0), appliance::ApplianceError);
}

TEST_CASE("fractional realization: on-time, bursts, uniformity") {
    auto rng = core::RngStream::derive(3, {1});

    SUBCASE("60 minutes at f=0.25 with 5-minute bursts") {
        auto on = appliance::fractional_on_minutes(60, 0.25, 5, rng);
        CHECK(on.size() == 15);
        std::set<int> unique(on.begin(), on.end());
        CHECK(unique.size() == on.size());
        CHECK(*unique.begin() >= 0);
        CHECK(*unique.rbegin() < 60);
        int runs = 1;
        for (std::size_t i = 1; i < on.size(); ++i)
            runs += on[i] != on[i - 1] + 1;
        CHECK(runs <= 3); // three generated bursts; adjacency may merge them
    }
    SUBCASE("f=1 is continuous operation, equal to forced") {
        auto on = appliance::fractional_on_minutes(40, 1.0, 5, rng);
        REQUIRE(on.size() == 40);
        for (int i = 0; i < 40; ++i)
            CHECK(on[static_cast<std::size_t>(i)] == i);
    }
    SUBCASE("a task shorter than a burst gets one rounded burst") {
        auto on = appliance::fractional_on_minutes(3, 0.5, 5, rng);
        CHECK(on.size() == 2); // round(1.5)
        CHECK(on[1] == on[0] + 1);
    }
    SUBCASE("mean on-share over many draws matches the fraction") {
        double sum = 0;
        const int trials = 1000;
        for (int t = 0; t < trials; ++t) {
            int duration = 20 + (t % 100);
            auto on = appliance::fractional_on_minutes(duration, 0.3, 5, rng);
            sum += static_cast<double>(on.size()) / duration;
        }
        CHECK(sum / trials == doctest::Approx(0.3).epsilon(0.034));
    }
}

TEST_CASE("cycle realization runs the full program") {
    appliance::CycleProfile profile;
    profile.phases = {{30, 2000.0}, {60, 200.0}};
    auto segs = appliance::realize_cycle(profile, 100);
    REQUIRE(segs.size() == 2);
    CHECK(segs[0].start_min == 100);
    CHECK(segs[1].start_min == 130);
    CHECK(segs[1].minutes == 60);
    double wh = 0;
    for (const auto& s : segs)
        wh += s.energy_wh();
    CHECK(wh == doctest::Approx(1200.0));
    CHECK(profile.total_minutes() == 90);
}

TEST_CASE("cycle independence and machine-busy rejection in the engine") {
    auto appliances = appliance::parse_appliance_catalog(R"(
[appliance.machine]
aum = cycle
cycle = 30:2000, 60:200

[pu]
row = chore, machine, 1
)",
                                                         "<t>");
    SUBCASE("a 10-minute task still yields the full 90-minute cycle") {
        auto pop = one_household({"machine"});
        auto catalog = single_task_catalog({simple_spec("rest", 0, 1440, 400, 600),
                                            simple_spec("chore", 600, 700, 10, 10)});
        sim::PipelineOptions po;
        po.sim.horizon_days = 1;
        po.sim.seed = 4;
        auto run = sim::run(pop, catalog, &appliances, po);
        CHECK(category_energy_wh(run, "machine") == doctest::Approx(1200.0));
    }
    SUBCASE("a second start while the machine runs is rejected") {
        auto pop = one_household({"machine"});
        auto catalog = single_task_catalog({simple_spec("rest", 0, 1440, 400, 600),
                                            simple_spec("chore", 600, 640, 10, 10),
                                            simple_spec("chore", 650, 690, 10, 10)});
        sim::PipelineOptions po;
        po.sim.horizon_days = 1;
        po.sim.seed = 4;
        auto run = sim::run(pop, catalog, &appliances, po);
        CHECK(category_energy_wh(run, "machine") == doctest::Approx(1200.0)); // one cycle only
    }
}

TEST_CASE("forced appliances follow suspended tasks across execution stretches") {
    auto appliances = appliance::parse_appliance_catalog(R"(
[appliance.tv]
aum = forced
power = 100

[pu]
row = show, tv, 1
)",
                                                         "<t>");
    // The urgent errand interrupts the show partway; the tv is off meanwhile.
    auto pop = one_household({"tv"});
    auto catalog = single_task_catalog({simple_spec("rest", 0, 600, 590, 600),
                                        simple_spec("show", 600, 700, 60, 60),
                                        simple_spec("errand", 630, 650, 20, 20)});
    sim::PipelineOptions po;
    po.sim.horizon_days = 1;
    po.sim.seed = 4;
    po.sim.record_events = true;
    auto run = sim::run(pop, catalog, &appliances, po);

    bool suspended = false, resumed = false;
    for (const auto& e : run.activity.events) {
        suspended = suspended || (e.kind == activity::TaskEventKind::suspend &&
                                  run.activity.codes.names[e.code] == "show");
        resumed = resumed || (e.kind == activity::TaskEventKind::resume &&
                              run.activity.codes.names[e.code] == "show");
    }
    CHECK(suspended);
    CHECK(resumed);
    // 60 executed minutes at 100 W regardless of the interruption
    CHECK(category_energy_wh(run, "tv") == doctest::Approx(100.0));
}

TEST_CASE("pu resolution handles wildcards and specificity") {
    auto catalog = testfix::appliance_catalog();
    activity::ActivityCodebook codes;
    std::uint16_t cooking = codes.intern("cooking");
    std::uint16_t tv_task = codes.intern("tv");
    appliance::PuResolver pu(catalog, codes);

    int microwave = catalog.model_index("microwave");
    int computer = catalog.model_index("computer");
    int tv = catalog.model_index("tv");
    REQUIRE(microwave >= 0);

    for (int season = 0; season < 4; ++season)
        for (int day = 0; day < 3; ++day)
            for (int band = 0; band < 5; ++band) {
                CHECK(pu.prob(cooking, microwave, static_cast<core::Season>(season),
                              static_cast<core::DayType>(day), band) == doctest::Approx(0.64));
                CHECK(pu.prob(tv_task, computer, static_cast<core::Season>(season),
                              static_cast<core::DayType>(day), band) == 0.0);
                CHECK(pu.prob(tv_task, tv, static_cast<core::Season>(season),
                              static_cast<core::DayType>(day), band) == 1.0);
            }

    SUBCASE("a season-qualified rule overrides the wildcard only in season") {
        auto seasonal = appliance::parse_appliance_catalog(R"(
[appliance.dryer]
aum = cycle
cycle = 60:2500

[pu]
row = laundry, dryer, 0.2
row = laundry, dryer, 0.9, winter, *, *
)",
                                                           "<t>");
        activity::ActivityCodebook c2;
        std::uint16_t laundry = c2.intern("laundry");
        appliance::PuResolver pu2(seasonal, c2);
        int dryer = seasonal.model_index("dryer");
        CHECK(pu2.prob(laundry, dryer, core::Season::winter, core::DayType::weekday, 0) ==
              doctest::Approx(0.9));
        CHECK(pu2.prob(laundry, dryer, core::Season::summer, core::DayType::weekday, 0) ==
              doctest::Approx(0.2));
    }
}

TEST_CASE("seasonal pu drives seasonal energy") {
    auto appliances = appliance::parse_appliance_catalog(R"(
[appliance.dryer]
aum = cycle
cycle = 60:2500

[pu]
row = laundry, dryer, 0.2
row = laundry, dryer, 0.9, winter, *, *
)",
                                                         "<t>");
    auto pop = one_household({"dryer"});
    auto catalog = single_task_catalog({simple_spec("rest", 0, 1440, 400, 600),
                                        simple_spec("laundry", 600, 700, 10, 20)});
    sim::PipelineOptions po;
    po.sim.horizon_days = 28;
    po.sim.seed = 6;
    po.sim.start_date = {2026, 1, 5}; // winter
    auto winter = sim::run(pop, catalog, &appliances, po);
    po.sim.start_date = {2026, 7, 6}; // summer
    auto summer = sim::run(pop, catalog, &appliances, po);
    CHECK(category_energy_wh(winter, "dryer") > category_energy_wh(summer, "dryer"));
}

TEST_CASE("dhw tank physics") {
    appliance::DhwConfig cfg;
    cfg.present = true;
    cfg.tank_liters = 200;
    cfg.setpoint_c = 55;
    cfg.inlet_c = 12;
    cfg.ambient_c = 20;
    cfg.heater_w = 2400;
    cfg.loss_ua_w_per_k = 1.7;
    cfg.windows = {{1380, 1440}, {0, 510}, {780, 930}};
    cfg.validate();

    SUBCASE("no draw at setpoint inside a window: heater off") {
        appliance::DhwState state;
        state.temp_c = 55.0;
        state.start_day();
        CHECK(appliance::dhw_step(state, cfg, 0.0, 60) == 0.0);
        CHECK(state.temp_c < 55.0); // standing loss pulled it down slightly
    }
    SUBCASE("a draw outside the windows drops the temperature without heating") {
        appliance::DhwState state;
        state.temp_c = 55.0;
        state.start_day();
        double before = state.temp_c;
        double w = appliance::dhw_step(state, cfg, 40.0, 19 * 60); // 19:00, off-window
        CHECK(w == 0.0);
        CHECK(state.temp_c < before - 1.0);
        // stays off until the next window opens
        double w2 = appliance::dhw_step(state, cfg, 0.0, 19 * 60 + 1);
        CHECK(w2 == 0.0);
        double w3 = appliance::dhw_step(state, cfg, 0.0, 1381);
        CHECK(w3 == cfg.heater_w);
    }
    SUBCASE("daily energy balance closes") {
        appliance::DhwState state;
        state.temp_c = 55.0;
        state.start_day();
        auto rng = core::RngStream::derive(10, {1});
        for (int m = 0; m < core::kMinutesPerDay; ++m) {
            double draw = rng.bernoulli(0.01) ? 6.7 : 0.0;
            appliance::dhw_step(state, cfg, draw, m);
        }
        auto balance = appliance::day_balance(state, cfg);
        CHECK(balance.heater_wh > 0.0);
        CHECK(balance.relative_error() < 0.01);
        CHECK(balance.relative_error() < 1e-9); // closes to float precision
    }
    SUBCASE("shower probability: quota over expected remaining tasks") {
        CHECK(appliance::shower_probability(0, 5, false) == 0.0);
        CHECK(appliance::shower_probability(1, 1, false) == 1.0);
        CHECK(appliance::shower_probability(3, 2, false) == 1.0); // clamped
        CHECK(appliance::shower_probability(2, 8, false) == doctest::Approx(0.25));
        CHECK(appliance::shower_probability(5, 10, true) == 0.0); // suppressed
    }
}

TEST_CASE("load curves: aggregation, reduction, round-trip") {
    appliance::LoadCurve a, b;
    a.values_w.assign(60, 100.0);
    b.values_w.assign(60, 300.0);

    SUBCASE("aggregate is the per-step mean; single curve is identity") {
        std::vector<appliance::LoadCurve> curves = {a, b};
        auto mean = appliance::aggregate_load(curves);
        for (double v : mean.values_w)
            CHECK(v == doctest::Approx(200.0));
        std::vector<appliance::LoadCurve> one = {a};
        auto same = appliance::aggregate_load(one);
        CHECK(same.values_w == a.values_w);
    }
    SUBCASE("misaligned curves are rejected") {
        appliance::LoadCurve c = a;
        c.values_w.push_back(1.0);
        std::vector<appliance::LoadCurve> curves = {a, c};
        CHECK_THROWS_AS(appliance::aggregate_load(curves), appliance::ApplianceError);
    }
    SUBCASE("resolution reduction averages blocks") {
        appliance::LoadCurve fine;
        for (int i = 0; i < 60; ++i)
            fine.values_w.push_back(i < 30 ? 0.0 : 60.0);
        auto coarse = appliance::reduce_resolution(fine, 30);
        REQUIRE(coarse.values_w.size() == 2);
        CHECK(coarse.values_w[0] == 0.0);
        CHECK(coarse.values_w[1] == 60.0);
    }
    SUBCASE("csv round-trip") {
        std::string path = (std::filesystem::temp_directory_path() / "curve_rt.csv").string();
        a.start_date = {2026, 3, 2};
        a.values_w[7] = 123.456;
        appliance::save_load_curve(a, path);
        auto back = appliance::load_load_curve(path);
        CHECK(back.values_w == a.values_w);
        CHECK(back.start_date.month == 3);
        std::filesystem::remove(path);
    }
}

TEST_CASE("appliance catalog validation and round-trip") {
    CHECK_THROWS_AS(appliance::parse_appliance_catalog("[pu]\nrow = a, ghost, 0.5\n", "<t>"),
                    appliance::ApplianceError);
    CHECK_THROWS_AS(appliance::parse_appliance_catalog(
                        "[appliance.x]\naum = fractional\npower = 10\nfraction = 1.5\n", "<t>"),
                    appliance::ApplianceError);
    CHECK_THROWS_AS(appliance::parse_appliance_catalog(
                        "[appliance.x]\naum = cycle\ncycle = 0:100\n", "<t>"),
                    appliance::ApplianceError);

    auto catalog = testfix::appliance_catalog();
    std::string path = (std::filesystem::temp_directory_path() / "appl_rt.conf").string();
    appliance::save_appliance_catalog(catalog, path);
    auto back = appliance::load_appliance_catalog(path);
    CHECK(back.models.size() == catalog.models.size());
    CHECK(back.pu_rules.size() == catalog.pu_rules.size());
    CHECK(back.composites.size() == catalog.composites.size());
    CHECK(back.dhw.windows == catalog.dhw.windows);
    for (std::size_t i = 0; i < catalog.models.size(); ++i) {
        CHECK(back.models[i].category == catalog.models[i].category);
        CHECK(back.models[i].unit_power_w == catalog.models[i].unit_power_w);
    }
    std::filesystem::remove(path);
}

TEST_CASE("dwelling power is additive across overlapping sources") {
    auto appliances = appliance::parse_appliance_catalog(R"(
[appliance.tv]
aum = forced
power = 100

[appliance.oven]
aum = cycle
cycle = 30:2000, 60:200

[pu]
row = show, tv, 1
row = show, oven, 1

[composite.home]
baseline = 20, 20, 20, 20, 20
)",
                                                         "<t>");
    auto pop = one_household({"tv", "oven"});
    auto catalog = single_task_catalog({simple_spec("rest", 0, 600, 590, 600),
                                        simple_spec("show", 600, 700, 60, 60)});
    sim::PipelineOptions po;
    po.sim.horizon_days = 1;
    po.sim.seed = 11;
    po.record_dwelling_curves = true;
    auto run = sim::run(pop, catalog, &appliances, po);
    auto curve = run.dwelling_curve(0);

    // during the first oven phase: tv 100 + oven 2000 + baseline 20
    CHECK(curve.values_w[605] == doctest::Approx(2120.0));
    // after the task ends the cycle keeps going: second phase 200 + baseline
    CHECK(curve.values_w[665] == doctest::Approx(220.0));
    for (double v : curve.values_w)
        CHECK(v >= 0.0);
}

TEST_CASE("baseline-only dwelling meters its composite schedule") {
    auto appliances = appliance::parse_appliance_catalog(R"(
[composite.home]
baseline = 20, 20, 20, 20, 20
)",
                                                         "<t>");
    auto pop = one_household({});
    auto catalog = single_task_catalog({simple_spec("rest", 0, 1440, 400, 600)});
    sim::PipelineOptions po;
    po.sim.horizon_days = 1;
    po.sim.seed = 2;
    auto run = sim::run(pop, catalog, &appliances, po);
    auto mean = run.mean_load_curve();
    for (double v : mean.values_w)
        CHECK(v == doctest::Approx(20.0));
}

TEST_CASE("calibration: fixed point, linear scaling, multi-category convergence") {
    auto pop = one_household({"heater_like", "fridge_like", "washer_like"});
    auto catalog = single_task_catalog({simple_spec("rest", 0, 1440, 400, 600),
                                        simple_spec("use_a", 600, 800, 60, 120),
                                        simple_spec("use_b", 800, 1000, 30, 60),
                                        simple_spec("use_c", 1000, 1200, 10, 20)});
    auto appliances = appliance::parse_appliance_catalog(R"(
[appliance.heater_like]
aum = forced
power = 1000

[appliance.fridge_like]
aum = fractional
power = 500
fraction = 0.5
burst = 5

[appliance.washer_like]
aum = cycle
cycle = 30:1500, 30:300

[pu]
row = use_a, heater_like, 1
row = use_b, fridge_like, 1
row = use_c, washer_like, 0.9
)",
                                                        "<t>");
    appliance::CalibrationOptions opt;
    opt.workers = 1;

    SUBCASE("targets equal to the uncalibrated output converge immediately") {
        // first, learn the uncalibrated annual energies via a probe run
        std::vector<appliance::CalibrationTarget> probe = {{"heater_like", 1.0}};
        // run calibration with an unreachable tolerance of one iteration to
        // observe simulated values
        appliance::CalibrationOptions probe_opt = opt;
        probe_opt.max_iterations = 1;
        auto probe_result =
            appliance::calibrate_unit_powers(pop, catalog, appliances, probe, 21, probe_opt);
        double own = probe_result.report.front().simulated_kwh;
        REQUIRE(own > 0.0);

        std::vector<appliance::CalibrationTarget> targets = {{"heater_like", own}};
        auto result = appliance::calibrate_unit_powers(pop, catalog, appliances, targets, 21, opt);
        CHECK(result.converged);
        CHECK(result.iterations == 1);
        CHECK(result.report.front().factor == 1.0);
    }
    SUBCASE("forced category: doubling the target doubles the power in one step") {
        appliance::CalibrationOptions one = opt;
        one.max_iterations = 1;
        auto probe = appliance::calibrate_unit_powers(pop, catalog, appliances,
                                                      {{{"heater_like", 1.0}}}, 21, one);
        double own = probe.report.front().simulated_kwh;

        std::vector<appliance::CalibrationTarget> targets = {{"heater_like", 2.0 * own}};
        auto result = appliance::calibrate_unit_powers(pop, catalog, appliances, targets, 21, opt);
        CHECK(result.converged);
        CHECK(result.report.front().factor == doctest::Approx(2.0));
        int corrective = 0;
        for (const auto& row : result.report)
            corrective += row.factor != 1.0;
        CHECK(corrective == 1); // lands exactly after one scaling
        CHECK(result.calibrated.models[result.calibrated.model_index("heater_like")].unit_power_w ==
              doctest::Approx(2000.0));
    }
    SUBCASE("three categories reach synthetic targets within 1% in ten corrections") {
        appliance::CalibrationOptions one = opt;
        one.max_iterations = 1;
        auto probe = appliance::calibrate_unit_powers(
            pop, catalog, appliances,
            {{{"heater_like", 1.0}, {"fridge_like", 1.0}, {"washer_like", 1.0}}}, 21, one);
        std::vector<appliance::CalibrationTarget> targets;
        for (const auto& row : probe.report)
            targets.push_back({row.category, row.simulated_kwh * (row.category == "washer_like"
                                                                      ? 3.1
                                                                      : 0.6)});
        auto result = appliance::calibrate_unit_powers(pop, catalog, appliances, targets, 21, opt);
        CHECK(result.converged);
        CHECK(result.iterations - 1 <= 10);
        for (const auto& row : result.report)
            if (row.iteration == result.iterations)
                CHECK(std::abs(row.simulated_kwh - row.target_kwh) <= 0.01 * row.target_kwh);
    }
    SUBCASE("non-positive targets are rejected") {
        CHECK_THROWS_AS(appliance::calibrate_unit_powers(pop, catalog, appliances,
                                                         {{{"heater_like", 0.0}}}, 21, opt),
                        appliance::ApplianceError);
    }
}
