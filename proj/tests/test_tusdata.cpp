// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>

#include "actiload/core/rng.hpp"
#include "actiload/tusdata/taskspec.hpp"
#include "helpers.hpp"

using namespace actiload;

namespace {

// Independent brute-force band: scan grid half-widths from zero upward, take
// the first window around the mean covering at least X% of the values, then
// report the observed extremes inside it.
std::pair<int, int> oracle_band(const std::vector<int>& values, double x) {
    const double n = static_cast<double>(values.size());
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    int k = static_cast<int>(std::ceil(x * n / 100.0 - 1e-9));
    if (k < 1)
        k = 1;
    for (int delta = 0;; delta += 10) {
        int count = 0;
        int lo = 0, hi = 0;
        bool any = false;
        for (int v : values) {
            if (std::abs(v - mean) <= delta + 1e-9) {
                ++count;
                if (!any || v < lo)
                    lo = v;
                if (!any || v > hi)
                    hi = v;
                any = true;
            }
        }
        if (count >= k)
            return {lo, hi};
    }
}

std::string write_temp(const std::string& name, const std::string& text) {
    std::string path = (std::filesystem::temp_directory_path() / name).string();
    std::ofstream out(path);
    out << text;
    return path;
}

tusdata::TusRecord simple_record(const std::string& id, core::Weather weather,
                                 const std::vector<std::pair<int, int>>& episodes,
                                 const std::string& code, bool with_others) {
    tusdata::TusRecord rec;
    rec.respondent_id = id;
    rec.gender = "female";
    rec.age = 40;
    rec.employment = "active";
    rec.day_type = core::DayType::weekday;
    rec.weather = weather;
    for (auto& slot : rec.slots)
        slot = {"other", false};
    for (const auto& [start, dur] : episodes)
        for (int s = start / 10; s < (start + dur) / 10; ++s)
            rec.slots[static_cast<std::size_t>(s)] = {code, with_others};
    return rec;
}

} // namespace

TEST_CASE("x_band equals the brute-force minimal symmetric grid window") {
    auto rng = core::RngStream::derive(99, {1});
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<int> values;
        int n = rng.next_int(1, 40);
        for (int i = 0; i < n; ++i)
            values.push_back(rng.next_int(1, 100) * 10);
        for (double x : {30.0, 50.0, 70.0, 90.0, 100.0}) {
            auto band = tusdata::x_band(values, x);
            auto [lo, hi] = oracle_band(values, x);
            CAPTURE(trial);
            CAPTURE(x);
            REQUIRE(band.lo == lo);
            REQUIRE(band.hi == hi);
            // coverage: at least x% of values inside the reported band
            int inside = 0;
            for (int v : values)
                inside += (v >= band.lo && v <= band.hi);
            REQUIRE(inside * 100.0 >= x * n - 1e-6);
        }
    }
}

TEST_CASE("x_band is monotone in X") {
    auto rng = core::RngStream::derive(100, {2});
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<int> values;
        for (int i = 0, n = rng.next_int(3, 30); i < n; ++i)
            values.push_back(rng.next_int(0, 144) * 10);
        tusdata::Band prev;
        bool first = true;
        for (double x : {20.0, 40.0, 60.0, 80.0, 100.0}) {
            auto band = tusdata::x_band(values, x);
            if (!first) {
                CHECK(band.lo <= prev.lo);
                CHECK(band.hi >= prev.hi);
            }
            prev = band;
            first = false;
        }
        // X = 100 covers everything observed
        CHECK(prev.lo == *std::min_element(values.begin(), values.end()));
        CHECK(prev.hi == *std::max_element(values.begin(), values.end()));
    }
}

TEST_CASE("work fixture recovers the reference bands at X=90 and X=50") {
    auto records = testfix::work_fixture_records();
    tusdata::ExtractOptions opt;

    opt.x.x = 90.0;
    auto spec90 = tusdata::extract_task_spec(records, "work", core::DayType::weekday,
                                             "F_50-64_active", opt);
    CHECK(spec90.pp_start == 6 * 60);
    CHECK(spec90.pp_end == 19 * 60 + 50);
    CHECK(spec90.min_duration == 2 * 60);
    CHECK(spec90.max_duration == 12 * 60);
    CHECK(spec90.freq_per_day == doctest::Approx(1.0));
    CHECK_FALSE(spec90.fallback);

    opt.x.x = 50.0;
    auto spec50 = tusdata::extract_task_spec(records, "work", core::DayType::weekday,
                                             "F_50-64_active", opt);
    CHECK(spec50.pp_start == 7 * 60 + 40);
    CHECK(spec50.pp_end == 16 * 60 + 50);
    CHECK(spec50.min_duration == 5 * 60);
    CHECK(spec50.max_duration == 10 * 60);

    SUBCASE("X=100 yields the observed extremes") {
        opt.x.x = 100.0;
        auto spec100 = tusdata::extract_task_spec(records, "work", core::DayType::weekday,
                                                  "F_50-64_active", opt);
        CHECK(spec100.min_duration == 40);
        CHECK(spec100.max_duration == 980);
    }
    SUBCASE("sparse data falls back to a parent segmentation and is flagged") {
        opt.x.x = 90.0;
        auto fb = tusdata::extract_task_spec(records, "work", core::DayType::weekday,
                                             "F_50-64_retired", opt);
        CHECK(fb.fallback);
        CHECK(fb.min_duration == spec90.min_duration);
    }
    SUBCASE("extraction is deterministic") {
        opt.x.x = 90.0;
        auto again = tusdata::extract_task_spec(records, "work", core::DayType::weekday,
                                                "F_50-64_active", opt);
        CHECK(again.pp_start == spec90.pp_start);
        CHECK(again.max_duration == spec90.max_duration);
    }
}

TEST_CASE("tus csv parsing") {
    std::string header = "respondent_id,gender,age,employment,day_type,weather,slot_index,activity,"
                         "who_present\n";
    SUBCASE("complete interleaved diaries parse into ordered records") {
        std::string body;
        for (int s = 0; s < tusdata::kSlotsPerDay; ++s) {
            body += "r1,female,30,active,weekday,good," + std::to_string(s) + ",sleep,alone\n";
            body += "r2,male,40,active,weekday,bad," + std::to_string(s) + ",work,alone\n";
        }
        auto path = write_temp("tus_ok.csv", header + body);
        auto records = tusdata::parse_tus(path);
        REQUIRE(records.size() == 2);
        CHECK(records[0].respondent_id == "r1");
        CHECK(records[1].respondent_id == "r2");
        CHECK(records[0].weather == core::Weather::good);
        CHECK(records[1].slots[0].activity == "work");
    }
    SUBCASE("incomplete diary names the missing slots") {
        std::string body;
        for (int s = 0; s < tusdata::kSlotsPerDay - 1; ++s)
            body += "r1,female,30,active,weekday,good," + std::to_string(s) + ",sleep,alone\n";
        auto path = write_temp("tus_incomplete.csv", header + body);
        CHECK_THROWS_WITH_AS(tusdata::parse_tus(path), doctest::Contains("143"), tusdata::TusError);
    }
    SUBCASE("schema errors carry the row number") {
        auto path = write_temp("tus_bad.csv", header + "r1,female,30,active,weekday,good,7,sleep\n");
        CHECK_THROWS_WITH_AS(tusdata::parse_tus(path), doctest::Contains(":2"), tusdata::TusError);
    }
}

TEST_CASE("episode extraction is run-length over the ten-minute grid") {
    auto rec = simple_record("r", core::Weather::unknown, {{420, 30}}, "cook", false);
    auto eps = tusdata::extract_episodes(rec, "cook");
    REQUIRE(eps.size() == 1);
    CHECK(eps[0].start_min == 420);
    CHECK(eps[0].duration_min == 30);

    CHECK(tusdata::extract_episodes(rec, "garden").empty());

    SUBCASE("alternating activities split episodes") {
        auto rec2 = simple_record("r", core::Weather::unknown, {{420, 20}, {460, 30}}, "cook", false);
        rec2.slots[44] = {"eat", false}; // 440-450 between the two cook runs
        auto two = tusdata::extract_episodes(rec2, "cook");
        REQUIRE(two.size() == 2);
        CHECK(two[0].start_min == 420);
        CHECK(two[0].duration_min == 20);
        CHECK(two[1].start_min == 460);
        CHECK(two[1].duration_min == 30);
    }
}

TEST_CASE("collectivity is duration-weighted and order-invariant") {
    std::vector<tusdata::TusRecord> records;
    // 6 of 10 hour-long cooking episodes shared: collectivity 0.60 exactly
    for (int i = 0; i < 10; ++i)
        records.push_back(simple_record("c" + std::to_string(i), core::Weather::unknown,
                                        {{600, 60}}, "cooking", i < 6));
    CHECK(tusdata::compute_collectivity(records, "cooking") == doctest::Approx(0.60).epsilon(0.02));

    std::reverse(records.begin(), records.end());
    CHECK(tusdata::compute_collectivity(records, "cooking") == doctest::Approx(0.60).epsilon(1e-12));

    SUBCASE("rare sharing") {
        std::vector<tusdata::TusRecord> hk;
        for (int i = 0; i < 50; ++i)
            hk.push_back(simple_record("h" + std::to_string(i), core::Weather::unknown, {{600, 60}},
                                       "housekeeping", i == 0));
        CHECK(tusdata::compute_collectivity(hk, "housekeeping") == doctest::Approx(0.02));
    }
    SUBCASE("all alone is zero, no data throws") {
        std::vector<tusdata::TusRecord> alone = {
            simple_record("a", core::Weather::unknown, {{600, 60}}, "reading", false)};
        CHECK(tusdata::compute_collectivity(alone, "reading") == 0.0);
        CHECK_THROWS_AS(tusdata::compute_collectivity(alone, "absent"), tusdata::TusError);
    }
    SUBCASE("longer shared episodes weigh more than short ones") {
        std::vector<tusdata::TusRecord> mixed = {
            simple_record("m0", core::Weather::unknown, {{600, 120}}, "meal", true),
            simple_record("m1", core::Weather::unknown, {{600, 40}}, "meal", false)};
        CHECK(tusdata::compute_collectivity(mixed, "meal") == doctest::Approx(120.0 / 160.0));
    }
}

TEST_CASE("weather multipliers are duration ratios") {
    std::vector<tusdata::TusRecord> records;
    for (int i = 0; i < 8; ++i)
        records.push_back(simple_record("g" + std::to_string(i), core::Weather::good, {{600, 120}},
                                        "leisure_outside", false));
    for (int i = 0; i < 8; ++i)
        records.push_back(simple_record("b" + std::to_string(i), core::Weather::bad, {{600, 80}},
                                        "leisure_outside", false));
    auto mult = tusdata::compute_weather_multipliers(records, "leisure_outside");
    CHECK(mult[core::Weather::good] == doctest::Approx(1.2));
    CHECK(mult[core::Weather::bad] == doctest::Approx(0.8));

    SUBCASE("uniform durations give unit factors") {
        std::vector<tusdata::TusRecord> uniform;
        for (int i = 0; i < 4; ++i)
            uniform.push_back(simple_record("u" + std::to_string(i),
                                            i % 2 ? core::Weather::good : core::Weather::bad,
                                            {{600, 60}}, "read", false));
        auto m = tusdata::compute_weather_multipliers(uniform, "read");
        CHECK(m[core::Weather::good] == doctest::Approx(1.0));
        CHECK(m[core::Weather::bad] == doctest::Approx(1.0));
    }
    SUBCASE("single weather category yields unit factors") {
        std::vector<tusdata::TusRecord> single = {
            simple_record("s", core::Weather::good, {{600, 60}}, "read", false)};
        auto m = tusdata::compute_weather_multipliers(single, "read");
        CHECK(m[core::Weather::bad] == 1.0);
        CHECK(m[core::Weather::good] == 1.0);
    }
}

TEST_CASE("catalog csv round-trips") {
    auto catalog = testfix::simulation_catalog();
    std::string path =
        (std::filesystem::temp_directory_path() / "actiload_catalog_rt.csv").string();
    tusdata::save_catalog(catalog, path);
    auto back = tusdata::load_catalog(path);
    REQUIRE(back.specs.size() == catalog.specs.size());
    for (std::size_t i = 0; i < catalog.specs.size(); ++i) {
        CHECK(back.specs[i].activity == catalog.specs[i].activity);
        CHECK(back.specs[i].pp_start == catalog.specs[i].pp_start);
        CHECK(back.specs[i].pp_end == catalog.specs[i].pp_end);
        CHECK(back.specs[i].freq_per_day == catalog.specs[i].freq_per_day);
        CHECK(back.specs[i].household_rule == catalog.specs[i].household_rule);
    }
    std::filesystem::remove(path);
}

TEST_CASE("daily assignment generation") {
    auto catalog = testfix::simulation_catalog();
    tusdata::DayInfo weekday{2, core::DayType::weekday}; // a Wednesday

    SUBCASE("daily tasks appear once per frequency unit; assignment is seeded") {
        auto day1 = core::RngStream::derive(5, {1});
        auto week1 = core::RngStream::derive(5, {2});
        auto t1 = tusdata::generate_daily_assignment("F_25-49_active", weekday, catalog, day1, week1);
        auto day2 = core::RngStream::derive(5, {1});
        auto week2 = core::RngStream::derive(5, {2});
        auto t2 = tusdata::generate_daily_assignment("F_25-49_active", weekday, catalog, day2, week2);
        REQUIRE(t1.size() == t2.size());
        for (std::size_t i = 0; i < t1.size(); ++i) {
            CHECK(t1[i].spec == t2[i].spec);
            CHECK(t1[i].count == t2[i].count);
        }
        // sleep x2, breakfast, hygiene x2, two meals, tv always present
        int always = 0;
        for (const auto& t : t1)
            if (t.spec->freq_per_day >= 1.0 && !t.spec->household_level())
                ++always;
        CHECK(always >= 8);
    }

    SUBCASE("a 0.5-per-day task is included about half the days") {
        int included = 0;
        const int n = 1000;
        for (int day = 0; day < n; ++day) {
            auto day_rng = core::RngStream::derive(77, {static_cast<std::uint64_t>(day), 1});
            auto week_rng = core::RngStream::derive(77, {static_cast<std::uint64_t>(day / 7), 2});
            tusdata::DayInfo info{day % 7, core::day_type_of_weekday(day % 7)};
            auto templates =
                tusdata::generate_daily_assignment("F_25-49_active", info, catalog, day_rng, week_rng);
            for (const auto& t : templates)
                if (t.spec->activity == "computer")
                    included += t.count;
        }
        // binomial-style envelope around 500 (freq 0.5/day)
        CHECK(included > 440);
        CHECK(included < 560);
    }

    SUBCASE("empty catalog signals") {
        tusdata::TaskCatalog empty;
        auto day_rng = core::RngStream::derive(1, {1});
        auto week_rng = core::RngStream::derive(1, {2});
        CHECK_THROWS_AS(
            tusdata::generate_daily_assignment("F_25-49_active", weekday, empty, day_rng, week_rng),
            tusdata::TusError);
    }
}
