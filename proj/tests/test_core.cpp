// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include "actiload/core/config.hpp"
#include "actiload/core/csv.hpp"
#include "actiload/core/date.hpp"
#include "actiload/core/rng.hpp"

using namespace actiload;

TEST_CASE("rng streams are deterministic and key-separated") {
    auto a = core::RngStream::derive(42, {1, 2, 3});
    auto b = core::RngStream::derive(42, {1, 2, 3});
    auto c = core::RngStream::derive(42, {1, 2, 4});
    for (int i = 0; i < 100; ++i) {
        auto va = a.next_u64();
        CHECK(va == b.next_u64());
        CHECK(va != c.next_u64()); // overwhelmingly unlikely to collide
    }
}

TEST_CASE("rng uniforms stay in range and hit their mean") {
    auto rng = core::RngStream::derive(7, {9});
    double sum = 0.0;
    for (int i = 0; i < 20000; ++i) {
        double u = rng.next_double();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        sum += u;
    }
    CHECK(sum / 20000 == doctest::Approx(0.5).epsilon(0.02));

    int counts[5] = {0, 0, 0, 0, 0};
    for (int i = 0; i < 5000; ++i)
        counts[rng.next_int(0, 4)]++;
    for (int k = 0; k < 5; ++k)
        CHECK(counts[k] > 800);
}

TEST_CASE("stochastic rounding has the right expectation") {
    auto rng = core::RngStream::derive(3, {1});
    long total = 0;
    for (int i = 0; i < 10000; ++i)
        total += rng.stochastic_round(2.3);
    CHECK(total / 10000.0 == doctest::Approx(2.3).epsilon(0.01));
    CHECK(rng.stochastic_round(3.0) == 3);
    CHECK(rng.stochastic_round(0.0) == 0);
}

TEST_CASE("civil date arithmetic") {
    CHECK(core::days_from_civil({1970, 1, 1}) == 0);
    CHECK(core::weekday_of(core::days_from_civil({2026, 1, 5})) == 0); // a Monday
    CHECK(core::weekday_of(core::days_from_civil({2026, 1, 10})) == 5);
    CHECK(core::weekday_of(core::days_from_civil({2026, 1, 11})) == 6);
    auto d = core::civil_from_days(core::days_from_civil({2026, 2, 28}) + 1);
    CHECK(d.month == 3);
    CHECK(d.day == 1); // 2026 is not a leap year
    CHECK(core::season_of_month(12) == core::Season::winter);
    CHECK(core::season_of_month(7) == core::Season::summer);
    CHECK(core::parse_minute_of_day("07:40") == 460);
    CHECK(core::format_minute_of_day(1190) == "19:50");
}

TEST_CASE("config parser reports line numbers and rejects malformed input") {
    auto doc = core::ConfigDoc::parse_string("[a]\nx = 1\ny = hello\n\n[b.c]\nx = 2\nx = 3\n", "t");
    CHECK(doc.require("a").require_int("x") == 1);
    CHECK(doc.require("a").require("y") == "hello");
    CHECK(doc.with_prefix("b.").size() == 1);
    CHECK(doc.require("b.c").values("x").size() == 2);

    CHECK_THROWS_WITH_AS(core::ConfigDoc::parse_string("x = 1\n", "t"),
                         doctest::Contains("t:1"), core::ConfigError);
    CHECK_THROWS_AS(core::ConfigDoc::parse_string("[a]\nbad line\n", "t"), core::ConfigError);
    CHECK_THROWS_AS(core::ConfigDoc::parse_string("[a]\n[a]\n", "t"), core::ConfigError);
    CHECK_THROWS_AS(doc.require("a").require_double("y"), core::ConfigError);
}

TEST_CASE("doubles round-trip through their formatted text") {
    for (double v : {0.0, 1.5, 1.0 / 3.0, 123456.789, 1e-9, 73.20000000000001}) {
        std::string s = core::format_double(v);
        CHECK(std::stod(s) == v);
    }
}
