// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <span>

namespace actiload::core {

// Keyed counter-style random streams built on splitmix64. Every consumer
// derives its own stream from (seed, purpose, ids...), so results never
// depend on scheduling order or worker count, and paired runs that share a
// seed consume identical streams for everything their configs have in common.
class RngStream {
public:
    explicit RngStream(std::uint64_t state) : state_(state) {}

    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Stream identity: fold each key into the seed with one mix round.
    static RngStream derive(std::uint64_t seed, std::initializer_list<std::uint64_t> keys) {
        std::uint64_t s = mix(seed ^ 0x5851f42d4c957f2dULL);
        for (std::uint64_t k : keys)
            s = mix(s ^ (k + 0x9e3779b97f4a7c15ULL));
        return RngStream(s);
    }

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1).
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform integer in [lo, hi], inclusive.
    int next_int(int lo, int hi) {
        if (hi <= lo)
            return lo;
        std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<int>(next_u64() % span);
    }

    bool bernoulli(double p) {
        if (p <= 0.0)
            return false;
        if (p >= 1.0)
            return true;
        return next_double() < p;
    }

    // floor(x) + Bernoulli(frac(x)); expectation equals x for x >= 0.
    int stochastic_round(double x) {
        if (x <= 0.0)
            return 0;
        double fl = std::floor(x);
        int n = static_cast<int>(fl);
        return n + (bernoulli(x - fl) ? 1 : 0);
    }

    // Categorical draw over non-negative weights; weights need not sum to 1.
    std::size_t pick(std::span<const double> weights) {
        double total = 0.0;
        for (double w : weights)
            total += w;
        double u = next_double() * total;
        double acc = 0.0;
        for (std::size_t i = 0; i < weights.size(); ++i) {
            acc += weights[i];
            if (u < acc)
                return i;
        }
        return weights.empty() ? 0 : weights.size() - 1;
    }

private:
    std::uint64_t state_;
};

// Purpose tags for stream derivation. Values are arbitrary but frozen:
// changing them changes every seeded result.
namespace streams {
inline constexpr std::uint64_t kPopHousehold = 1;
inline constexpr std::uint64_t kPopMember = 2;
inline constexpr std::uint64_t kPopDwelling = 3;
inline constexpr std::uint64_t kPopAppliance = 4;
inline constexpr std::uint64_t kAssignment = 5;
inline constexpr std::uint64_t kTaskDuration = 6;
inline constexpr std::uint64_t kWeeklyDays = 7;
inline constexpr std::uint64_t kWeather = 8;
inline constexpr std::uint64_t kActivation = 9;
inline constexpr std::uint64_t kFractional = 10;
inline constexpr std::uint64_t kShower = 11;
inline constexpr std::uint64_t kCompliance = 12;
} // namespace streams

} // namespace actiload::core
