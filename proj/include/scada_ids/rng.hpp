#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace scada_ids::rng {

// std::mt19937_64 output is fixed by the standard; the distributions are not.
// Everything below is written against raw engine output so that a seed
// reproduces the same stream on every standard library.
using Engine = std::mt19937_64;

/// SplitMix64 finaliser, used to derive independent child seeds.
[[nodiscard]] constexpr std::uint64_t mix(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

[[nodiscard]] constexpr std::uint64_t derive(std::uint64_t seed, std::uint64_t stream) noexcept {
    return mix(seed ^ mix(stream + 0x632BE59BD9B4E019ULL));
}

/// Uniform double in [0, 1) with 53 random bits.
[[nodiscard]] inline double uniform01(Engine& engine) {
    return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

[[nodiscard]] inline double uniform(Engine& engine, double lo, double hi) {
    return lo + (hi - lo) * uniform01(engine);
}

/// Uniform integer in [0, n), unbiased by rejection. n must be positive.
[[nodiscard]] inline std::size_t index(Engine& engine, std::size_t n) {
    const std::uint64_t bound = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t draw = engine();
    while (draw >= limit) {
        draw = engine();
    }
    return static_cast<std::size_t>(draw % bound);
}

[[nodiscard]] inline bool bernoulli(Engine& engine, double p) {
    return uniform01(engine) < p;
}

template <typename T>
void shuffle(std::span<T> items, Engine& engine) {
    for (std::size_t i = items.size(); i > 1; --i) {
        const std::size_t j = index(engine, i);
        using std::swap;
        swap(items[i - 1], items[j]);
    }
}

} // namespace scada_ids::rng
