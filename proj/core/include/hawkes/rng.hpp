#pragma once

#include <cstdint>
#include <random>

namespace hawkes {

/// The toolkit's random engine: 64-bit Mersenne Twister. Independent streams are
/// derived from a master seed with SplitMix64, so simulators that share a seed
/// but use different stream ids draw uncorrelated sequences.
using Rng = std::mt19937_64;

/// SplitMix64 finalizer.
[[nodiscard]] constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Stream `stream_id` of master seed `seed`.
[[nodiscard]] inline Rng make_stream(std::uint64_t seed, std::uint64_t stream_id) {
    const std::uint64_t mixed = splitmix64(splitmix64(seed) ^ splitmix64(~stream_id));
    std::seed_seq seq{static_cast<std::uint32_t>(mixed), static_cast<std::uint32_t>(mixed >> 32),
                      static_cast<std::uint32_t>(stream_id)};
    return Rng(seq);
}

/// Uniform double in [0, 1) from the top 53 bits of one engine draw.
[[nodiscard]] inline double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

namespace streams {
inline constexpr std::uint64_t kImmigrants = 1;
inline constexpr std::uint64_t kOffspring = 2;
inline constexpr std::uint64_t kThinning = 3;
inline constexpr std::uint64_t kRecipe = 4;
}  // namespace streams

}  // namespace hawkes
