#pragma once

#include <cstdint>
#include <random>

namespace uand {

/// splitmix64 finalizer; used to derive independent stream seeds.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Deterministic generator for stream (seed, a, b). Distinct (a, b)
/// give statistically independent streams, so batches can be produced
/// out of order or in parallel with identical results.
inline std::mt19937_64 rng_for(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
    return std::mt19937_64(mix64(mix64(mix64(seed) ^ a) ^ b));
}

}  // namespace uand
