#pragma once

#include <cstdint>

namespace ndopt::sim {

/// Counter-based generator: every draw is a pure function of
/// (master seed, trial index, draw index), so trials can run in any order,
/// on any number of threads, and still reproduce bit-identically.
///
/// The construction (chained splitmix64 finalizers) is part of the output
/// contract and must stay stable within a major version.
constexpr uint64_t splitmix64(uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr uint64_t keyed_u64(uint64_t seed, uint64_t trial, uint64_t draw) {
    return splitmix64(splitmix64(splitmix64(seed) ^ trial) ^ draw);
}

/// Uniform integer in [0, n) via the high 64 bits of a 128-bit product.
constexpr int64_t keyed_below(uint64_t seed, uint64_t trial, uint64_t draw, int64_t n) {
    const unsigned __int128 wide =
        static_cast<unsigned __int128>(keyed_u64(seed, trial, draw)) *
        static_cast<unsigned __int128>(n);
    return static_cast<int64_t>(wide >> 64);
}

} // namespace ndopt::sim
