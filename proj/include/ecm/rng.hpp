#pragma once

#include <bit>
#include <cstdint>
#include <random>

namespace ecm {

/// Random stream type used by all sampling code. Callers own the stream;
/// concurrent tasks must use distinct streams.
using RandomStream = std::mt19937_64;

/// SplitMix64 finalizer. Used for seed derivation only, never as a stream.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Per-trial seed as a pure function of (master_seed, gamma, n, replication).
/// Scheduling and execution order never enter the derivation.
inline std::uint64_t derive_seed(std::uint64_t master_seed, double gamma,
                                 std::uint64_t n, std::uint64_t replication) {
    std::uint64_t h = splitmix64(master_seed);
    h = splitmix64(h ^ std::bit_cast<std::uint64_t>(gamma));
    h = splitmix64(h ^ n);
    h = splitmix64(h ^ replication);
    return h;
}

/// Uniform draw on the open interval (0,1) with 53-bit resolution.
/// Never returns 0 or 1, so inverse transforms stay finite.
inline double uniform_open01(RandomStream& rng) {
    return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

/// Unbiased uniform integer in [0, bound), bound >= 1.
/// Widening-multiply rejection method; fully determined by the stream,
/// independent of the standard library's distribution internals.
inline std::uint64_t bounded_uniform(RandomStream& rng, std::uint64_t bound) {
    std::uint64_t x = rng();
    unsigned __int128 m = static_cast<unsigned __int128>(x) * bound;
    auto lo = static_cast<std::uint64_t>(m);
    if (lo < bound) {
        const std::uint64_t threshold = (0 - bound) % bound;
        while (lo < threshold) {
            x = rng();
            m = static_cast<unsigned __int128>(x) * bound;
            lo = static_cast<std::uint64_t>(m);
        }
    }
    return static_cast<std::uint64_t>(m >> 64);
}

}  // namespace ecm
