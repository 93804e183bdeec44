#pragma once

#include <cstdint>

namespace zeroent {

// Counter-based uniform variates: sample i, dimension d of a run seeded with s
// always yields the same double, independent of thread scheduling. splitmix64
// finalizer applied to the (seed, index, dim) triple.

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

inline std::uint64_t stream_bits(std::uint64_t seed, std::uint64_t index, std::uint32_t dim) {
    std::uint64_t h = splitmix64(seed ^ 0xA5A5A5A5A5A5A5A5ULL);
    h = splitmix64(h ^ index);
    h = splitmix64(h ^ (0x1000000000000ULL * (dim + 1)));
    return h;
}

/// Uniform variate in [0, 1) with 53 random bits.
inline double stream_u01(std::uint64_t seed, std::uint64_t index, std::uint32_t dim = 0) {
    return double(stream_bits(seed, index, dim) >> 11) * 0x1.0p-53;
}

}  // namespace zeroent
