#pragma once

#include <cstdint>

namespace qmcx {

// SplitMix64 finalizer. Full-avalanche 64-bit mix used as a counter-based
// RNG: hashing (seed, counter...) tuples gives reproducible, statistically
// independent streams without storing generator state.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b) {
    return mix64(a ^ mix64(b));
}

inline std::uint64_t hash3(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
    return hash_combine(hash_combine(a, b), c);
}

// Double in [0,1) from the top 53 bits of a hash.
inline double to_unit_double(std::uint64_t h) {
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

}  // namespace qmcx
