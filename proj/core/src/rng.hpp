#pragma once

#include <cstdint>

#include "normreg/matrix.hpp"

// Counter-based generation: every draw is a pure function of (seed, i, j)
// and the draw number, so fill order, mirroring, and parallelism cannot
// change a single entry.
namespace normreg::detail {

inline std::uint64_t mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

inline std::uint64_t entry_key(std::uint64_t seed, index_t i, index_t j) {
    std::uint64_t h = mix(seed ^ 0x2545f4914f6cdd1dull);
    h = mix(h ^ (static_cast<std::uint64_t>(i) * 0xff51afd7ed558ccdull));
    h = mix(h ^ (static_cast<std::uint64_t>(j) * 0xc4ceb9fe1a85ec53ull));
    return h;
}

inline std::uint64_t draw_bits(std::uint64_t key, int draw) {
    return mix(key + static_cast<std::uint64_t>(draw) * 0x9e3779b97f4a7c15ull);
}

// uniform on [0, 1), 53 significant bits
inline double unit_open(std::uint64_t bits) { return (bits >> 11) * 0x1.0p-53; }

// uniform on (0, 1], safe under log()
inline double unit_closed(std::uint64_t bits) {
    return ((bits >> 11) + 1) * 0x1.0p-53;
}

} // namespace normreg::detail
