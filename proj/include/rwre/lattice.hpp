#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <cstddef>

#include "rwre/rng.hpp"

namespace rwre {

// Lattice dimensions supported by the simulation code. Closed-form results
// (theory module) are not bound by this.
inline constexpr int kMaxDim = 8;

/// Lattice site of Z^d. Coordinates beyond the active dimension stay zero, so
/// comparison and hashing over the full array are dimension-consistent.
struct Site {
    std::array<std::int32_t, kMaxDim> c{};

    auto operator<=>(const Site&) const = default;

    static Site origin() { return Site{}; }
};

struct SiteHasher {
    std::size_t operator()(const Site& s) const {
        std::uint64_t h = 0x5bd1e995u;
        for (int i = 0; i < kMaxDim; i += 2) {
            const std::uint64_t lo = static_cast<std::uint32_t>(s.c[i]);
            const std::uint64_t hi = static_cast<std::uint32_t>(s.c[i + 1]);
            h = hash_combine(h, lo | (hi << 32));
        }
        return static_cast<std::size_t>(h);
    }
};

// Directions are indexed (+e1, -e1, +e2, -e2, ...): axis k/2, sign from k%2.
inline Site neighbor(const Site& s, int dir_index) {
    Site t = s;
    t.c[dir_index >> 1] += (dir_index & 1) ? -1 : +1;
    return t;
}

inline std::uint64_t site_key(std::uint64_t seed, const Site& s, int d) {
    std::uint64_t h = mix64(seed ^ 0x9d2c5680cafef00dULL);
    for (int i = 0; i < d; ++i) {
        h = hash_combine(h, static_cast<std::uint64_t>(static_cast<std::int64_t>(s.c[i])));
    }
    return h;
}

}  // namespace rwre
