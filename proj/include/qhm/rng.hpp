#pragma once

#include <cstdint>

namespace qhm {

/// splitmix64; self-contained so that seeded runs are byte-identical across
/// platforms and standard library versions.
struct rng {
    std::uint64_t state;

    explicit rng(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : next() % n; }

    bool chance(std::uint64_t k, std::uint64_t m) { return below(m) < k; }
};

}  // namespace qhm
