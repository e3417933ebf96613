#pragma once

#include <cstdint>

#include "exclique/hash.hpp"

namespace exclique {

// xoshiro256++ 1.0, seeded via splitmix64. Self-contained so that draws are
// bit-identical across platforms (std:: distributions are not).
class Rng {
public:
    explicit Rng(uint64_t seed) {
        uint64_t st = seed;
        for (auto& w : s_) w = splitmix64(st);
    }

    // Derives an independent stream for (seed, tag), e.g. per-node delay RNGs.
    static Rng stream(uint64_t seed, uint64_t tag) { return Rng(seed ^ (tag * 0x9e3779b97f4a7c15ULL) ^ 0xd1b54a32d192ed03ULL); }

    uint64_t next_u64() {
        const uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform in [0, 1) with 53 bits of precision.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + uniform01() * (hi - lo); }

    bool bernoulli(double p) { return uniform01() < p; }

    // Uniform integer in [0, n).
    uint64_t below(uint64_t n) { return n == 0 ? 0 : next_u64() % n; }

private:
    static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    uint64_t s_[4];
};

} // namespace exclique
