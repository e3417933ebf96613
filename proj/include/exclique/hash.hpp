#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>

namespace exclique {

// SipHash-2-4 with a 128-bit key (k0, k1). Used for short transaction IDs,
// counting-Bloom-filter index derivation and block/tx identifiers.
uint64_t siphash24(uint64_t k0, uint64_t k1, std::span<const uint8_t> data);

// splitmix64 step; also used to derive independent RNG stream seeds.
uint64_t splitmix64(uint64_t& state);

// 32-byte identifier for transactions and blocks.
struct Hash256 {
    std::array<uint8_t, 32> bytes{};

    auto operator<=>(const Hash256&) const = default;

    uint64_t prefix64() const {
        uint64_t v;
        std::memcpy(&v, bytes.data(), 8);
        return v;
    }

    std::string hex() const;
    static Hash256 from_hex(const std::string& s);

    // Expands a 64-bit seed into a full 32-byte id via splitmix64.
    static Hash256 from_seed(uint64_t seed);
};

struct Hash256Hasher {
    size_t operator()(const Hash256& h) const { return static_cast<size_t>(h.prefix64()); }
};

} // namespace exclique
