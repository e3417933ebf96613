#include "exclique/hash.hpp"

#include <stdexcept>

namespace exclique {

namespace {

inline uint64_t rotl(uint64_t x, int b) { return (x << b) | (x >> (64 - b)); }

inline uint64_t read_le64(const uint8_t* p) {
    uint64_t v;
    std::memcpy(&v, p, 8);
    return v; // little-endian hosts only; fine for this artifact
}

#define SIPROUND            \
    do {                    \
        v0 += v1;           \
        v1 = rotl(v1, 13);  \
        v1 ^= v0;           \
        v0 = rotl(v0, 32);  \
        v2 += v3;           \
        v3 = rotl(v3, 16);  \
        v3 ^= v2;           \
        v0 += v3;           \
        v3 = rotl(v3, 21);  \
        v3 ^= v0;           \
        v2 += v1;           \
        v1 = rotl(v1, 17);  \
        v1 ^= v2;           \
        v2 = rotl(v2, 32);  \
    } while (0)

} // namespace

uint64_t siphash24(uint64_t k0, uint64_t k1, std::span<const uint8_t> data) {
    uint64_t v0 = 0x736f6d6570736575ULL ^ k0;
    uint64_t v1 = 0x646f72616e646f6dULL ^ k1;
    uint64_t v2 = 0x6c7967656e657261ULL ^ k0;
    uint64_t v3 = 0x7465646279746573ULL ^ k1;

    const size_t n = data.size();
    const uint8_t* p = data.data();
    const size_t blocks = n / 8;
    for (size_t i = 0; i < blocks; ++i) {
        uint64_t m = read_le64(p + 8 * i);
        v3 ^= m;
        SIPROUND;
        SIPROUND;
        v0 ^= m;
    }

    uint64_t last = static_cast<uint64_t>(n & 0xff) << 56;
    const uint8_t* tail = p + 8 * blocks;
    switch (n & 7) {
        case 7: last |= static_cast<uint64_t>(tail[6]) << 48; [[fallthrough]];
        case 6: last |= static_cast<uint64_t>(tail[5]) << 40; [[fallthrough]];
        case 5: last |= static_cast<uint64_t>(tail[4]) << 32; [[fallthrough]];
        case 4: last |= static_cast<uint64_t>(tail[3]) << 24; [[fallthrough]];
        case 3: last |= static_cast<uint64_t>(tail[2]) << 16; [[fallthrough]];
        case 2: last |= static_cast<uint64_t>(tail[1]) << 8; [[fallthrough]];
        case 1: last |= static_cast<uint64_t>(tail[0]); break;
        case 0: break;
    }
    v3 ^= last;
    SIPROUND;
    SIPROUND;
    v0 ^= last;

    v2 ^= 0xff;
    SIPROUND;
    SIPROUND;
    SIPROUND;
    SIPROUND;
    return v0 ^ v1 ^ v2 ^ v3;
}

uint64_t splitmix64(uint64_t& state) {
    uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::string Hash256::hex() const {
    static const char* digits = "0123456789abcdef";
    std::string out;
    out.reserve(64);
    for (uint8_t b : bytes) {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 0xf]);
    }
    return out;
}

Hash256 Hash256::from_hex(const std::string& s) {
    if (s.size() != 64) throw std::invalid_argument("Hash256::from_hex: need 64 hex chars");
    auto nib = [](char c) -> uint8_t {
        if (c >= '0' && c <= '9') return static_cast<uint8_t>(c - '0');
        if (c >= 'a' && c <= 'f') return static_cast<uint8_t>(c - 'a' + 10);
        if (c >= 'A' && c <= 'F') return static_cast<uint8_t>(c - 'A' + 10);
        throw std::invalid_argument("Hash256::from_hex: bad digit");
    };
    Hash256 h;
    for (size_t i = 0; i < 32; ++i)
        h.bytes[i] = static_cast<uint8_t>((nib(s[2 * i]) << 4) | nib(s[2 * i + 1]));
    return h;
}

Hash256 Hash256::from_seed(uint64_t seed) {
    Hash256 h;
    uint64_t st = seed;
    for (int i = 0; i < 4; ++i) {
        uint64_t w = splitmix64(st);
        std::memcpy(h.bytes.data() + 8 * i, &w, 8);
    }
    return h;
}

} // namespace exclique
