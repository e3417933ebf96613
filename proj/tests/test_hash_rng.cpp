#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "exclique/hash.hpp"
#include "exclique/rng.hpp"

using namespace exclique;

TEST_CASE("siphash24 reference vectors") {
    // Reference key 0x0706...00 / 0x0f0e...08 over the prefix bytes 0,1,2,...
    // from the SipHash reference implementation's test vectors.
    const uint64_t k0 = 0x0706050403020100ULL;
    const uint64_t k1 = 0x0f0e0d0c0b0a0908ULL;
    std::vector<uint8_t> data;
    CHECK(siphash24(k0, k1, data) == 0x726fdb47dd0e0e31ULL);
    for (uint8_t i = 0; i < 8; ++i) data.push_back(i);
    CHECK(siphash24(k0, k1, data) == 0x93f5f5799a932462ULL);
    data.clear();
    for (uint8_t i = 0; i < 15; ++i) data.push_back(i);
    CHECK(siphash24(k0, k1, data) == 0xa129ca6149be45e5ULL);
}

TEST_CASE("siphash is keyed and deterministic") {
    Hash256 h = Hash256::from_seed(42);
    CHECK(siphash24(1, 2, h.bytes) == siphash24(1, 2, h.bytes));
    CHECK(siphash24(1, 2, h.bytes) != siphash24(1, 3, h.bytes));
    CHECK(siphash24(2, 2, h.bytes) != siphash24(1, 2, h.bytes));
}

TEST_CASE("Hash256 hex round trip and uniqueness") {
    Hash256 a = Hash256::from_seed(1);
    Hash256 b = Hash256::from_seed(2);
    CHECK(a != b);
    CHECK(Hash256::from_hex(a.hex()) == a);
    CHECK(a.hex().size() == 64);

    std::set<Hash256> seen;
    for (uint64_t i = 0; i < 10000; ++i) seen.insert(Hash256::from_seed(i));
    CHECK(seen.size() == 10000);
}

TEST_CASE("rng uniform stays in range with plausible mean") {
    Rng rng(7);
    double sum = 0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double x = rng.uniform(0.0, 100.0);
        REQUIRE(x >= 0.0);
        REQUIRE(x < 100.0);
        sum += x;
    }
    CHECK(std::abs(sum / n - 50.0) < 0.5);
}

TEST_CASE("rng streams are independent and reproducible") {
    Rng a = Rng::stream(1, 10);
    Rng b = Rng::stream(1, 10);
    Rng c = Rng::stream(1, 11);
    for (int i = 0; i < 16; ++i) {
        const uint64_t va = a.next_u64();
        CHECK(va == b.next_u64());
        CHECK(va != c.next_u64());
    }
}
