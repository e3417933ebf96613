#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "exclique/types.hpp"

namespace exclique {

struct MalformedFilter : std::runtime_error {
    explicit MalformedFilter(const std::string& why) : std::runtime_error("malformed filter: " + why) {}
};

enum class CbfRemove : uint8_t { Ok, Underflow };

// Counting Bloom filter over transaction ids. L packed c-bit saturating
// counters, k counter indexes per element derived by double hashing of
// (salt, id). Saturated counters are never decremented, so a remove can
// create a stale positive but never a false negative.
class CountingBloomFilter {
public:
    CountingBloomFilter() = default;
    CountingBloomFilter(uint32_t num_counters, uint8_t num_hashes, uint8_t counter_bits, uint64_t salt);

    void add(const TxId& id);

    // Checks all k addressed counters before mutating; on any zero counter the
    // filter is left untouched and Underflow is returned (pool/filter desync,
    // the owner rebuilds from the pool).
    CbfRemove remove(const TxId& id);

    bool contains(const TxId& id) const;

    void clear();

    std::vector<uint8_t> serialize() const;
    static CountingBloomFilter deserialize(std::span<const uint8_t> data);

    // header(16) + ceil(L*c/8)
    uint32_t wire_size() const { return kHeaderBytes + payload_bytes(); }

    uint32_t num_counters() const { return num_counters_; }
    uint8_t num_hashes() const { return num_hashes_; }
    uint8_t counter_bits() const { return counter_bits_; }
    uint64_t salt() const { return salt_; }
    uint64_t population() const { return population_; }
    uint32_t counter_at(uint32_t idx) const { return get_counter(idx); }

    bool operator==(const CountingBloomFilter& o) const {
        return num_counters_ == o.num_counters_ && num_hashes_ == o.num_hashes_ &&
               counter_bits_ == o.counter_bits_ && salt_ == o.salt_ && counters_ == o.counters_;
    }

    static constexpr uint32_t kHeaderBytes = 16;

private:
    uint32_t payload_bytes() const {
        return static_cast<uint32_t>((static_cast<uint64_t>(num_counters_) * counter_bits_ + 7) / 8);
    }
    void indexes(const TxId& id, uint32_t* out) const;
    uint32_t get_counter(uint32_t idx) const;
    void set_counter(uint32_t idx, uint32_t value);

    uint32_t num_counters_ = 0;
    uint8_t num_hashes_ = 0;
    uint8_t counter_bits_ = 4;
    uint64_t salt_ = 0;
    uint64_t population_ = 0;
    std::vector<uint8_t> counters_;
};

} // namespace exclique
