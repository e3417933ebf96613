#include "exclique/cbf.hpp"

#include "exclique/bytes.hpp"

namespace exclique {

namespace {
constexpr uint16_t kMagic = 0x4643; // "CF"
constexpr uint64_t kIndexKey1 = 0x634266316b657931ULL;
constexpr uint64_t kIndexKey2 = 0x634266326b657932ULL;
} // namespace

CountingBloomFilter::CountingBloomFilter(uint32_t num_counters, uint8_t num_hashes,
                                         uint8_t counter_bits, uint64_t salt)
    : num_counters_(num_counters), num_hashes_(num_hashes), counter_bits_(counter_bits), salt_(salt) {
    if (num_counters_ == 0) throw std::invalid_argument("cbf: zero counters");
    if (num_hashes_ == 0) throw std::invalid_argument("cbf: zero hash functions");
    if (counter_bits_ < 1 || counter_bits_ > 8) throw std::invalid_argument("cbf: counter bits must be 1..8");
    counters_.assign(payload_bytes(), 0);
}

void CountingBloomFilter::indexes(const TxId& id, uint32_t* out) const {
    const uint64_t h1 = siphash24(salt_, kIndexKey1, id.bytes);
    const uint64_t h2 = siphash24(salt_, kIndexKey2, id.bytes) | 1;
    uint64_t h = h1;
    for (uint8_t i = 0; i < num_hashes_; ++i) {
        out[i] = static_cast<uint32_t>(h % num_counters_);
        h += h2;
    }
}

uint32_t CountingBloomFilter::get_counter(uint32_t idx) const {
    const uint64_t bit = static_cast<uint64_t>(idx) * counter_bits_;
    const uint32_t byte = static_cast<uint32_t>(bit >> 3);
    const uint32_t shift = static_cast<uint32_t>(bit & 7);
    uint32_t raw = counters_[byte];
    if (shift + counter_bits_ > 8) raw |= static_cast<uint32_t>(counters_[byte + 1]) << 8;
    return (raw >> shift) & ((1u << counter_bits_) - 1);
}

void CountingBloomFilter::set_counter(uint32_t idx, uint32_t value) {
    const uint64_t bit = static_cast<uint64_t>(idx) * counter_bits_;
    const uint32_t byte = static_cast<uint32_t>(bit >> 3);
    const uint32_t shift = static_cast<uint32_t>(bit & 7);
    const uint32_t mask = (1u << counter_bits_) - 1;
    uint32_t raw = counters_[byte];
    if (shift + counter_bits_ > 8) raw |= static_cast<uint32_t>(counters_[byte + 1]) << 8;
    raw = (raw & ~(mask << shift)) | (value << shift);
    counters_[byte] = static_cast<uint8_t>(raw & 0xff);
    if (shift + counter_bits_ > 8) counters_[byte + 1] = static_cast<uint8_t>((raw >> 8) & 0xff);
}

void CountingBloomFilter::add(const TxId& id) {
    uint32_t idx[16];
    indexes(id, idx);
    const uint32_t maxval = (1u << counter_bits_) - 1;
    for (uint8_t i = 0; i < num_hashes_; ++i) {
        const uint32_t v = get_counter(idx[i]);
        if (v < maxval) set_counter(idx[i], v + 1);
    }
    ++population_;
}

CbfRemove CountingBloomFilter::remove(const TxId& id) {
    uint32_t idx[16];
    indexes(id, idx);
    for (uint8_t i = 0; i < num_hashes_; ++i)
        if (get_counter(idx[i]) == 0) return CbfRemove::Underflow;
    const uint32_t maxval = (1u << counter_bits_) - 1;
    for (uint8_t i = 0; i < num_hashes_; ++i) {
        const uint32_t v = get_counter(idx[i]);
        // Saturated counters stay; v==0 can only happen when two of the k
        // indexes alias the same counter within this call.
        if (v > 0 && v < maxval) set_counter(idx[i], v - 1);
    }
    if (population_ > 0) --population_;
    return CbfRemove::Ok;
}

bool CountingBloomFilter::contains(const TxId& id) const {
    uint32_t idx[16];
    indexes(id, idx);
    for (uint8_t i = 0; i < num_hashes_; ++i)
        if (get_counter(idx[i]) == 0) return false;
    return true;
}

void CountingBloomFilter::clear() {
    std::fill(counters_.begin(), counters_.end(), 0);
    population_ = 0;
}

std::vector<uint8_t> CountingBloomFilter::serialize() const {
    ByteWriter w;
    w.u16(kMagic);
    w.u8(num_hashes_);
    w.u8(counter_bits_);
    w.u32(num_counters_);
    w.u64(salt_);
    w.bytes(counters_);
    return w.take();
}

CountingBloomFilter CountingBloomFilter::deserialize(std::span<const uint8_t> data) {
    if (data.size() < kHeaderBytes) throw MalformedFilter("short header");
    ByteReader r(data);
    if (r.u16() != kMagic) throw MalformedFilter("bad magic");
    const uint8_t k = r.u8();
    const uint8_t c = r.u8();
    const uint32_t L = r.u32();
    const uint64_t salt = r.u64();
    if (k == 0 || L == 0 || c < 1 || c > 8) throw MalformedFilter("bad parameters");
    CountingBloomFilter f(L, k, c, salt);
    if (r.remaining() != f.payload_bytes()) throw MalformedFilter("payload size mismatch");
    r.bytes(f.counters_.data(), f.counters_.size());
    // Population is not on the wire; recover it from the counter sum. Exact
    // absent saturation, an estimate otherwise.
    uint64_t sum = 0;
    for (uint32_t i = 0; i < L; ++i) sum += f.get_counter(i);
    f.population_ = sum / k;
    return f;
}

} // namespace exclique
