#include "exclique/pcb.hpp"

#include <stdexcept>

#include "exclique/txpool.hpp"

namespace exclique {

namespace {
constexpr uint64_t kShortIdKey = 0x7063622d73686f72ULL;  // "pcb-shor"
constexpr uint64_t kSaltKey = 0x7063622d73616c74ULL;     // "pcb-salt"

uint32_t compact_header_size(const CompactBlock& cb) {
    return 8 + 32 + 4 + 1 + 8 + 2 + static_cast<uint32_t>(cb.uncle_refs.size()) * 12 + 4;
}

CompactBlock begin_compact(const Block& block, uint64_t salt, int bits) {
    CompactBlock cb;
    cb.step = block.step;
    cb.parent_id = block.parent_id;
    cb.signer = block.signer;
    cb.kind = block.kind;
    cb.created_at = block.created_at;
    cb.uncle_refs = block.uncle_refs;
    cb.block_id = block.id();
    cb.salt = salt;
    cb.short_id_bits = bits;
    cb.entry_count = block.tx_count();
    cb.short_bitmap.assign((cb.entry_count + 7) / 8, 0);
    return cb;
}
} // namespace

uint64_t short_id(const TxId& id, uint64_t salt, int bits) {
    const uint64_t h = siphash24(salt, kShortIdKey, id.bytes);
    return bits >= 64 ? h : h & ((uint64_t{1} << bits) - 1);
}

uint64_t block_salt(Step step, NodeId signer) {
    uint8_t buf[12];
    std::memcpy(buf, &step, 8);
    std::memcpy(buf + 8, &signer, 4);
    return siphash24(kSaltKey, kSaltKey, std::span<const uint8_t>(buf, sizeof buf));
}

CompactBlock pcb_encode(const Block& block, const CountingBloomFilter* receiver_cbf, uint64_t salt,
                        int short_id_bits) {
    if (block.pruned()) throw std::logic_error("pcb_encode: pruned block");
    CompactBlock cb = begin_compact(block, salt, short_id_bits);
    uint64_t size = compact_header_size(cb);
    for (uint32_t i = 0; i < cb.entry_count; ++i) {
        const Transaction& tx = block.txs[i];
        if (receiver_cbf && receiver_cbf->contains(tx.id)) {
            cb.short_bitmap[i >> 3] |= static_cast<uint8_t>(1u << (i & 7));
            cb.short_ids.push_back(short_id(tx.id, salt, short_id_bits));
            size += kShortIdWireBytes;
        } else {
            cb.full_txs.push_back(tx);
            size += tx.wire_size();
        }
    }
    cb.wire_size_ = size;
    return cb;
}

CompactBlock bcb_encode(const Block& block, uint64_t salt, int short_id_bits) {
    if (block.pruned()) throw std::logic_error("bcb_encode: pruned block");
    CompactBlock cb = begin_compact(block, salt, short_id_bits);
    uint64_t size = compact_header_size(cb);
    cb.short_ids.reserve(cb.entry_count);
    for (uint32_t i = 0; i < cb.entry_count; ++i) {
        cb.short_bitmap[i >> 3] |= static_cast<uint8_t>(1u << (i & 7));
        cb.short_ids.push_back(short_id(block.txs[i].id, salt, short_id_bits));
        size += kShortIdWireBytes;
    }
    cb.wire_size_ = size;
    return cb;
}

ResolveOutcome resolve(const CompactBlock& cb, const TxPool& pool) {
    ResolveOutcome out;
    out.resolved.assign(cb.entry_count, nullptr);
    const auto index = pool.build_short_index(cb.salt, cb.short_id_bits);
    uint32_t short_pos = 0;
    for (uint32_t i = 0; i < cb.entry_count; ++i) {
        if (!cb.is_short(i)) continue;
        const uint64_t sid = cb.short_ids[short_pos++];
        if (index.ambiguous.count(sid)) {
            ++out.ambiguous;
            out.missing_positions.push_back(i);
            continue;
        }
        auto it = index.unique.find(sid);
        if (it == index.unique.end()) {
            out.missing_positions.push_back(i);
            continue;
        }
        out.resolved[i] = it->second;
    }
    out.complete = out.missing_positions.empty();
    return out;
}

DecodeResult decode(const CompactBlock& cb, const TxPool& pool,
                    std::span<const uint32_t> fetched_positions,
                    std::span<const Transaction> fetched) {
    DecodeResult res;
    ResolveOutcome r = resolve(cb, pool);
    res.ambiguous = r.ambiguous;

    std::vector<const Transaction*> overlay(cb.entry_count, nullptr);
    for (size_t i = 0; i < fetched_positions.size() && i < fetched.size(); ++i)
        overlay[fetched_positions[i]] = &fetched[i];
    for (uint32_t pos : r.missing_positions)
        if (!overlay[pos]) res.missing_positions.push_back(pos);
    if (!res.missing_positions.empty()) return res;

    Block b;
    b.step = cb.step;
    b.parent_id = cb.parent_id;
    b.signer = cb.signer;
    b.kind = cb.kind;
    b.created_at = cb.created_at;
    b.uncle_refs = cb.uncle_refs;
    b.txs.reserve(cb.entry_count);
    uint32_t full_pos = 0;
    for (uint32_t i = 0; i < cb.entry_count; ++i) {
        if (!cb.is_short(i)) b.txs.push_back(cb.full_txs[full_pos++]);
        else if (overlay[i]) b.txs.push_back(*overlay[i]);
        else b.txs.push_back(*r.resolved[i]);
    }
    b.seal();
    if (b.id() != cb.block_id) {
        // A short id matched the wrong pool transaction (cross-id collision).
        // Fall back to re-fetching every short entry in full.
        for (uint32_t i = 0; i < cb.entry_count; ++i)
            if (cb.is_short(i)) res.missing_positions.push_back(i);
        return res;
    }
    res.complete = true;
    res.block = std::move(b);
    return res;
}

std::vector<Transaction> collect_missing(const Block& block, std::span<const uint32_t> positions) {
    if (block.pruned()) throw std::logic_error("collect_missing: pruned block");
    std::vector<Transaction> out;
    out.reserve(positions.size());
    for (uint32_t p : positions) out.push_back(block.txs.at(p));
    return out;
}

} // namespace exclique
