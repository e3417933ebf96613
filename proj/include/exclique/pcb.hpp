#pragma once

#include <span>
#include <vector>

#include "exclique/block.hpp"
#include "exclique/cbf.hpp"

namespace exclique {

class TxPool;

inline constexpr int kShortIdBits = 48; // 6-byte short ids
inline constexpr uint32_t kShortIdWireBytes = 6;

// Keyed, salted short id. Tests use narrower widths to force collisions.
uint64_t short_id(const TxId& id, uint64_t salt, int bits = kShortIdBits);

// Per-block salt so collisions do not correlate across blocks.
uint64_t block_salt(Step step, NodeId signer);

// Per-receiver compact form of a block: transactions the receiver is believed
// to hold shrink to short ids, the rest travel in full. Entry order matches
// the source block.
struct CompactBlock {
    Step step = 0;
    BlockId parent_id;
    NodeId signer = 0;
    BlockKind kind = BlockKind::InTurn;
    TimeMs created_at = 0;
    std::vector<UncleRef> uncle_refs;
    BlockId block_id; // id of the source block; decoders cross-check it

    uint64_t salt = 0;
    int short_id_bits = kShortIdBits;
    uint32_t entry_count = 0;
    std::vector<uint8_t> short_bitmap;  // bit i set => entry i is a short id
    std::vector<uint64_t> short_ids;    // short entries in order
    std::vector<Transaction> full_txs;  // full entries in order

    bool is_short(uint32_t pos) const { return (short_bitmap[pos >> 3] >> (pos & 7)) & 1; }
    uint32_t short_count() const { return static_cast<uint32_t>(short_ids.size()); }

    // header + 6 per short id + length-prefixed payload per full transaction;
    // equals the full block's canonical size when nothing is shortened.
    uint64_t wire_size() const { return wire_size_; }
    uint64_t wire_size_ = 0;
};

// CBF-driven tailoring; a null filter sends everything in full.
CompactBlock pcb_encode(const Block& block, const CountingBloomFilter* receiver_cbf, uint64_t salt,
                        int short_id_bits = kShortIdBits);

// Baseline compact block: every transaction becomes a short id, no filter
// consulted, so any missing transaction costs the receiver an extra round.
CompactBlock bcb_encode(const Block& block, uint64_t salt, int short_id_bits = kShortIdBits);

struct ResolveOutcome {
    bool complete = false;
    std::vector<uint32_t> missing_positions; // entries needing a full re-fetch
    uint32_t ambiguous = 0;                  // short ids matching >1 pool transaction
    std::vector<const Transaction*> resolved; // per entry; null where missing/full
};

// Matches short entries against the receiver's pool. Ambiguous and unknown
// short ids are reported as missing rather than guessed.
ResolveOutcome resolve(const CompactBlock& cb, const TxPool& pool);

struct DecodeResult {
    bool complete = false;
    Block block; // valid only when complete
    std::vector<uint32_t> missing_positions;
    uint32_t ambiguous = 0;
};

// Full reconstruction from the local pool. `fetched_positions` / `fetched`
// supply transactions obtained through the extra communication round; they
// take precedence over pool resolution at those positions.
DecodeResult decode(const CompactBlock& cb, const TxPool& pool,
                    std::span<const uint32_t> fetched_positions = {},
                    std::span<const Transaction> fetched = {});

// Producer-side answer for a missing-transactions request.
std::vector<Transaction> collect_missing(const Block& block, std::span<const uint32_t> positions);

} // namespace exclique
