#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "exclique/types.hpp"

namespace exclique {

enum class BlockKind : uint8_t { Genesis = 0, InTurn = 1, NoTurn = 2 };

const char* to_string(BlockKind k);

// weight = 2 iff InTurn, 1 iff NoTurn; genesis anchors the chain at 0.
inline uint32_t block_weight(BlockKind k) {
    switch (k) {
        case BlockKind::InTurn: return 2;
        case BlockKind::NoTurn: return 1;
        case BlockKind::Genesis: return 0;
    }
    return 0;
}

// Reference to a valid but uncommitted block observed by a signer; feeds the
// reward ledger's activity detection.
struct UncleRef {
    Step step = 0;
    NodeId signer = 0;
    auto operator<=>(const UncleRef&) const = default;
};

class Block {
public:
    Step step = 0;
    BlockId parent_id;
    NodeId signer = 0;
    BlockKind kind = BlockKind::Genesis;
    TimeMs created_at = 0;
    std::vector<UncleRef> uncle_refs;
    std::vector<Transaction> txs;

    // Computed over the canonical serialization; call after the block is final.
    void seal();

    const BlockId& id() const { return id_; }
    uint32_t weight() const { return block_weight(kind); }
    uint32_t tx_count() const { return tx_count_; }
    uint64_t fee_total() const { return fee_total_; }

    // Canonical byte size: header (incl. uncle list and tx count) plus a
    // length-prefixed entry per transaction.
    uint64_t wire_size() const { return wire_size_; }
    uint32_t header_wire_size() const;

    std::vector<uint8_t> serialize() const;
    static Block deserialize(std::span<const uint8_t> data);

    std::string debug_json() const;

    // Frees the transaction payloads of deeply buried blocks; counts, fees and
    // byte sizes stay available for analytics and rewards.
    void prune_txs();
    bool pruned() const { return pruned_; }

    static Block genesis(NodeId signer_hint);

private:
    BlockId id_;
    uint32_t tx_count_ = 0;
    uint64_t fee_total_ = 0;
    uint64_t wire_size_ = 0;
    bool pruned_ = false;
};

using BlockPtr = std::shared_ptr<const Block>;

std::vector<uint8_t> serialize_tx(const Transaction& tx);
Transaction deserialize_tx(std::span<const uint8_t> data);

} // namespace exclique
