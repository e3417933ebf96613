#include "exclique/block.hpp"

#include <nlohmann/json.hpp>

#include "exclique/bytes.hpp"

namespace exclique {

namespace {
constexpr uint64_t kBlockIdKey = 0x626c6f636b2d6964ULL; // "block-id"
} // namespace

const char* to_string(BlockKind k) {
    switch (k) {
        case BlockKind::Genesis: return "Genesis";
        case BlockKind::InTurn: return "InTurn";
        case BlockKind::NoTurn: return "NoTurn";
    }
    return "?";
}

std::vector<uint8_t> serialize_tx(const Transaction& tx) {
    ByteWriter w;
    w.bytes(tx.id.bytes);
    w.u64(tx.nonce);
    w.u64(tx.fee);
    w.u32(tx.payload_size);
    if (tx.payload_size < kTxFixedFields)
        throw std::invalid_argument("transaction payload_size below fixed fields");
    w.zeros(tx.payload_size - kTxFixedFields);
    return w.take();
}

Transaction deserialize_tx(std::span<const uint8_t> data) {
    ByteReader r(data);
    Transaction tx;
    r.bytes(tx.id.bytes.data(), 32);
    tx.nonce = r.u64();
    tx.fee = r.u64();
    tx.payload_size = r.u32();
    if (tx.payload_size < kTxFixedFields || tx.payload_size - kTxFixedFields != r.remaining())
        throw std::invalid_argument("transaction payload size mismatch");
    return tx;
}

uint32_t Block::header_wire_size() const {
    // step(8) parent(32) signer(4) kind(1) created_at(8) uncle_count(2)
    // + 12 per uncle + tx_count(4)
    return 8 + 32 + 4 + 1 + 8 + 2 + static_cast<uint32_t>(uncle_refs.size()) * 12 + 4;
}

std::vector<uint8_t> Block::serialize() const {
    if (pruned_) throw std::logic_error("serialize: block transactions were pruned");
    ByteWriter w;
    w.u64(step);
    w.bytes(parent_id.bytes);
    w.u32(signer);
    w.u8(static_cast<uint8_t>(kind));
    w.f64(created_at);
    w.u16(static_cast<uint16_t>(uncle_refs.size()));
    for (const auto& u : uncle_refs) {
        w.u64(u.step);
        w.u32(u.signer);
    }
    w.u32(static_cast<uint32_t>(txs.size()));
    for (const auto& tx : txs) {
        auto tb = serialize_tx(tx);
        w.u32(static_cast<uint32_t>(tb.size()));
        w.bytes(tb);
    }
    return w.take();
}

Block Block::deserialize(std::span<const uint8_t> data) {
    ByteReader r(data);
    Block b;
    b.step = r.u64();
    r.bytes(b.parent_id.bytes.data(), 32);
    b.signer = r.u32();
    b.kind = static_cast<BlockKind>(r.u8());
    b.created_at = r.f64();
    const uint16_t uncles = r.u16();
    b.uncle_refs.resize(uncles);
    for (auto& u : b.uncle_refs) {
        u.step = r.u64();
        u.signer = r.u32();
    }
    const uint32_t n = r.u32();
    b.txs.reserve(n);
    for (uint32_t i = 0; i < n; ++i) {
        const uint32_t len = r.u32();
        std::vector<uint8_t> tb(len);
        r.bytes(tb.data(), len);
        b.txs.push_back(deserialize_tx(tb));
    }
    if (!r.done()) throw std::invalid_argument("block: trailing bytes");
    b.seal();
    return b;
}

void Block::seal() {
    tx_count_ = static_cast<uint32_t>(txs.size());
    fee_total_ = 0;
    wire_size_ = header_wire_size();
    for (const auto& tx : txs) {
        fee_total_ += tx.fee;
        wire_size_ += tx.wire_size();
    }
    const auto bytes = serialize();
    uint64_t st = kBlockIdKey;
    for (int lane = 0; lane < 4; ++lane) {
        const uint64_t w = siphash24(kBlockIdKey, splitmix64(st), bytes);
        std::memcpy(id_.bytes.data() + 8 * lane, &w, 8);
        st ^= w;
    }
}

void Block::prune_txs() {
    txs.clear();
    txs.shrink_to_fit();
    pruned_ = true;
}

Block Block::genesis(NodeId signer_hint) {
    Block g;
    g.kind = BlockKind::Genesis;
    g.step = 0;
    g.signer = signer_hint;
    g.created_at = 0;
    g.seal();
    return g;
}

std::string Block::debug_json() const {
    nlohmann::json j;
    j["id"] = id_.hex();
    j["step"] = step;
    j["parent"] = parent_id.hex();
    j["signer"] = signer;
    j["kind"] = to_string(kind);
    j["weight"] = weight();
    j["created_at_ms"] = created_at;
    j["tx_count"] = tx_count_;
    j["fee_total"] = fee_total_;
    j["wire_size"] = wire_size_;
    auto uncles = nlohmann::json::array();
    for (const auto& u : uncle_refs) uncles.push_back({{"step", u.step}, {"signer", u.signer}});
    j["uncles"] = uncles;
    if (!pruned_) {
        auto txj = nlohmann::json::array();
        for (const auto& tx : txs)
            txj.push_back({{"id", tx.id.hex()}, {"bytes", tx.payload_size}, {"fee", tx.fee}});
        j["txs"] = txj;
    }
    return j.dump();
}

} // namespace exclique
