#include "exclique/txpool.hpp"

#include "exclique/pcb.hpp"

namespace exclique {

void TxPool::enable_cbf(uint64_t expected_items, uint32_t counters_per_item, uint8_t num_hashes,
                        uint8_t counter_bits, uint64_t salt) {
    const uint64_t L = std::max<uint64_t>(64, expected_items * counters_per_item);
    cbf_.emplace(static_cast<uint32_t>(L), num_hashes, counter_bits, salt);
    for (const auto& [id, e] : by_id_) cbf_->add(id);
}

void TxPool::cbf_add(const TxId& id) {
    if (cbf_) cbf_->add(id);
}

void TxPool::cbf_remove(const TxId& id) {
    if (!cbf_) return;
    if (cbf_->remove(id) == CbfRemove::Underflow) {
        // Filter desynced from the pool; rebuild from scratch.
        ++cbf_rebuilds_;
        cbf_->clear();
        for (const auto& [tid, e] : by_id_) cbf_->add(tid);
    }
}

bool TxPool::insert(const Transaction& tx) {
    if (committed_keys_.count(tx.id.prefix64())) return false;
    auto [it, fresh] = by_id_.try_emplace(tx.id, Entry{tx, next_seq_});
    if (!fresh) return false;
    fifo_.emplace_back(next_seq_++, tx.id);
    cbf_add(tx.id);
    return true;
}

void TxPool::note_committed(const std::vector<Transaction>& txs, Step step) {
    std::vector<uint64_t> keys;
    keys.reserve(txs.size());
    for (const auto& tx : txs) {
        keys.push_back(tx.id.prefix64());
        committed_keys_.insert(tx.id.prefix64());
        auto it = by_id_.find(tx.id);
        if (it != by_id_.end()) {
            by_id_.erase(it);
            cbf_remove(tx.id);
        }
    }
    committed_by_step_.emplace_back(step, std::move(keys));
}

void TxPool::reinject(const Transaction& tx) {
    if (by_id_.count(tx.id)) return;
    committed_keys_.erase(tx.id.prefix64());
    by_id_.try_emplace(tx.id, Entry{tx, next_seq_});
    fifo_.emplace_back(next_seq_++, tx.id);
    cbf_add(tx.id);
}

std::vector<Transaction> TxPool::select(uint64_t max_count) const {
    std::vector<Transaction> out;
    out.reserve(std::min<uint64_t>(max_count, by_id_.size()));
    for (const auto& [seq, id] : fifo_) {
        if (out.size() >= max_count) break;
        auto it = by_id_.find(id);
        if (it == by_id_.end() || it->second.seq != seq) continue; // superseded entry
        out.push_back(it->second.tx);
    }
    return out;
}

const Transaction* TxPool::get(const TxId& id) const {
    auto it = by_id_.find(id);
    return it == by_id_.end() ? nullptr : &it->second.tx;
}

void TxPool::purge_committed_before(Step step) {
    while (!committed_by_step_.empty() && committed_by_step_.front().first < step) {
        for (uint64_t k : committed_by_step_.front().second) committed_keys_.erase(k);
        committed_by_step_.pop_front();
    }
    // Compact the lazy-deletion queue when it is mostly tombstones.
    if (fifo_.size() > 64 && fifo_.size() > by_id_.size() * 3) {
        std::deque<std::pair<uint64_t, TxId>> live;
        for (const auto& [seq, id] : fifo_) {
            auto it = by_id_.find(id);
            if (it != by_id_.end() && it->second.seq == seq) live.emplace_back(seq, id);
        }
        fifo_ = std::move(live);
    }
}

TxPool::ShortIdIndex TxPool::build_short_index(uint64_t salt, int short_id_bits) const {
    ShortIdIndex idx;
    idx.unique.reserve(by_id_.size());
    for (const auto& [id, e] : by_id_) {
        const uint64_t sid = short_id(id, salt, short_id_bits);
        if (idx.ambiguous.count(sid)) continue;
        auto [it, fresh] = idx.unique.try_emplace(sid, &e.tx);
        if (!fresh) {
            idx.unique.erase(it);
            idx.ambiguous.insert(sid);
        }
    }
    return idx;
}

} // namespace exclique
