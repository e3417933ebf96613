#pragma once

#include <deque>
#include <optional>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "exclique/cbf.hpp"
#include "exclique/types.hpp"

namespace exclique {

// Pending-transaction pool owned by one simulated node. Insertion order is
// preserved for deterministic block assembly; an optional counting Bloom
// filter mirrors the membership for the PCB protocol. A short memory of
// recently committed ids drops stale late arrivals so a transaction is never
// packaged twice.
class TxPool {
public:
    TxPool() = default;

    // Sizes the CBF mirror: L = counters_per_item * expected_items.
    void enable_cbf(uint64_t expected_items, uint32_t counters_per_item, uint8_t num_hashes,
                    uint8_t counter_bits, uint64_t salt);
    bool cbf_enabled() const { return cbf_.has_value(); }
    const CountingBloomFilter& cbf() const { return *cbf_; }
    uint64_t cbf_rebuilds() const { return cbf_rebuilds_; }

    // False when the id is already pending or was committed recently.
    bool insert(const Transaction& tx);

    // Pool reset after adopting a block: drop its transactions and remember
    // them briefly for dedup.
    void note_committed(const std::vector<Transaction>& txs, Step step);

    // Abandoned-fork transactions come back unless committed on the new chain.
    void reinject(const Transaction& tx);

    // Oldest-first selection for assembly.
    std::vector<Transaction> select(uint64_t max_count) const;

    bool contains(const TxId& id) const { return by_id_.count(id) != 0; }
    const Transaction* get(const TxId& id) const;
    size_t pending() const { return by_id_.size(); }

    void purge_committed_before(Step step);

    // Lookup table short_id -> pool transaction for one block salt. Short ids
    // shared by several pool transactions are ambiguous and resolve to nothing.
    struct ShortIdIndex {
        std::unordered_map<uint64_t, const Transaction*> unique;
        std::unordered_set<uint64_t> ambiguous;
    };
    ShortIdIndex build_short_index(uint64_t salt, int short_id_bits) const;

private:
    struct Entry {
        Transaction tx;
        uint64_t seq;
    };

    std::unordered_map<TxId, Entry, Hash256Hasher> by_id_;
    std::deque<std::pair<uint64_t, TxId>> fifo_;
    uint64_t next_seq_ = 0;

    std::unordered_set<uint64_t> committed_keys_;
    std::deque<std::pair<Step, std::vector<uint64_t>>> committed_by_step_;

    std::optional<CountingBloomFilter> cbf_;
    uint64_t cbf_rebuilds_ = 0;

    void cbf_add(const TxId& id);
    void cbf_remove(const TxId& id);
};

} // namespace exclique
