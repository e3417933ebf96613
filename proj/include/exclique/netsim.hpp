#pragma once

#include <memory>
#include <unordered_set>
#include <queue>
#include <unordered_map>
#include <variant>
#include <vector>

#include "exclique/cbf.hpp"
#include "exclique/ledger.hpp"
#include "exclique/pcb.hpp"
#include "exclique/rng.hpp"
#include "exclique/sim_config.hpp"
#include "exclique/trace.hpp"

namespace exclique {

class Node;

// Protocol messages. Compact forms carry a handle to the producer's sealed
// block alongside the compact structure: receivers run the real resolution
// against their pools and, once every entry checks out, adopt the shared
// object instead of materializing a copy per receiver.
struct BlockMsg {
    BlockPtr block;
};
struct CompactMsg {
    std::shared_ptr<const CompactBlock> compact;
    BlockPtr origin;
};
struct CbfMsg {
    NodeId owner;
    Step step;
    std::shared_ptr<const CountingBloomFilter> filter;
};
struct MissingTxRequest {
    BlockId block_id;
    Step step;
    std::vector<uint32_t> positions;
};
struct MissingTxResponse {
    BlockId block_id;
    std::vector<uint32_t> positions;
    std::vector<Transaction> txs;
};

using MessagePayload = std::variant<BlockMsg, CompactMsg, CbfMsg, MissingTxRequest, MissingTxResponse>;

struct Message {
    NodeId from = 0;
    NodeId to = 0;
    uint64_t bytes = 0;
    MessagePayload payload;
};

struct LinkParams {
    double base_delay_ms = 0;
    double bandwidth_bps = 32e6;
    double loss_rate = 0;

    double transfer_ms(uint64_t bytes) const {
        return base_delay_ms + static_cast<double>(bytes) * 8.0 * 1000.0 / bandwidth_bps;
    }
    double rto_ms(uint64_t bytes) const { return 2.0 * base_delay_ms + transfer_ms(bytes); }
};

// Deterministic discrete-event kernel: single clock, (time, seq)-ordered
// queue, full-mesh links with per-link latency/bandwidth/loss, and the
// per-block broadcast bookkeeping all measurements hang off.
class SimKernel {
public:
    explicit SimKernel(const SimConfig& cfg);
    ~SimKernel();

    // -- event loop ---------------------------------------------------------
    struct EvDeliver { Message msg; };
    struct EvVerifyDone { NodeId node; BlockPtr block; double recon_t; };
    struct EvPlanReady { NodeId node; BlockId head; };
    struct EvBroadcastDue { NodeId node; BlockId head; };
    struct EvNoTurnFire { NodeId node; BlockId head; };
    struct EvInject { uint64_t batch; };
    struct EvLateInsert { uint64_t batch; NodeId node; };
    struct EvUndeliverable { NodeId from, to; };
    using EventPayload = std::variant<EvDeliver, EvVerifyDone, EvPlanReady, EvBroadcastDue,
                                      EvNoTurnFire, EvInject, EvLateInsert, EvUndeliverable>;

    void schedule(double at, EventPayload payload);
    TimeMs now() const { return now_; }

    // Runs until the queue drains or the clock passes t_end.
    void run_until(double t_end);
    // Runs until the observer chain reaches `steps` committed steps (or the
    // safety caps trip).
    void run_until_committed(uint64_t steps);

    // -- network ------------------------------------------------------------
    // Lossy send: each attempt drops with the link's loss rate; retries are
    // spaced by RTO until the retry budget is exhausted.
    void send(NodeId from, NodeId to, uint64_t bytes, MessagePayload payload);
    void broadcast_block(NodeId from, const std::shared_ptr<Block>& block, double x_delay_ms,
                         double r_ms, double a_ms);
    const LinkParams& link(NodeId from, NodeId to) const { return links_[from * cfg_.proto.n + to]; }

    // Called by receivers when a block is fully held (direct delivery or
    // compact reconstruction, extra rounds included).
    void note_reconstructed(const BlockId& id, NodeId node);
    void note_extra_round(const BlockId& id, NodeId node, uint32_t missing, Step step);

    // Broadcast time of a block: first send until the last node holds it.
    // Negative when some node never completed.
    double measure_broadcast_time(const BlockId& id) const;

    // -- state --------------------------------------------------------------
    const SimConfig& config() const { return cfg_; }
    Node& node(NodeId id) { return *nodes_[id]; }
    const Ledger& observer() const { return *observer_; }
    BlockPtr genesis() const { return genesis_; }

    bool in_turn_fault(Step h);

    std::vector<TraceRec>& trace() { return trace_; }
    void trace_event(TraceRec rec);

    Rng& loss_rng() { return loss_rng_; }

    struct Stats {
        uint64_t blocks_produced = 0;
        uint64_t forks = 0;
        uint64_t deadlock_ties = 0;
        uint64_t reorgs = 0;
        uint64_t extra_rounds = 0;
        uint64_t rejects = 0;
        uint64_t undeliverable = 0;
        uint64_t faults_injected = 0;
        uint64_t in_turn_blocked = 0;
        double beta_err_sum = 0;   // sum of |beta - observed|/observed
        uint64_t beta_err_count = 0;
    };
    Stats& stats() { return stats_; }
    const Stats& stats() const { return stats_; }

private:
    struct Event {
        double at;
        uint64_t seq;
        EventPayload payload;
    };
    struct EventOrder {
        bool operator()(const Event& a, const Event& b) const {
            if (a.at != b.at) return a.at > b.at;
            return a.seq > b.seq;
        }
    };

    struct BroadcastStat {
        double start = 0;
        double last_done = 0;
        uint32_t holders = 1; // producer holds it from the start
        uint32_t rounds = 0;
        Step step = 0;
        bool done_traced = false;
    };

    void dispatch(const Event& ev);
    void handle_inject(uint64_t batch);
    void handle_late_insert(uint64_t batch, NodeId node);
    Transaction make_tx(uint64_t global_index) const;
    bool tx_missing_at(const TxId& id, NodeId node) const;
    void observer_add(const BlockPtr& block);
    void prune_old_blocks();

    SimConfig cfg_;
    double now_ = 0;
    uint64_t next_seq_ = 0;
    std::priority_queue<Event, std::vector<Event>, EventOrder> queue_;

    std::vector<LinkParams> links_;
    std::vector<std::unique_ptr<Node>> nodes_;

    BlockPtr genesis_;
    std::unique_ptr<Ledger> observer_;
    std::vector<std::shared_ptr<Block>> produced_; // prune registry (insertion order)
    size_t prune_cursor_ = 0;

    std::unordered_map<BlockId, BroadcastStat, Hash256Hasher> bcast_;

    Rng loss_rng_;
    uint64_t workload_salt_ = 0;
    uint64_t txs_created_ = 0;
    std::unordered_map<uint64_t, std::pair<uint64_t, uint64_t>> inject_ranges_;
    std::unordered_map<uint64_t, uint32_t> late_done_;
    std::unordered_map<Step, uint32_t> produced_per_step_;
    std::unordered_set<Step> faulted_traced_;

    std::vector<TraceRec> trace_;
    Stats stats_;
};

} // namespace exclique
