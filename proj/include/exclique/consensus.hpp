#pragma once

#include <unordered_map>
#include <unordered_set>

#include "exclique/netsim.hpp"
#include "exclique/txpool.hpp"

namespace exclique {

// One simulated consensus node: ledger view, TX-pool, per-signer beta
// estimates and the in-turn / no-turn / forbidden lifecycle. All state
// mutation happens inside kernel event handlers; the node never blocks and
// talks to peers only through scheduled messages.
class Node {
public:
    Node(SimKernel& kernel, NodeId id);

    // Event-handler entry points, invoked by the kernel.
    void on_deliver(const Message& msg);
    void on_verify_done(const BlockPtr& block, double recon_t);
    void on_plan_ready(const BlockId& head);
    void on_broadcast_due(const BlockId& head);
    void on_no_turn_fire(const BlockId& head);
    void on_pool_insert(const Transaction& tx);

    const Ledger& ledger() const { return ledger_; }
    TxPool& pool() { return pool_; }
    const TxPool& pool() const { return pool_; }
    const CountingBloomFilter* peer_cbf(NodeId peer) const;
    double beta_ms(NodeId signer) const { return beta_[signer]; }
    uint32_t beta_observations(NodeId signer) const { return beta_obs_[signer]; }

    // Per-signer EWMA over observed broadcast+verify times of in-turn blocks.
    void update_beta(NodeId signer, double observed_bv_ms);

private:
    void start_verification(const BlockPtr& block, double recon_t);
    void adopt(const BlockPtr& block);
    void complete_reconstruction(const BlockPtr& block);
    // Verification and pool reset share one lane; block assembly runs on the
    // sealer lane and never delays verification of incoming blocks.
    double charge_verify_lane(double cost_ms); // returns completion time

    SimKernel& k_;
    NodeId id_;
    const ProtocolParams& proto() const { return k_.config().proto; }

    Ledger ledger_;
    TxPool pool_;
    Rng delay_rng_;
    double busy_until_ = 0;
    double last_reset_ms_ = 0;

    std::vector<double> beta_;
    std::vector<uint32_t> beta_obs_;

    struct PendingProduce {
        bool active = false;
        Step step = 0;
        BlockId head;
        BlockKind kind = BlockKind::InTurn;
        std::vector<Transaction> txs;
        std::vector<UncleRef> uncles;
        double x_ms = 0;
        double a_ms = 0;
    };
    PendingProduce pending_;

    struct PendingFetch {
        std::shared_ptr<const CompactBlock> compact;
        BlockPtr origin;
        std::vector<uint32_t> positions;
    };
    std::unordered_map<BlockId, PendingFetch, Hash256Hasher> fetches_;

    struct OrphanBlock {
        BlockPtr block;
        double recon_t;
    };
    std::unordered_map<BlockId, std::vector<OrphanBlock>, Hash256Hasher> orphans_;

    std::vector<std::shared_ptr<const CountingBloomFilter>> peer_cbfs_;
    std::vector<Step> peer_cbf_step_;
};

} // namespace exclique
