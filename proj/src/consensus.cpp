#include "exclique/consensus.hpp"

#include <algorithm>

#include "exclique/schedule.hpp"

namespace exclique {

Node::Node(SimKernel& kernel, NodeId id)
    : k_(kernel),
      id_(id),
      ledger_(kernel.genesis()),
      delay_rng_(Rng::stream(kernel.config().seed, 0x64656c6179ULL + id)) {
    const auto& cfg = k_.config();
    beta_.assign(cfg.proto.n, 0.0);
    beta_obs_.assign(cfg.proto.n, 0);
    peer_cbfs_.resize(cfg.proto.n);
    peer_cbf_step_.assign(cfg.proto.n, 0);
    if (cfg.proto.pcb_mode == PcbMode::Pcb) {
        const uint64_t expected =
            static_cast<uint64_t>(cfg.cbf.expected_pool_factor * static_cast<double>(cfg.proto.m));
        pool_.enable_cbf(expected, cfg.cbf.counters_per_item, cfg.cbf.hashes,
                         cfg.cbf.counter_bits, cfg.seed ^ (0xcbf0ULL + id));
    }
}

const CountingBloomFilter* Node::peer_cbf(NodeId peer) const {
    return peer_cbfs_[peer] ? peer_cbfs_[peer].get() : nullptr;
}

double Node::charge_verify_lane(double cost_ms) {
    const double start = std::max(k_.now(), busy_until_);
    busy_until_ = start + cost_ms;
    return busy_until_;
}

void Node::on_pool_insert(const Transaction& tx) {
    pool_.insert(tx);
}

void Node::update_beta(NodeId signer, double observed_bv_ms) {
    const double alpha = proto().ewma_alpha;
    // Tracking error is a steady-state metric; skip the cold-start ramp of
    // the zero-initialized estimator.
    if (proto().delay_mode == DelayMode::Accurate && beta_obs_[signer] >= 15 && observed_bv_ms > 0) {
        auto& st = k_.stats();
        st.beta_err_sum += std::abs(beta_[signer] - observed_bv_ms) / observed_bv_ms;
        ++st.beta_err_count;
    }
    beta_[signer] = (1.0 - alpha) * beta_[signer] + alpha * observed_bv_ms;
    ++beta_obs_[signer];
}

void Node::on_deliver(const Message& msg) {
    if (std::holds_alternative<BlockMsg>(msg.payload)) {
        const auto& bm = std::get<BlockMsg>(msg.payload);
        if (ledger_.contains(bm.block->id())) return;
        k_.note_reconstructed(bm.block->id(), id_);
        complete_reconstruction(bm.block);
        return;
    }
    if (std::holds_alternative<CompactMsg>(msg.payload)) {
        const auto& cm = std::get<CompactMsg>(msg.payload);
        if (ledger_.contains(cm.origin->id())) return;
        ResolveOutcome r = resolve(*cm.compact, pool_);
        // Cross-check resolved ids against the source block: a short id that
        // matched the wrong pool transaction is re-fetched like a missing one.
        if (!cm.origin->pruned()) {
            for (uint32_t i = 0; i < cm.compact->entry_count; ++i) {
                if (!cm.compact->is_short(i)) continue;
                if (r.resolved[i] && !(r.resolved[i]->id == cm.origin->txs[i].id)) {
                    r.resolved[i] = nullptr;
                    r.missing_positions.push_back(i);
                }
            }
            std::sort(r.missing_positions.begin(), r.missing_positions.end());
        }
        if (r.missing_positions.empty()) {
            k_.note_reconstructed(cm.origin->id(), id_);
            complete_reconstruction(cm.origin);
            return;
        }
        k_.note_extra_round(cm.origin->id(), id_, static_cast<uint32_t>(r.missing_positions.size()),
                            cm.compact->step);
        const uint64_t req_bytes = 16 + 4 * r.missing_positions.size();
        MissingTxRequest req{cm.origin->id(), cm.compact->step, r.missing_positions};
        fetches_[cm.origin->id()] = PendingFetch{cm.compact, cm.origin, std::move(r.missing_positions)};
        k_.send(id_, msg.from, req_bytes, std::move(req));
        return;
    }
    if (std::holds_alternative<CbfMsg>(msg.payload)) {
        const auto& cb = std::get<CbfMsg>(msg.payload);
        if (cb.step >= peer_cbf_step_[cb.owner]) {
            peer_cbfs_[cb.owner] = cb.filter;
            peer_cbf_step_[cb.owner] = cb.step;
        }
        return;
    }
    if (std::holds_alternative<MissingTxRequest>(msg.payload)) {
        const auto& req = std::get<MissingTxRequest>(msg.payload);
        BlockPtr block = ledger_.get(req.block_id);
        if (!block || block->pruned()) return; // request outlived the block
        auto txs = collect_missing(*block, req.positions);
        uint64_t bytes = 16;
        for (const auto& tx : txs) bytes += tx.wire_size();
        k_.send(id_, msg.from, bytes, MissingTxResponse{req.block_id, req.positions, std::move(txs)});
        return;
    }
    if (std::holds_alternative<MissingTxResponse>(msg.payload)) {
        const auto& resp = std::get<MissingTxResponse>(msg.payload);
        auto it = fetches_.find(resp.block_id);
        if (it == fetches_.end()) return;
        BlockPtr origin = it->second.origin;
        fetches_.erase(it);
        if (ledger_.contains(origin->id())) return;
        k_.note_reconstructed(origin->id(), id_);
        complete_reconstruction(origin);
        return;
    }
}

void Node::complete_reconstruction(const BlockPtr& block) {
    if (!ledger_.contains(block->parent_id)) {
        orphans_[block->parent_id].push_back(OrphanBlock{block, k_.now()});
        TraceRec rec;
        rec.kind = TraceRec::Kind::Orphan;
        rec.t = k_.now();
        rec.node = id_;
        rec.step = block->step;
        k_.trace_event(std::move(rec));
        return;
    }
    start_verification(block, k_.now());
}

void Node::start_verification(const BlockPtr& block, double recon_t) {
    const double done = charge_verify_lane(proto().cost.verify_ms(block->tx_count()));
    k_.schedule(done, SimKernel::EvVerifyDone{id_, block, recon_t});
}

void Node::on_verify_done(const BlockPtr& block, double recon_t) {
    if (ledger_.contains(block->id())) return;
    const VerifyResult vr = verify_block(ledger_, *block, proto());
    if (!vr.ok) {
        ++k_.stats().rejects;
        TraceRec rec;
        rec.kind = TraceRec::Kind::Reject;
        rec.t = k_.now();
        rec.node = id_;
        rec.step = block->step;
        rec.note = to_string(vr.reason);
        k_.trace_event(std::move(rec));
        return;
    }
    if (block->kind == BlockKind::InTurn) {
        const double observed = (recon_t - block->created_at) + proto().cost.verify_ms(block->tx_count());
        if (observed > 0) update_beta(block->signer, observed);
    }
    adopt(block);

    // Buffered children of this block can be verified now.
    auto it = orphans_.find(block->id());
    if (it != orphans_.end()) {
        auto children = std::move(it->second);
        orphans_.erase(it);
        for (auto& ob : children) start_verification(ob.block, ob.recon_t);
    }
}

void Node::adopt(const BlockPtr& block) {
    LedgerUpdate up = ledger_.append_candidate(block);
    if (up.outcome == LedgerOutcome::Rejected) return;
    if (up.deadlock_tie) {
        TraceRec rec;
        rec.kind = TraceRec::Kind::DeadlockTie;
        rec.t = k_.now();
        rec.node = id_;
        rec.step = block->step;
        k_.trace_event(std::move(rec));
    }
    if (up.outcome == LedgerOutcome::ForkCreated) return; // head unchanged; block rests as an uncle candidate

    if (up.outcome == LedgerOutcome::Reorged) {
        ++k_.stats().reorgs;
        TraceRec rec;
        rec.kind = TraceRec::Kind::Reorg;
        rec.t = k_.now();
        rec.node = id_;
        rec.step = block->step;
        rec.aux = static_cast<uint32_t>(up.abandoned.size());
        k_.trace_event(std::move(rec));

        // Transactions from abandoned blocks return to the pool unless the
        // new chain commits them too.
        std::unordered_set<uint64_t> adopted_keys;
        for (const auto& nb : up.adopted)
            for (const auto& tx : nb->txs) adopted_keys.insert(tx.id.prefix64());
        for (const auto& ab : up.abandoned) {
            if (ab->pruned()) continue;
            for (const auto& tx : ab->txs)
                if (!adopted_keys.count(tx.id.prefix64())) pool_.reinject(tx);
        }
    }

    double reset_cost = 0;
    for (const auto& nb : up.adopted) {
        pool_.note_committed(nb->txs, nb->step);
        reset_cost += proto().cost.reset_ms(nb->tx_count());
    }
    last_reset_ms_ = reset_cost;
    const double done = charge_verify_lane(reset_cost);
    pending_.active = false; // superseded by the new head's plan
    k_.schedule(done, SimKernel::EvPlanReady{id_, ledger_.head_id()});
}

void Node::on_plan_ready(const BlockId& head) {
    if (ledger_.head_id() != head) return; // superseded
    BlockPtr head_block = ledger_.get(head);
    const Step step = head_block->step + 1;
    const auto& cfg = k_.config();

    pool_.purge_committed_before(step > 5 ? step - 5 : 0);

    if (cfg.proto.pcb_mode == PcbMode::Pcb && pool_.cbf_enabled()) {
        auto snapshot = std::make_shared<const CountingBloomFilter>(pool_.cbf());
        for (NodeId peer = 0; peer < cfg.proto.n; ++peer) {
            if (peer == id_) continue;
            k_.send(id_, peer, snapshot->wire_size(), CbfMsg{id_, step, snapshot});
        }
    }

    const NodeId scheduled = in_turn_signer(step, cfg.proto.order_mode, head_block->signer, cfg.proto.n);
    const auto recents = ledger_.recent_signers(head, cfg.proto.recents_window());
    const bool scheduled_blocked =
        std::find(recents.begin(), recents.end(), scheduled) != recents.end();

    if (scheduled_blocked && id_ == scheduled) {
        ++k_.stats().in_turn_blocked;
        TraceRec rec;
        rec.kind = TraceRec::Kind::InTurnBlocked;
        rec.t = k_.now();
        rec.node = id_;
        rec.step = step;
        k_.trace_event(std::move(rec));
    }

    const double due_in_turn = static_cast<double>(step) * cfg.proto.t_b;

    if (id_ == scheduled && !scheduled_blocked) {
        if (k_.in_turn_fault(step)) return; // scripted failure: verify-only this step
        const uint64_t avail = std::min<uint64_t>(pool_.pending(), cfg.proto.m);
        uint64_t target = avail;
        if (k_.now() + cfg.proto.cost.assemble_ms(avail) > due_in_turn) target = 0;
        const double ready = k_.now() + cfg.proto.cost.assemble_ms(target);
        pending_ = PendingProduce{true, step, head, BlockKind::InTurn, pool_.select(target),
                                  ledger_.collect_uncles(head, cfg.proto.n), 0.0,
                                  cfg.proto.cost.assemble_ms(target)};
        k_.schedule(std::max(due_in_turn, ready), SimKernel::EvBroadcastDue{id_, head});
        return;
    }

    const auto eligible = no_turn_set(scheduled, recents, cfg.proto.n);
    if (!eligible) return; // authorized set too small; nothing sane to do
    if (std::find(eligible->begin(), eligible->end(), id_) == eligible->end()) return; // forbidden

    DelaySample ds = sample_delay(cfg.proto.delay_mode, cfg.proto.w, beta_[scheduled], delay_rng_);
    if (ds.beta_clamped) {
        TraceRec rec;
        rec.kind = TraceRec::Kind::BetaClamped;
        rec.t = k_.now();
        rec.node = id_;
        rec.step = step;
        k_.trace_event(std::move(rec));
    }
    const double due = due_in_turn + ds.x_ms;
    const uint64_t avail = std::min<uint64_t>(pool_.pending(), cfg.proto.m);
    uint64_t target = avail;
    if (k_.now() + cfg.proto.cost.assemble_ms(avail) > due) target = 0;
    const double ready = k_.now() + cfg.proto.cost.assemble_ms(target);
    pending_ = PendingProduce{true, step, head, BlockKind::NoTurn, pool_.select(target),
                              ledger_.collect_uncles(head, cfg.proto.n), ds.x_ms,
                              cfg.proto.cost.assemble_ms(target)};
    k_.schedule(std::max(due, ready), SimKernel::EvNoTurnFire{id_, head});
}

void Node::on_broadcast_due(const BlockId& head) {
    if (!pending_.active || pending_.head != head || ledger_.head_id() != head) return;
    if (pending_.kind != BlockKind::InTurn) return;
    auto block = std::make_shared<Block>();
    block->step = pending_.step;
    block->parent_id = head;
    block->signer = id_;
    block->kind = BlockKind::InTurn;
    block->created_at = k_.now();
    block->uncle_refs = std::move(pending_.uncles);
    block->txs = std::move(pending_.txs);
    block->seal();
    const double a_ms = pending_.a_ms;
    pending_.active = false;
    k_.broadcast_block(id_, block, 0.0, last_reset_ms_, a_ms);
    adopt(block);
}

void Node::on_no_turn_fire(const BlockId& head) {
    if (!pending_.active || pending_.head != head || ledger_.head_id() != head) return;
    if (pending_.kind != BlockKind::NoTurn) return;
    auto block = std::make_shared<Block>();
    block->step = pending_.step;
    block->parent_id = head;
    block->signer = id_;
    block->kind = BlockKind::NoTurn;
    block->created_at = k_.now();
    block->uncle_refs = std::move(pending_.uncles);
    block->txs = std::move(pending_.txs);
    block->seal();
    const double x_ms = pending_.x_ms;
    const double a_ms = pending_.a_ms;
    pending_.active = false;
    k_.broadcast_block(id_, block, x_ms, last_reset_ms_, a_ms);
    adopt(block);
}

} // namespace exclique
