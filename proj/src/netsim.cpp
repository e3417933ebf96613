#include "exclique/netsim.hpp"

#include <sstream>

#include "exclique/consensus.hpp"

namespace exclique {

namespace {
constexpr uint64_t kLinkStream = 0x6c696e6bULL;     // "link"
constexpr uint64_t kLossStream = 0x6c6f7373ULL;     // "loss"
constexpr uint64_t kFaultStream = 0x6661756c74ULL;  // "fault"
constexpr uint64_t kWorkloadStream = 0x776f726bULL; // "work"
} // namespace

SimKernel::SimKernel(const SimConfig& cfg)
    : cfg_(cfg), loss_rng_(Rng::stream(cfg.seed, kLossStream)) {
    const uint32_t n = cfg_.proto.n;
    if (n < 4) throw std::invalid_argument("simulation needs at least 4 consensus nodes");

    uint64_t ws = cfg.seed ^ kWorkloadStream;
    workload_salt_ = splitmix64(ws);

    // Per-link parameters drawn once, in a fixed (from, to) order.
    Rng link_rng = Rng::stream(cfg.seed, kLinkStream);
    links_.resize(static_cast<size_t>(n) * n);
    for (uint32_t from = 0; from < n; ++from) {
        for (uint32_t to = 0; to < n; ++to) {
            if (from == to) continue;
            LinkParams& lp = links_[from * n + to];
            lp.base_delay_ms = link_rng.uniform(cfg.link.delay_min_ms, cfg.link.delay_max_ms);
            lp.bandwidth_bps = cfg.link.bandwidth_bps;
            lp.loss_rate = link_rng.uniform(cfg.link.loss_min, cfg.link.loss_max);
        }
    }

    auto g = std::make_shared<Block>(Block::genesis(n - 1));
    genesis_ = g;
    observer_ = std::make_unique<Ledger>(genesis_);

    {
        TraceRec rec;
        rec.kind = TraceRec::Kind::RunHeader;
        rec.aux = n;
        std::ostringstream note;
        note << "seed=" << cfg.seed << " tb=" << cfg.proto.t_b << " m=" << cfg.proto.m
             << " order=" << to_string(cfg.proto.order_mode)
             << " delay=" << to_string(cfg.proto.delay_mode)
             << " pcb=" << to_string(cfg.proto.pcb_mode);
        rec.note = note.str();
        trace_.push_back(std::move(rec));
        TraceRec grec;
        grec.kind = TraceRec::Kind::Genesis;
        grec.id = genesis_->id().hex();
        trace_.push_back(std::move(grec));
    }

    nodes_.reserve(n);
    for (uint32_t i = 0; i < n; ++i) nodes_.push_back(std::make_unique<Node>(*this, i));

    // First workload batch lands before any planning event at t=0.
    schedule(0.0, EvInject{1});
    for (uint32_t i = 0; i < n; ++i) schedule(0.0, EvPlanReady{i, genesis_->id()});
}

SimKernel::~SimKernel() = default;

void SimKernel::schedule(double at, EventPayload payload) {
    queue_.push(Event{std::max(at, now_), next_seq_++, std::move(payload)});
}

void SimKernel::trace_event(TraceRec rec) {
    trace_.push_back(std::move(rec));
}

bool SimKernel::in_turn_fault(Step h) {
    const auto& f = cfg_.fault;
    bool fault = false;
    if (!f.fail_steps.empty())
        fault = std::find(f.fail_steps.begin(), f.fail_steps.end(), h) != f.fail_steps.end();
    if (!fault && f.fail_period > 0) fault = (h % f.fail_period) == 0;
    if (!fault && f.fail_prob > 0) {
        uint8_t buf[8];
        std::memcpy(buf, &h, 8);
        const uint64_t r = siphash24(workload_salt_ ^ kFaultStream, h, std::span<const uint8_t>(buf, 8));
        fault = static_cast<double>(r) * 0x1.0p-64 < f.fail_prob;
    }
    if (fault && faulted_traced_.insert(h).second) {
        ++stats_.faults_injected;
        TraceRec rec;
        rec.kind = TraceRec::Kind::Fault;
        rec.t = now_;
        rec.step = h;
        trace_.push_back(std::move(rec));
    }
    return fault;
}

Transaction SimKernel::make_tx(uint64_t global_index) const {
    Transaction tx;
    tx.id = Hash256::from_seed(workload_salt_ + 0x2545f4914f6cdd1dULL * (global_index + 1));
    tx.payload_size = std::max(cfg_.workload.tx_payload, kTxFixedFields);
    tx.nonce = global_index;
    const uint64_t span = cfg_.workload.fee_max - cfg_.workload.fee_min + 1;
    tx.fee = cfg_.workload.fee_min + (tx.id.prefix64() >> 17) % span;
    return tx;
}

bool SimKernel::tx_missing_at(const TxId& id, NodeId node) const {
    if (cfg_.workload.miss_rate <= 0) return false;
    const uint64_t r = siphash24(workload_salt_, 0x6d697373ULL + node, id.bytes);
    return static_cast<double>(r) * 0x1.0p-64 < cfg_.workload.miss_rate;
}

void SimKernel::handle_inject(uint64_t batch) {
    const uint32_t n = cfg_.proto.n;
    const uint64_t count =
        std::max<uint64_t>(1, static_cast<uint64_t>(cfg_.workload.batch_factor *
                                                    static_cast<double>(cfg_.proto.m)));
    const uint64_t pool_cap = 3 * cfg_.proto.m + count;
    const uint64_t first = txs_created_;
    txs_created_ += count;
    bool any_late = false;
    for (uint64_t i = first; i < first + count; ++i) {
        const Transaction tx = make_tx(i);
        for (NodeId nd = 0; nd < n; ++nd) {
            if (tx_missing_at(tx.id, nd)) {
                any_late = true;
                continue;
            }
            if (nodes_[nd]->pool().pending() < pool_cap) nodes_[nd]->on_pool_insert(tx);
        }
    }
    TraceRec rec;
    rec.kind = TraceRec::Kind::Inject;
    rec.t = now_;
    rec.step = batch;
    rec.tx_count = static_cast<uint32_t>(count);
    trace_.push_back(std::move(rec));

    inject_ranges_[batch] = {first, first + count};
    if (any_late) {
        const double late_at = now_ + cfg_.workload.late_factor * cfg_.proto.t_b;
        for (NodeId nd = 0; nd < n; ++nd) schedule(late_at, EvLateInsert{batch, nd});
    }

    // Keep a few batches ahead of the committed chain.
    if (batch < cfg_.steps + 8) {
        const double next_at = std::max(now_ + 1.0, (static_cast<double>(batch) - 1.0) * cfg_.proto.t_b + 1.0);
        schedule(next_at, EvInject{batch + 1});
    }
}

void SimKernel::handle_late_insert(uint64_t batch, NodeId node) {
    auto it = inject_ranges_.find(batch);
    if (it == inject_ranges_.end()) return;
    const auto [first, last] = it->second;
    const uint64_t pool_cap = 4 * cfg_.proto.m;
    for (uint64_t i = first; i < last; ++i) {
        const Transaction tx = make_tx(i);
        if (!tx_missing_at(tx.id, node)) continue;
        if (nodes_[node]->pool().pending() < pool_cap) nodes_[node]->on_pool_insert(tx);
    }
    // The range entry is dead once every node processed its late arrivals.
    if (++late_done_[batch] == cfg_.proto.n) {
        inject_ranges_.erase(batch);
        late_done_.erase(batch);
    }
}

void SimKernel::send(NodeId from, NodeId to, uint64_t bytes, MessagePayload payload) {
    const LinkParams& lp = link(from, to);
    const double transfer = lp.transfer_ms(bytes);
    const double rto = lp.rto_ms(bytes);
    double depart = now_;
    for (uint32_t attempt = 0;; ++attempt) {
        if (!loss_rng_.bernoulli(lp.loss_rate)) {
            schedule(depart + transfer, EvDeliver{Message{from, to, bytes, std::move(payload)}});
            return;
        }
        if (attempt == cfg_.link.max_retries) {
            ++stats_.undeliverable;
            schedule(depart + rto, EvUndeliverable{from, to});
            return;
        }
        depart += rto;
    }
}

void SimKernel::broadcast_block(NodeId from, const std::shared_ptr<Block>& block, double x_delay_ms,
                                double r_ms, double a_ms) {
    const uint32_t n = cfg_.proto.n;
    produced_.push_back(block);
    ++stats_.blocks_produced;
    bcast_.emplace(block->id(), BroadcastStat{now_, now_, 1, 0, block->step, false});

    observer_add(block);

    // Sends per mode; the produce record carries the mean bytes actually put
    // on a link for this block (the paper's block-size metric).
    uint64_t sent_bytes = 0;
    uint32_t sent_count = 0;
    switch (cfg_.proto.pcb_mode) {
        case PcbMode::FullBlock: {
            for (NodeId to = 0; to < n; ++to) {
                if (to == from) continue;
                send(from, to, block->wire_size(), BlockMsg{block});
                sent_bytes += block->wire_size();
                ++sent_count;
            }
            break;
        }
        case PcbMode::Bcb: {
            auto compact = std::make_shared<const CompactBlock>(
                bcb_encode(*block, block_salt(block->step, from)));
            for (NodeId to = 0; to < n; ++to) {
                if (to == from) continue;
                send(from, to, compact->wire_size(), CompactMsg{compact, block});
                sent_bytes += compact->wire_size();
                ++sent_count;
            }
            break;
        }
        case PcbMode::Pcb: {
            const uint64_t salt = block_salt(block->step, from);
            Node& producer = *nodes_[from];
            for (NodeId to = 0; to < n; ++to) {
                if (to == from) continue;
                auto compact = std::make_shared<const CompactBlock>(
                    pcb_encode(*block, producer.peer_cbf(to), salt));
                send(from, to, compact->wire_size(), CompactMsg{compact, block});
                sent_bytes += compact->wire_size();
                ++sent_count;
            }
            break;
        }
    }

    TraceRec rec;
    rec.kind = TraceRec::Kind::Produce;
    rec.t = now_;
    rec.step = block->step;
    rec.node = from;
    rec.block_kind = block->kind;
    rec.tx_count = block->tx_count();
    rec.bytes = sent_count ? sent_bytes / sent_count : block->wire_size();
    rec.x_ms = x_delay_ms;
    rec.v_ms = cfg_.proto.cost.verify_ms(block->tx_count());
    rec.r_ms = r_ms;
    rec.a_ms = a_ms;
    rec.id = block->id().hex();
    rec.id2 = block->parent_id.hex();
    trace_.push_back(std::move(rec));

    prune_old_blocks();
}

void SimKernel::note_reconstructed(const BlockId& id, NodeId) {
    auto it = bcast_.find(id);
    if (it == bcast_.end()) return;
    BroadcastStat& st = it->second;
    ++st.holders;
    st.last_done = now_;
    if (st.holders == cfg_.proto.n && !st.done_traced) {
        st.done_traced = true;
        TraceRec rec;
        rec.kind = TraceRec::Kind::BcastDone;
        rec.t = now_;
        rec.step = st.step;
        rec.id = id.hex();
        rec.b_ms = now_ - st.start;
        rec.rounds = st.rounds;
        rec.aux = st.holders;
        trace_.push_back(std::move(rec));
    }
}

void SimKernel::note_extra_round(const BlockId& id, NodeId node, uint32_t missing, Step step) {
    ++stats_.extra_rounds;
    auto it = bcast_.find(id);
    if (it != bcast_.end()) ++it->second.rounds;
    TraceRec rec;
    rec.kind = TraceRec::Kind::ExtraRound;
    rec.t = now_;
    rec.node = node;
    rec.step = step;
    rec.aux = missing;
    rec.id = id.hex();
    trace_.push_back(std::move(rec));
}

double SimKernel::measure_broadcast_time(const BlockId& id) const {
    auto it = bcast_.find(id);
    if (it == bcast_.end()) return -1.0;
    const BroadcastStat& st = it->second;
    if (st.holders < cfg_.proto.n) return -1.0;
    return st.last_done - st.start;
}

void SimKernel::observer_add(const BlockPtr& block) {
    auto& count = produced_per_step_[block->step];
    if (++count == 2) ++stats_.forks;
    LedgerUpdate up = observer_->append_candidate(block);
    if (up.deadlock_tie) {
        ++stats_.deadlock_ties;
        TraceRec rec;
        rec.kind = TraceRec::Kind::DeadlockTie;
        rec.t = now_;
        rec.step = block->step;
        rec.node = cfg_.proto.n; // observer marker
        trace_.push_back(std::move(rec));
    }
}

void SimKernel::prune_old_blocks() {
    const Step head_step = observer_->head()->step;
    if (head_step <= cfg_.prune_depth) return;
    const Step cutoff = head_step - cfg_.prune_depth;
    while (prune_cursor_ < produced_.size() && produced_[prune_cursor_]->step < cutoff) {
        produced_[prune_cursor_]->prune_txs();
        ++prune_cursor_;
    }
}

void SimKernel::dispatch(const Event& ev) {
    if (std::holds_alternative<EvDeliver>(ev.payload)) {
        const auto& d = std::get<EvDeliver>(ev.payload);
        nodes_[d.msg.to]->on_deliver(d.msg);
    } else if (std::holds_alternative<EvVerifyDone>(ev.payload)) {
        const auto& e = std::get<EvVerifyDone>(ev.payload);
        nodes_[e.node]->on_verify_done(e.block, e.recon_t);
    } else if (std::holds_alternative<EvPlanReady>(ev.payload)) {
        const auto& e = std::get<EvPlanReady>(ev.payload);
        nodes_[e.node]->on_plan_ready(e.head);
    } else if (std::holds_alternative<EvBroadcastDue>(ev.payload)) {
        const auto& e = std::get<EvBroadcastDue>(ev.payload);
        nodes_[e.node]->on_broadcast_due(e.head);
    } else if (std::holds_alternative<EvNoTurnFire>(ev.payload)) {
        const auto& e = std::get<EvNoTurnFire>(ev.payload);
        nodes_[e.node]->on_no_turn_fire(e.head);
    } else if (std::holds_alternative<EvInject>(ev.payload)) {
        handle_inject(std::get<EvInject>(ev.payload).batch);
    } else if (std::holds_alternative<EvLateInsert>(ev.payload)) {
        const auto& e = std::get<EvLateInsert>(ev.payload);
        handle_late_insert(e.batch, e.node);
    } else if (std::holds_alternative<EvUndeliverable>(ev.payload)) {
        const auto& e = std::get<EvUndeliverable>(ev.payload);
        TraceRec rec;
        rec.kind = TraceRec::Kind::Undeliverable;
        rec.t = now_;
        rec.node = e.to;
        rec.aux = e.from;
        trace_.push_back(std::move(rec));
    }
}

void SimKernel::run_until(double t_end) {
    while (!queue_.empty() && queue_.top().at <= t_end) {
        Event ev = queue_.top();
        queue_.pop();
        now_ = ev.at;
        dispatch(ev);
    }
    now_ = std::max(now_, t_end);
}

void SimKernel::run_until_committed(uint64_t steps) {
    const double t_cap = (static_cast<double>(steps) + 50.0) * cfg_.proto.t_b * 10.0;
    while (!queue_.empty() && observer_->head()->step < steps && now_ <= t_cap) {
        Event ev = queue_.top();
        queue_.pop();
        now_ = ev.at;
        dispatch(ev);
    }
    TraceRec rec;
    rec.kind = TraceRec::Kind::Final;
    rec.t = now_;
    rec.id = observer_->head_id().hex();
    rec.step = observer_->head()->step;
    trace_.push_back(std::move(rec));
}

} // namespace exclique
