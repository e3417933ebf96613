#include "exclique/ledger.hpp"

#include <algorithm>
#include <set>

#include "exclique/schedule.hpp"

namespace exclique {

const char* to_string(LedgerOutcome o) {
    switch (o) {
        case LedgerOutcome::Extended: return "extended";
        case LedgerOutcome::ForkCreated: return "fork";
        case LedgerOutcome::Reorged: return "reorg";
        case LedgerOutcome::Rejected: return "rejected";
    }
    return "?";
}

const char* to_string(VerifyReject r) {
    switch (r) {
        case VerifyReject::None: return "none";
        case VerifyReject::UnknownParent: return "unknown-parent";
        case VerifyReject::BadStep: return "bad-step";
        case VerifyReject::BadKind: return "bad-kind";
        case VerifyReject::RecentSigner: return "recent-signer";
        case VerifyReject::NotAuthorized: return "not-authorized";
        case VerifyReject::CapacityExceeded: return "capacity-exceeded";
    }
    return "?";
}

Ledger::Ledger(BlockPtr genesis) {
    genesis_ = genesis->id();
    head_ = genesis_;
    head_weight_ = 0;
    by_step_[genesis->step].push_back(genesis_);
    blocks_.emplace(genesis_, Rec{std::move(genesis), 0});
}

const Ledger::Rec* Ledger::find(const BlockId& id) const {
    auto it = blocks_.find(id);
    return it == blocks_.end() ? nullptr : &it->second;
}

BlockPtr Ledger::get(const BlockId& id) const {
    const Rec* r = find(id);
    return r ? r->block : nullptr;
}

LedgerUpdate Ledger::append_candidate(const BlockPtr& block) {
    LedgerUpdate up;
    if (blocks_.count(block->id())) {
        up.outcome = LedgerOutcome::Rejected;
        up.reject = LedgerReject::DuplicateBlock;
        return up;
    }
    const Rec* parent = find(block->parent_id);
    if (!parent) {
        up.outcome = LedgerOutcome::Rejected;
        up.reject = LedgerReject::UnknownParent;
        return up;
    }
    const uint64_t cum = parent->cum_weight + block->weight();
    const BlockId id = block->id();
    by_step_[block->step].push_back(id);
    blocks_.emplace(id, Rec{block, cum});

    const bool tie = cum == head_weight_ && id != head_;
    const bool wins = cum > head_weight_ || (tie && id < head_);
    up.deadlock_tie = tie;
    if (!wins) {
        up.outcome = LedgerOutcome::ForkCreated;
        return up;
    }

    if (block->parent_id == head_) {
        up.outcome = LedgerOutcome::Extended;
        up.adopted.push_back(block);
    } else {
        // Walk both tips back to the fork point; step numbers strictly
        // decrease toward genesis on either side.
        up.outcome = LedgerOutcome::Reorged;
        BlockPtr a = find(head_)->block; // displaced chain
        BlockPtr b = block;              // new chain
        while (a->id() != b->id()) {
            if (a->step >= b->step) {
                up.abandoned.push_back(a);
                a = find(a->parent_id)->block;
            } else {
                up.adopted.push_back(b);
                b = find(b->parent_id)->block;
            }
        }
        std::reverse(up.adopted.begin(), up.adopted.end());
    }
    head_ = id;
    head_weight_ = cum;
    return up;
}

std::vector<NodeId> Ledger::recent_signers(const BlockId& tip, uint32_t window) const {
    std::vector<NodeId> out;
    out.reserve(window);
    const Rec* r = find(tip);
    while (r && out.size() < window && r->block->kind != BlockKind::Genesis) {
        out.push_back(r->block->signer);
        r = find(r->block->parent_id);
    }
    return out;
}

std::vector<UncleRef> Ledger::collect_uncles(const BlockId& tip, uint32_t window_n) const {
    const Rec* t = find(tip);
    if (!t) return {};
    const Step tip_step = t->block->step;
    const Step lo = tip_step >= window_n ? tip_step - window_n + 1 : 1;

    // Canonical ids and already-referenced uncles over the window.
    std::set<BlockId> canonical;
    std::set<UncleRef> referenced;
    for (const Rec* r = t; r && r->block->step >= lo; r = find(r->block->parent_id)) {
        canonical.insert(r->block->id());
        for (const auto& u : r->block->uncle_refs) referenced.insert(u);
        if (r->block->kind == BlockKind::Genesis) break;
    }

    std::set<UncleRef> found;
    for (Step s = lo; s <= tip_step; ++s) {
        auto it = by_step_.find(s);
        if (it == by_step_.end()) continue;
        for (const auto& id : it->second) {
            if (canonical.count(id)) continue;
            const Rec* r = find(id);
            const UncleRef u{r->block->step, r->block->signer};
            if (!referenced.count(u)) found.insert(u);
        }
    }
    return {found.begin(), found.end()};
}

std::vector<BlockPtr> Ledger::committed_chain() const {
    std::vector<BlockPtr> out;
    for (const Rec* r = find(head_); r; ) {
        out.push_back(r->block);
        if (r->block->kind == BlockKind::Genesis) break;
        r = find(r->block->parent_id);
    }
    std::reverse(out.begin(), out.end());
    return out;
}

VerifyResult verify_block(const Ledger& ledger, const Block& block, const ProtocolParams& params) {
    auto reject = [](VerifyReject r) { return VerifyResult{false, r}; };

    if (block.kind != BlockKind::InTurn && block.kind != BlockKind::NoTurn)
        return reject(VerifyReject::BadKind);
    BlockPtr parent = ledger.get(block.parent_id);
    if (!parent) return reject(VerifyReject::UnknownParent);
    if (parent->step + 1 != block.step) return reject(VerifyReject::BadStep);
    if (block.tx_count() > params.m) return reject(VerifyReject::CapacityExceeded);

    const auto recents = ledger.recent_signers(block.parent_id, params.recents_window());
    if (std::find(recents.begin(), recents.end(), block.signer) != recents.end())
        return reject(VerifyReject::RecentSigner);

    const NodeId expected = in_turn_signer(block.step, params.order_mode, parent->signer, params.n);
    if (block.kind == BlockKind::InTurn) {
        if (block.signer != expected) return reject(VerifyReject::NotAuthorized);
    } else {
        const auto eligible = no_turn_set(expected, recents, params.n);
        if (!eligible) return reject(VerifyReject::NotAuthorized);
        if (std::find(eligible->begin(), eligible->end(), block.signer) == eligible->end())
            return reject(VerifyReject::NotAuthorized);
    }
    return VerifyResult{true, VerifyReject::None};
}

} // namespace exclique
