#pragma once

#include <unordered_map>
#include <vector>

#include "exclique/block.hpp"
#include "exclique/params.hpp"

namespace exclique {

enum class LedgerOutcome : uint8_t { Extended, ForkCreated, Reorged, Rejected };
enum class LedgerReject : uint8_t { None, UnknownParent, DuplicateBlock };

const char* to_string(LedgerOutcome o);

struct LedgerUpdate {
    LedgerOutcome outcome = LedgerOutcome::Rejected;
    LedgerReject reject = LedgerReject::None;
    // Competing tips reached equal cumulative weight; resolved by smaller tip
    // hash but surfaced as an event since the protocol itself has no answer.
    bool deadlock_tie = false;
    std::vector<BlockPtr> abandoned; // canonical blocks displaced by a reorg (tip first)
    std::vector<BlockPtr> adopted;   // blocks newly on the canonical path (oldest first)
};

// Per-node view of the block tree. Head is the tip with the greatest
// cumulative weight; ties break toward the lexicographically smaller hash.
class Ledger {
public:
    explicit Ledger(BlockPtr genesis);

    LedgerUpdate append_candidate(const BlockPtr& block);

    bool contains(const BlockId& id) const { return blocks_.count(id) != 0; }
    BlockPtr get(const BlockId& id) const;

    const BlockId& head_id() const { return head_; }
    BlockPtr head() const { return get(head_); }
    uint64_t head_weight() const { return head_weight_; }
    const BlockId& genesis_id() const { return genesis_; }

    // Signers of the last `window` blocks ending at `tip` (genesis excluded),
    // most recent first.
    std::vector<NodeId> recent_signers(const BlockId& tip, uint32_t window) const;

    // Valid non-canonical blocks within the trailing `window_n` steps of `tip`
    // that no block on that canonical stretch references yet. Sorted by
    // (step, signer).
    std::vector<UncleRef> collect_uncles(const BlockId& tip, uint32_t window_n) const;

    // Genesis..head, oldest first.
    std::vector<BlockPtr> committed_chain() const;

    size_t block_count() const { return blocks_.size(); }

private:
    struct Rec {
        BlockPtr block;
        uint64_t cum_weight = 0;
    };

    const Rec* find(const BlockId& id) const;

    std::unordered_map<BlockId, Rec, Hash256Hasher> blocks_;
    std::unordered_map<Step, std::vector<BlockId>> by_step_;
    BlockId head_;
    BlockId genesis_;
    uint64_t head_weight_ = 0;
};

enum class VerifyReject : uint8_t {
    None,
    UnknownParent,
    BadStep,
    BadKind,
    RecentSigner,
    NotAuthorized,
    CapacityExceeded,
};

const char* to_string(VerifyReject r);

struct VerifyResult {
    bool ok = false;
    VerifyReject reason = VerifyReject::None;
};

// Stateless validity check against the chain the block claims to extend:
// signer authorization for the kind at that step, the recents window, parent
// linkage and capacity. Never throws; verification time is charged by the
// simulation clock, not here.
VerifyResult verify_block(const Ledger& ledger, const Block& block, const ProtocolParams& params);

} // namespace exclique
