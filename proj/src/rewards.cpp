#include "exclique/rewards.hpp"

#include <algorithm>
#include <limits>
#include <set>

namespace exclique {

DistributeResult distribute(std::span<const RewardWindowEntry> window, uint64_t fees,
                            uint64_t carry, uint32_t n) {
    DistributeResult res;
    std::vector<bool> seen(n, false);
    for (const auto& e : window) {
        if (e.generator < n && !seen[e.generator]) {
            seen[e.generator] = true;
            res.active.push_back(e.generator);
        }
        for (const auto& u : e.uncles) {
            if (u.signer < n && !seen[u.signer]) {
                seen[u.signer] = true;
                res.active.push_back(u.signer);
            }
        }
    }
    const uint64_t pot = fees + carry;
    if (res.active.empty()) {
        res.carry_after = pot;
        return res;
    }
    res.payout_per_node = pot / res.active.size();
    res.carry_after = pot % res.active.size();
    return res;
}

RewardOutcome compute_rewards(const std::vector<BlockPtr>& chain, uint32_t n) {
    RewardOutcome out;
    out.fair_units.assign(n, 0);
    out.direct_units.assign(n, 0);
    out.blocks_signed.assign(n, 0);
    out.uncle_credits.assign(n, 0);

    // chain[0] is genesis; committed steps start at index 1.
    std::vector<RewardWindowEntry> entries;
    entries.reserve(chain.size());
    std::set<UncleRef> distinct_uncles;
    for (size_t i = 1; i < chain.size(); ++i) {
        const Block& b = *chain[i];
        RewardWindowEntry e;
        e.generator = b.signer;
        e.uncles = b.uncle_refs;
        entries.push_back(std::move(e));
        if (b.signer < n) ++out.blocks_signed[b.signer];
        for (const auto& u : b.uncle_refs)
            if (u.signer < n && distinct_uncles.insert(u).second) ++out.uncle_credits[u.signer];
    }

    uint64_t carry = 0;
    for (size_t i = 0; i < entries.size(); ++i) {
        const Block& b = *chain[i + 1];
        const uint64_t fees = b.fee_total();
        out.total_fees += fees;
        if (b.signer < n) out.direct_units[b.signer] += fees;

        // Window: the n committed steps before step h (shrinks at chain start).
        const size_t end = i; // entries[0..i) are steps 1..h-1
        const size_t begin = end > n ? end - n : 0;
        const auto res = distribute(std::span(entries.data() + begin, end - begin), fees, carry, n);
        for (NodeId nd : res.active) out.fair_units[nd] += res.payout_per_node;
        carry = res.carry_after;
    }
    out.final_carry = carry;
    return out;
}

namespace {
double ratio_over_active(const std::vector<uint64_t>& units, const std::vector<uint32_t>& signed_blocks,
                         const std::vector<uint32_t>& uncles) {
    uint64_t mx = 0;
    uint64_t mn = std::numeric_limits<uint64_t>::max();
    bool any = false;
    for (size_t i = 0; i < units.size(); ++i) {
        if (signed_blocks[i] == 0 && uncles[i] == 0) continue; // never active
        any = true;
        mx = std::max(mx, units[i]);
        mn = std::min(mn, units[i]);
    }
    if (!any) return 0.0;
    if (mn == 0) return 1e18; // some active node earned nothing
    return static_cast<double>(mx) / static_cast<double>(mn);
}
} // namespace

double RewardOutcome::fairness_ratio_fair() const {
    return ratio_over_active(fair_units, blocks_signed, uncle_credits);
}

double RewardOutcome::fairness_ratio_direct() const {
    return ratio_over_active(direct_units, blocks_signed, uncle_credits);
}

} // namespace exclique
