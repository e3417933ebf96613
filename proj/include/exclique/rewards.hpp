#pragma once

#include <span>
#include <vector>

#include "exclique/block.hpp"

namespace exclique {

// One committed step as the reward contract sees it: the confirmed block's
// generator plus the uncle generators it recorded.
struct RewardWindowEntry {
    NodeId generator = 0;
    std::vector<UncleRef> uncles;
};

struct DistributeResult {
    std::vector<NodeId> active;        // A2: deduplicated active generators
    uint64_t payout_per_node = 0;      // floor((fees + carry) / |A2|)
    uint64_t carry_after = 0;
};

// Equal split of one step's fees over the active generators of the trailing
// window. Integer units; the remainder rides along as carry.
DistributeResult distribute(std::span<const RewardWindowEntry> window, uint64_t fees,
                            uint64_t carry, uint32_t n);

struct RewardOutcome {
    std::vector<uint64_t> fair_units;   // per node, cumulative over the run
    std::vector<uint64_t> direct_units; // no-contract baseline: full fee to the signer
    std::vector<uint32_t> blocks_signed;
    std::vector<uint32_t> uncle_credits; // distinct (step, signer) uncles per node
    uint64_t total_fees = 0;
    uint64_t final_carry = 0;

    bool conservation_ok() const {
        uint64_t sum = final_carry;
        for (uint64_t u : fair_units) sum += u;
        return sum == total_fees;
    }

    // max/min cumulative reward over nodes active at least once; infinite
    // (max, 0) ratios are reported as a large sentinel.
    double fairness_ratio_fair() const;
    double fairness_ratio_direct() const;
};

// Runs the sliding-window distribution at every committed step of the chain
// (genesis excluded) and the direct baseline alongside.
RewardOutcome compute_rewards(const std::vector<BlockPtr>& chain, uint32_t n);

} // namespace exclique
