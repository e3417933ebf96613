#pragma once

#include <optional>
#include <span>
#include <vector>

#include "exclique/params.hpp"
#include "exclique/rng.hpp"

namespace exclique {

// In-turn signer for a step. Fixed order follows the protocol's (h+1) % n
// rule; differential order advances from whoever signed the previous
// committed block, in-turn or not.
inline NodeId in_turn_signer(Step h, OrderMode mode, NodeId last_block_signer, uint32_t n) {
    if (mode == OrderMode::Fixed) return static_cast<NodeId>((h + 1) % n);
    return static_cast<NodeId>((last_block_signer + 1) % n);
}

// Eligible no-turn signers for a step: the first floor((n+1)/2)-1 indexes
// walking up from in_turn+1 that are neither the in-turn node nor inside the
// recents window. Empty optional when the authorized set is too small.
std::optional<std::vector<NodeId>> no_turn_set(NodeId in_turn, std::span<const NodeId> recents,
                                               uint32_t n);

struct DelaySample {
    double x_ms = 0;
    bool beta_clamped = false;
};

// Random extra wait for a no-turn node. Naive: U(0, w). Accurate: U(beta, w)
// with beta the node's estimate of broadcast+verify time for the scheduled
// in-turn signer; beta >= w is clamped to 0.95 w.
DelaySample sample_delay(DelayMode mode, double w, double beta_estimate, Rng& rng);

} // namespace exclique
