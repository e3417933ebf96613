#include "exclique/schedule.hpp"

#include <algorithm>

namespace exclique {

const char* to_string(OrderMode m) { return m == OrderMode::Fixed ? "fixed" : "differential"; }
const char* to_string(DelayMode m) { return m == DelayMode::Naive ? "naive" : "accurate"; }
const char* to_string(PcbMode m) {
    switch (m) {
        case PcbMode::FullBlock: return "full";
        case PcbMode::Bcb: return "bcb";
        case PcbMode::Pcb: return "pcb";
    }
    return "?";
}

std::optional<std::vector<NodeId>> no_turn_set(NodeId in_turn, std::span<const NodeId> recents,
                                               uint32_t n) {
    const uint32_t want = (n + 1) / 2 - 1;
    std::vector<NodeId> out;
    out.reserve(want);
    for (uint32_t off = 1; off < n && out.size() < want; ++off) {
        const NodeId cand = static_cast<NodeId>((in_turn + off) % n);
        if (std::find(recents.begin(), recents.end(), cand) != recents.end()) continue;
        out.push_back(cand);
    }
    if (out.size() < want) return std::nullopt;
    return out;
}

DelaySample sample_delay(DelayMode mode, double w, double beta_estimate, Rng& rng) {
    DelaySample s;
    if (mode == DelayMode::Naive) {
        s.x_ms = rng.uniform(0.0, w);
        return s;
    }
    double beta = beta_estimate;
    if (beta >= w && w > 0) {
        beta = 0.95 * w;
        s.beta_clamped = true;
    }
    if (beta < 0) beta = 0;
    s.x_ms = rng.uniform(beta, w);
    return s;
}

} // namespace exclique
