#pragma once

#include <cstdint>
#include <vector>

#include "exclique/params.hpp"

namespace exclique {

// Per-link parameters are drawn once at network construction from these
// ranges (constant environment); min == max pins a value.
struct LinkConfig {
    double delay_min_ms = 0.0;
    double delay_max_ms = 200.0;
    double bandwidth_bps = 32e6;
    double loss_min = 0.0;
    double loss_max = 0.1;
    uint32_t max_retries = 5;
};

struct WorkloadConfig {
    uint32_t tx_payload = kMinTxPayload;
    // Probability a node sees a transaction only after late_factor * t_b;
    // controls TX-Pool similarity at encode time (0.1 => similarity 0.9).
    // The late copy lands after the transaction's block has been delivered,
    // so a missing transaction is genuinely missing at decode time.
    double miss_rate = 0.1;
    double late_factor = 2.2;
    uint64_t fee_min = 1;
    uint64_t fee_max = 8;
    // Batch of batch_factor * m transactions submitted per step.
    double batch_factor = 1.0;
};

struct FaultConfig {
    // Scripted in-turn failures, keyed by step: explicit list, fixed period,
    // or an independent per-step coin.
    std::vector<Step> fail_steps;
    uint64_t fail_period = 0;
    double fail_prob = 0.0;

    bool empty() const { return fail_steps.empty() && fail_period == 0 && fail_prob == 0.0; }
};

struct CbfConfig {
    uint32_t counters_per_item = 8;
    uint8_t hashes = 4;
    uint8_t counter_bits = 4;
    // Filters are sized for expected_pool_factor * m entries.
    double expected_pool_factor = 2.0;
};

struct SimConfig {
    ProtocolParams proto;
    LinkConfig link;
    WorkloadConfig workload;
    FaultConfig fault;
    CbfConfig cbf;
    uint64_t seed = 1;
    uint64_t steps = 200;      // committed steps to simulate
    bool verbose_trace = false;
    uint32_t prune_depth = 8;  // drop tx payloads of blocks buried this deep
};

} // namespace exclique
