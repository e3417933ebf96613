#pragma once

#include "exclique/analytics.hpp"
#include "exclique/netsim.hpp"
#include "exclique/rewards.hpp"

namespace exclique {

struct RunResult {
    SimConfig config;
    Step warmup = 0;
    std::vector<TraceRec> trace;
    ClassifiedTrace classified;
    AnalyticsReport report;
    RewardOutcome rewards;
    SimKernel::Stats stats;
    double mean_beta_tracking_err = 0; // mean |beta-observed|/observed, accurate mode
    uint64_t committed_steps = 0;
};

// One deterministic simulation: event loop to the committed-step target, then
// classification, model comparison and reward accounting.
RunResult run_simulation(const SimConfig& cfg);

} // namespace exclique
