#include "exclique/runner.hpp"

#include "exclique/consensus.hpp"

namespace exclique {

RunResult run_simulation(const SimConfig& cfg) {
    SimKernel kernel(cfg);
    kernel.run_until_committed(cfg.steps);

    RunResult res;
    res.config = cfg;
    res.warmup = std::min<Step>(cfg.proto.n, cfg.steps / 2);
    res.trace = std::move(kernel.trace());
    res.stats = kernel.stats();
    if (res.stats.beta_err_count > 0)
        res.mean_beta_tracking_err = res.stats.beta_err_sum / static_cast<double>(res.stats.beta_err_count);

    res.classified = classify_trace(res.trace, res.warmup);

    double mean_beta = 0;
    uint64_t beta_n = 0;
    for (NodeId nd = 0; nd < cfg.proto.n; ++nd) {
        for (NodeId sg = 0; sg < cfg.proto.n; ++sg) {
            const double b = kernel.node(nd).beta_ms(sg);
            if (b > 0) {
                mean_beta += b;
                ++beta_n;
            }
        }
    }
    if (beta_n > 0) mean_beta /= static_cast<double>(beta_n);

    res.report = build_report(res.classified, cfg, mean_beta);
    res.rewards = compute_rewards(kernel.observer().committed_chain(), cfg.proto.n);
    res.committed_steps = kernel.observer().head()->step;
    return res;
}

} // namespace exclique
