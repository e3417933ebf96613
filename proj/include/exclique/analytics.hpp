#pragma once

#include <functional>
#include <vector>

#include "exclique/sim_config.hpp"
#include "exclique/trace.hpp"

namespace exclique {

// ---------------------------------------------------------------------------
// Closed-form throughput / fork models. Times are milliseconds in and out;
// throughputs are transactions per second.
// ---------------------------------------------------------------------------

// Capacity-bound TPS of the normal case.
inline double lambda0(double m_star, double t_b_ms) {
    return t_b_ms <= 0 ? 0.0 : m_star * 1000.0 / t_b_ms;
}

// Expected minimum extra wait of the no-turn field: w / floor((n+1)/2).
inline double delta1_ms(uint32_t n, double w_ms) { return w_ms / static_cast<double>((n + 1) / 2); }

inline double lambda1(double m_star, double t_b_ms, double d1_ms) {
    return m_star * 1000.0 / (t_b_ms + d1_ms);
}

// E[d_h - d_{h-1} | d_h >= d_{h-1}] where d is the minimum of
// floor((n+1)/2)-1 draws from U(0,w). Monte-Carlo; the estimate itself is the
// reference value (pinned seed).
double cond_exp_delta_ms(uint32_t n, double w_ms, uint64_t samples = 1'000'000,
                         uint64_t seed = 0x3d31ULL);

// Half the steps following a no-turn block keep their transactions; the other
// half degenerate to empty blocks.
double lambda3(double m_star, double t_b_ms, uint32_t n, double w_ms);

struct CaseRates {
    double p0 = 0, p1 = 0, p2 = 0, p3 = 0;
};

// Expected TPS combining the four cases.
double expected_tps(const CaseRates& p, double lambda0_tps, double d1_ms, double cond_exp_ms,
                    double t_b_ms);

// Fork probability of a single no-turn node racing the in-turn block.
double fork_prob_single(double b_ms, double v_ms, double w_ms);
// ... of the whole no-turn field.
double fork_prob(double p_s, uint32_t n);
// ... after tightening the delay range to (beta, w).
double fork_prob_accurate(double b_ms, double v_ms, double beta_ms, double w_ms, uint32_t n);

struct MStarResult {
    bool feasible = false;
    uint64_t m_star = 0;
};

// Largest m with f(m) <= t_b for a monotone nondecreasing step-cost model,
// by exponential range growth then binary search.
MStarResult find_m_star(const std::function<double(uint64_t)>& f_ms, double t_b_ms,
                        uint64_t m_cap = 100'000'000);

// Budget-equation step cost derived from a simulation config: expected worst
// link delay plus serialization of the (mode-dependent) block bytes, plus the
// affine CPU tasks.
struct StepCostModel {
    CostModel cost;
    double max_base_ms = 0;
    double header_bytes = 60;
    double per_tx_wire_bytes = 114;
    double bandwidth_bps = 32e6;

    double b_ms(uint64_t m) const {
        return max_base_ms + (header_bytes + per_tx_wire_bytes * static_cast<double>(m)) * 8000.0 / bandwidth_bps;
    }
    double f_ms(uint64_t m) const { return b_ms(m) + cost.vra_ms(m); }
};

StepCostModel make_step_cost_model(const SimConfig& cfg);

// ---------------------------------------------------------------------------
// Trace classification into the four-case taxonomy.
// ---------------------------------------------------------------------------

enum class StepCase : uint8_t { Normal, Exc1, Exc2, Exc3 };
enum class CommittedKind : uint8_t { InTurn, NoTurn, Empty };

const char* to_string(StepCase c);
const char* to_string(CommittedKind k);

struct StepRecord {
    Step step = 0;
    CommittedKind kind = CommittedKind::InTurn;
    uint32_t tx_count = 0;
    double x_ms = 0; // winning no-turn delay, 0 for in-turn steps
    double b_ms = -1;
    double v_ms = 0;
    double r_ms = 0;
    double a_ms = 0;
    StepCase step_case = StepCase::Normal;
    bool fork = false;
    std::string block_id;
    double t_committed = 0;
};

struct MeasuredStats {
    CaseRates rates;
    double fork_rate = 0;
    double tps = 0;
    double mean_block_bytes = 0;
    double mean_b_ms = 0;     // over steps with complete broadcasts
    double mean_bv_ms = 0;    // mean b + verify charge
    uint64_t steps_classified = 0;
    uint64_t committed_txs = 0;
    double span_ms = 0;
    Step warmup = 0;
};

struct ClassifiedTrace {
    std::vector<StepRecord> steps; // all committed steps, warmup included
    MeasuredStats measured;        // over steps > warmup
};

// Rebuilds the committed chain from produce/final records and classifies each
// committed step. Throws MalformedTrace on broken input.
ClassifiedTrace classify_trace(const std::vector<TraceRec>& trace, Step warmup_steps);

struct AnalyticsReport {
    MeasuredStats measured;
    // model section
    uint64_t m_star = 0;
    bool m_star_feasible = false;
    double lambda0_run = 0;    // at the run's configured m
    double lambda0_mstar = 0;  // at the model-optimal m
    double lambda1_tps = 0;
    double lambda3_tps = 0;
    double d1_ms = 0;
    double cond_exp_ms = 0;
    double eq7_expected_tps = 0; // Eq-style combination with measured rates at run m
    double model_p_s = 0;
    double model_p_f = 0;
    double model_p_f_accurate = 0;
    double mean_beta_ms = 0;
    // deltas
    double tps_model_delta_rel = 0;
    double fork_model_delta_abs = 0;
};

AnalyticsReport build_report(const ClassifiedTrace& ct, const SimConfig& cfg, double mean_beta_ms);

} // namespace exclique
