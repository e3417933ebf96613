#include "exclique/artifacts.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace exclique {

namespace {

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << content;
}

std::string fmt_ms(double v) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(3) << v;
    return os.str();
}

std::string steps_csv(const RunResult& res) {
    std::ostringstream os;
    os << "step,kind,case,tx_count,x,b,v,r,a,fork\n";
    for (const auto& sr : res.classified.steps) {
        os << sr.step << ',' << to_string(sr.kind) << ',' << to_string(sr.step_case) << ','
           << sr.tx_count << ',' << fmt_ms(sr.x_ms) << ',' << fmt_ms(sr.b_ms) << ','
           << fmt_ms(sr.v_ms) << ',' << fmt_ms(sr.r_ms) << ',' << fmt_ms(sr.a_ms) << ','
           << (sr.fork ? 1 : 0) << '\n';
    }
    return os.str();
}

std::string rewards_csv(const RunResult& res) {
    std::ostringstream os;
    os << "node_id,blocks_signed,uncles,reward_units\n";
    const auto& rw = res.rewards;
    for (size_t i = 0; i < rw.fair_units.size(); ++i)
        os << i << ',' << rw.blocks_signed[i] << ',' << rw.uncle_credits[i] << ','
           << rw.fair_units[i] << '\n';
    return os.str();
}

nlohmann::json report_json(const RunResult& res) {
    const auto& m = res.report.measured;
    const auto& r = res.report;
    nlohmann::json j;
    j["measured"] = {
        {"p0", m.rates.p0},
        {"p1", m.rates.p1},
        {"p2", m.rates.p2},
        {"p3", m.rates.p3},
        {"fork_rate", m.fork_rate},
        {"tps", m.tps},
        {"mean_block_bytes", m.mean_block_bytes},
        {"mean_broadcast_ms", m.mean_b_ms},
        {"mean_bv_ms", m.mean_bv_ms},
        {"steps_classified", m.steps_classified},
        {"committed_txs", m.committed_txs},
        {"span_ms", m.span_ms},
        {"warmup_steps_discarded", m.warmup},
    };
    j["model"] = {
        {"m_star", r.m_star},
        {"m_star_feasible", r.m_star_feasible},
        {"lambda0_run_tps", r.lambda0_run},
        {"lambda0_mstar_tps", r.lambda0_mstar},
        {"lambda1_mstar_tps", r.lambda1_tps},
        {"lambda2_tps", 0.0},
        {"lambda3_mstar_tps", r.lambda3_tps},
        {"delta1_ms", r.d1_ms},
        {"cond_exp_delta_ms", r.cond_exp_ms},
        {"eq7_expected_tps_at_run_m", r.eq7_expected_tps},
        {"p_s", r.model_p_s},
        {"p_f", r.model_p_f},
        {"p_f_accurate", r.model_p_f_accurate},
        {"mean_beta_ms", r.mean_beta_ms},
    };
    j["deltas"] = {
        {"tps_model_vs_measured_rel", r.tps_model_delta_rel},
        {"fork_model_vs_measured_abs", r.fork_model_delta_abs},
    };
    return j;
}

} // namespace

std::string summary_json(const RunResult& res, const ExperimentConfig& cfg) {
    nlohmann::json j;
    j["note"] = "first " + std::to_string(res.warmup) + " steps discarded as warm-up";
    j["config"] = nlohmann::json::parse(config_summary_json(cfg));
    j["report"] = report_json(res);
    const auto& st = res.stats;
    j["events"] = {
        {"blocks_produced", st.blocks_produced},
        {"fork_steps", st.forks},
        {"deadlock_ties", st.deadlock_ties},
        {"reorgs", st.reorgs},
        {"extra_rounds", st.extra_rounds},
        {"rejects", st.rejects},
        {"undeliverable", st.undeliverable},
        {"faults_injected", st.faults_injected},
        {"in_turn_blocked", st.in_turn_blocked},
    };
    j["beta_tracking_mean_rel_err"] = res.mean_beta_tracking_err;
    const auto& rw = res.rewards;
    j["rewards"] = {
        {"total_fees", rw.total_fees},
        {"final_carry", rw.final_carry},
        {"conservation_ok", rw.conservation_ok()},
        {"fair_max_min_ratio", rw.fairness_ratio_fair()},
        {"direct_max_min_ratio", rw.fairness_ratio_direct()},
    };
    j["committed_steps"] = res.committed_steps;
    return j.dump(2) + "\n";
}

void write_artifacts(const RunResult& res, const ExperimentConfig& cfg, const std::string& dir) {
    std::filesystem::create_directories(dir);
    {
        std::ofstream out(dir + "/trace.ndjson", std::ios::binary);
        if (!out) throw std::runtime_error("cannot write trace.ndjson");
        write_ndjson(out, res.trace);
    }
    write_file(dir + "/steps.csv", steps_csv(res));
    write_file(dir + "/summary.json", summary_json(res, cfg));
    write_file(dir + "/rewards.csv", rewards_csv(res));
}

std::string comparison_json(const std::vector<std::pair<ExperimentConfig, RunResult>>& runs) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& [cfg, res] : runs) {
        nlohmann::json j;
        j["algo"] = to_string(cfg.algo);
        j["config"] = nlohmann::json::parse(config_summary_json(cfg));
        j["report"] = report_json(res);
        j["rewards"] = {{"fair_max_min_ratio", res.rewards.fairness_ratio_fair()},
                        {"direct_max_min_ratio", res.rewards.fairness_ratio_direct()}};
        arr.push_back(std::move(j));
    }
    nlohmann::json root;
    root["runs"] = std::move(arr);
    if (runs.size() >= 2) {
        const auto& base = runs.front().second.report.measured;
        const auto& last = runs.back().second.report.measured;
        nlohmann::json v;
        if (base.tps > 0) v["tps_ratio_last_vs_first"] = last.tps / base.tps;
        if (base.mean_block_bytes > 0)
            v["block_size_ratio_last_vs_first"] = last.mean_block_bytes / base.mean_block_bytes;
        if (base.mean_b_ms > 0)
            v["broadcast_ratio_last_vs_first"] = last.mean_b_ms / base.mean_b_ms;
        root["versus"] = std::move(v);
    }
    return root.dump(2) + "\n";
}

std::string comparison_table(const std::vector<std::pair<ExperimentConfig, RunResult>>& runs) {
    std::ostringstream os;
    os << std::left << std::setw(12) << "algo" << std::right << std::setw(10) << "tps"
       << std::setw(10) << "p_f" << std::setw(8) << "p0" << std::setw(8) << "p1" << std::setw(8)
       << "p2" << std::setw(8) << "p3" << std::setw(14) << "blk_bytes" << std::setw(10) << "b_ms"
       << std::setw(12) << "fair_ratio" << '\n';
    for (const auto& [cfg, res] : runs) {
        const auto& m = res.report.measured;
        os << std::left << std::setw(12) << to_string(cfg.algo) << std::right << std::fixed
           << std::setprecision(1) << std::setw(10) << m.tps << std::setprecision(3)
           << std::setw(10) << m.fork_rate << std::setw(8) << m.rates.p0 << std::setw(8)
           << m.rates.p1 << std::setw(8) << m.rates.p2 << std::setw(8) << m.rates.p3
           << std::setprecision(0) << std::setw(14) << m.mean_block_bytes << std::setprecision(1)
           << std::setw(10) << m.mean_b_ms << std::setprecision(2) << std::setw(12)
           << res.rewards.fairness_ratio_fair() << '\n';
    }
    return os.str();
}

} // namespace exclique
