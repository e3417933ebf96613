#include "exclique/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "exclique/pcb.hpp"
#include "exclique/rng.hpp"

namespace exclique {

const char* to_string(StepCase c) {
    switch (c) {
        case StepCase::Normal: return "normal";
        case StepCase::Exc1: return "exc1";
        case StepCase::Exc2: return "exc2";
        case StepCase::Exc3: return "exc3";
    }
    return "?";
}

const char* to_string(CommittedKind k) {
    switch (k) {
        case CommittedKind::InTurn: return "InTurn";
        case CommittedKind::NoTurn: return "NoTurn";
        case CommittedKind::Empty: return "Empty";
    }
    return "?";
}

double cond_exp_delta_ms(uint32_t n, double w_ms, uint64_t samples, uint64_t seed) {
    const uint32_t k = (n + 1) / 2 - 1;
    if (k == 0 || w_ms <= 0) return 0.0;
    Rng rng(seed);
    auto draw_min = [&]() {
        double mn = w_ms;
        for (uint32_t i = 0; i < k; ++i) mn = std::min(mn, rng.uniform(0.0, w_ms));
        return mn;
    };
    double sum = 0;
    uint64_t count = 0;
    for (uint64_t i = 0; i < samples; ++i) {
        const double prev = draw_min();
        const double cur = draw_min();
        if (cur >= prev) {
            sum += cur - prev;
            ++count;
        }
    }
    return count == 0 ? 0.0 : sum / static_cast<double>(count);
}

double lambda3(double m_star, double t_b_ms, uint32_t n, double w_ms) {
    const double ce = cond_exp_delta_ms(n, w_ms);
    return 0.5 * m_star * 1000.0 / (t_b_ms + ce);
}

double expected_tps(const CaseRates& p, double lambda0_tps, double d1_ms, double cond_exp_ms,
                    double t_b_ms) {
    if (t_b_ms <= 0) return 0;
    const double l1 = lambda0_tps / (1.0 + d1_ms / t_b_ms);
    const double l3 = 0.5 * lambda0_tps / (1.0 + cond_exp_ms / t_b_ms);
    return p.p0 * lambda0_tps + p.p1 * l1 + p.p3 * l3;
}

double fork_prob_single(double b_ms, double v_ms, double w_ms) {
    if (w_ms <= 0) return 1.0;
    return std::clamp((b_ms + v_ms) / w_ms, 0.0, 1.0);
}

double fork_prob(double p_s, uint32_t n) {
    const uint32_t k = (n + 1) / 2 - 1;
    return std::clamp(1.0 - std::pow(1.0 - std::clamp(p_s, 0.0, 1.0), static_cast<double>(k)), 0.0,
                      1.0);
}

double fork_prob_accurate(double b_ms, double v_ms, double beta_ms, double w_ms, uint32_t n) {
    if (w_ms <= 0) return 1.0;
    const double p = std::clamp((b_ms + v_ms - beta_ms) / w_ms, 0.0, 1.0);
    return fork_prob(p, n);
}

MStarResult find_m_star(const std::function<double(uint64_t)>& f_ms, double t_b_ms,
                        uint64_t m_cap) {
    MStarResult res;
    if (f_ms(0) > t_b_ms) return res; // no feasible m
    res.feasible = true;
    uint64_t lo = 0, hi = 1;
    while (hi < m_cap && f_ms(hi) <= t_b_ms) {
        lo = hi;
        hi *= 2;
    }
    hi = std::min(hi, m_cap);
    // invariant: f(lo) <= t_b < f(hi) (unless capped)
    if (f_ms(hi) <= t_b_ms) {
        res.m_star = hi;
        return res;
    }
    while (hi - lo > 1) {
        const uint64_t mid = lo + (hi - lo) / 2;
        if (f_ms(mid) <= t_b_ms) lo = mid;
        else hi = mid;
    }
    res.m_star = lo;
    return res;
}

StepCostModel make_step_cost_model(const SimConfig& cfg) {
    StepCostModel mdl;
    mdl.cost = cfg.proto.cost;
    const uint32_t n = cfg.proto.n;
    // Expected maximum of n-1 uniform link delays.
    mdl.max_base_ms = cfg.link.delay_min_ms + (cfg.link.delay_max_ms - cfg.link.delay_min_ms) *
                                                  (static_cast<double>(n - 1) / n);
    mdl.bandwidth_bps = cfg.link.bandwidth_bps;
    const double full_tx = kTxLenPrefix + std::max(cfg.workload.tx_payload, kTxFixedFields);
    switch (cfg.proto.pcb_mode) {
        case PcbMode::FullBlock: mdl.per_tx_wire_bytes = full_tx; break;
        case PcbMode::Bcb: mdl.per_tx_wire_bytes = kShortIdWireBytes; break;
        case PcbMode::Pcb:
            mdl.per_tx_wire_bytes = (1.0 - cfg.workload.miss_rate) * kShortIdWireBytes +
                                    cfg.workload.miss_rate * full_tx;
            break;
    }
    return mdl;
}

ClassifiedTrace classify_trace(const std::vector<TraceRec>& trace, Step warmup_steps) {
    struct Produced {
        const TraceRec* rec;
    };
    std::unordered_map<std::string, Produced> by_id;
    std::unordered_map<Step, uint32_t> per_step;
    std::unordered_map<std::string, double> b_by_id;
    std::string final_id;
    std::string genesis_id;
    Step final_step = 0;
    bool has_final = false;

    for (const auto& r : trace) {
        switch (r.kind) {
            case TraceRec::Kind::Produce:
                by_id.emplace(r.id, Produced{&r});
                ++per_step[r.step];
                break;
            case TraceRec::Kind::BcastDone: b_by_id[r.id] = r.b_ms; break;
            case TraceRec::Kind::Genesis: genesis_id = r.id; break;
            case TraceRec::Kind::Final:
                final_id = r.id;
                final_step = r.step;
                has_final = true;
                break;
            default: break;
        }
    }
    if (!has_final) throw MalformedTrace("no final record");
    if (genesis_id.empty()) throw MalformedTrace("no genesis record");

    // Walk the committed chain from the final head back to genesis.
    std::vector<const TraceRec*> chain;
    std::string cur = final_id;
    while (cur != genesis_id) {
        auto it = by_id.find(cur);
        if (it == by_id.end()) throw MalformedTrace("committed block '" + cur + "' has no produce record");
        chain.push_back(it->second.rec);
        cur = it->second.rec->id2;
    }
    std::reverse(chain.begin(), chain.end());
    if (chain.size() != final_step)
        throw MalformedTrace("committed chain length disagrees with final step");

    ClassifiedTrace out;
    out.steps.reserve(chain.size());
    CommittedKind prev = CommittedKind::InTurn; // genesis anchors as in-turn family
    for (const TraceRec* pr : chain) {
        StepRecord sr;
        sr.step = pr->step;
        sr.tx_count = pr->tx_count;
        sr.x_ms = pr->x_ms;
        sr.v_ms = pr->v_ms;
        sr.r_ms = pr->r_ms;
        sr.a_ms = pr->a_ms;
        sr.block_id = pr->id;
        sr.t_committed = pr->t;
        auto itb = b_by_id.find(pr->id);
        sr.b_ms = itb == b_by_id.end() ? -1.0 : itb->second;
        if (pr->block_kind == BlockKind::NoTurn) sr.kind = CommittedKind::NoTurn;
        else sr.kind = pr->tx_count > 0 ? CommittedKind::InTurn : CommittedKind::Empty;

        const bool prev_in_turn_family = prev != CommittedKind::NoTurn;
        if (sr.kind == CommittedKind::NoTurn)
            sr.step_case = prev_in_turn_family ? StepCase::Exc1 : StepCase::Exc3;
        else if (!prev_in_turn_family || sr.kind == CommittedKind::Empty)
            sr.step_case = StepCase::Exc2;
        else
            sr.step_case = StepCase::Normal;
        sr.fork = per_step[sr.step] >= 2;
        prev = sr.kind;
        out.steps.push_back(std::move(sr));
    }

    // Measured statistics over steps past the warmup.
    MeasuredStats& ms = out.measured;
    ms.warmup = warmup_steps;
    double t0 = 0;
    double t1 = 0;
    double bytes_sum = 0;
    double b_sum = 0, bv_sum = 0;
    uint64_t b_count = 0;
    uint64_t cases[4] = {0, 0, 0, 0};
    uint64_t forks = 0;
    for (const TraceRec* pr : chain) {
        if (pr->step == warmup_steps) t0 = pr->t;
    }
    for (size_t i = 0; i < out.steps.size(); ++i) {
        const StepRecord& sr = out.steps[i];
        if (sr.step <= warmup_steps) continue;
        ++ms.steps_classified;
        ++cases[static_cast<int>(sr.step_case)];
        if (sr.fork) ++forks;
        ms.committed_txs += sr.tx_count;
        bytes_sum += static_cast<double>(chain[i]->bytes);
        if (sr.b_ms >= 0) {
            b_sum += sr.b_ms;
            bv_sum += sr.b_ms + sr.v_ms;
            ++b_count;
        }
        t1 = sr.t_committed;
    }
    if (ms.steps_classified > 0) {
        const double total = static_cast<double>(ms.steps_classified);
        ms.rates = CaseRates{cases[0] / total, cases[1] / total, cases[2] / total, cases[3] / total};
        ms.fork_rate = forks / total;
        ms.mean_block_bytes = bytes_sum / total;
        if (b_count > 0) {
            ms.mean_b_ms = b_sum / static_cast<double>(b_count);
            ms.mean_bv_ms = bv_sum / static_cast<double>(b_count);
        }
        ms.span_ms = t1 - t0;
        if (ms.span_ms > 0) ms.tps = static_cast<double>(ms.committed_txs) * 1000.0 / ms.span_ms;
    }
    return out;
}

AnalyticsReport build_report(const ClassifiedTrace& ct, const SimConfig& cfg, double mean_beta_ms) {
    AnalyticsReport rep;
    rep.measured = ct.measured;
    const auto& proto = cfg.proto;

    const StepCostModel mdl = make_step_cost_model(cfg);
    const MStarResult ms = find_m_star([&](uint64_t m) { return mdl.f_ms(m); }, proto.t_b);
    rep.m_star = ms.m_star;
    rep.m_star_feasible = ms.feasible;

    rep.d1_ms = delta1_ms(proto.n, proto.w);
    rep.cond_exp_ms = cond_exp_delta_ms(proto.n, proto.w, 200'000);
    rep.lambda0_run = lambda0(static_cast<double>(proto.m), proto.t_b);
    rep.lambda0_mstar = lambda0(static_cast<double>(ms.m_star), proto.t_b);
    rep.lambda1_tps = lambda1(static_cast<double>(ms.m_star), proto.t_b, rep.d1_ms);
    rep.lambda3_tps = 0.5 * static_cast<double>(ms.m_star) * 1000.0 / (proto.t_b + rep.cond_exp_ms);
    rep.eq7_expected_tps =
        expected_tps(ct.measured.rates, rep.lambda0_run, rep.d1_ms, rep.cond_exp_ms, proto.t_b);

    const double b = ct.measured.mean_b_ms;
    const double v = proto.cost.verify_ms(proto.m);
    rep.model_p_s = fork_prob_single(b, v, proto.w);
    rep.model_p_f = fork_prob(rep.model_p_s, proto.n);
    rep.mean_beta_ms = mean_beta_ms;
    rep.model_p_f_accurate = fork_prob_accurate(b, v, mean_beta_ms, proto.w, proto.n);

    if (ct.measured.tps > 0)
        rep.tps_model_delta_rel = (rep.eq7_expected_tps - ct.measured.tps) / ct.measured.tps;
    const double model_pf =
        proto.delay_mode == DelayMode::Accurate ? rep.model_p_f_accurate : rep.model_p_f;
    rep.fork_model_delta_abs = model_pf - ct.measured.fork_rate;
    return rep;
}

} // namespace exclique
