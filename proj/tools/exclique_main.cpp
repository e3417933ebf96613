// Experiment runner for the ExClique consensus simulator.
//
//   exclique run     --algo exclique --nodes 21 --m 950 --steps 600 --out out/
//   exclique run     --config exp.conf --sweep m=950,2850,4750
//   exclique compare --algos clique,exclique --nodes 21 --steps 300 --out cmp/
//   exclique model   --nodes 21 --m 8550

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "exclique/artifacts.hpp"
#include "exclique/config.hpp"
#include "exclique/runner.hpp"

using namespace exclique;

namespace {

struct CommonFlags {
    std::string config_path;
    std::string algo;
    uint32_t nodes = 0;
    uint64_t m = 0;
    uint64_t steps = 0;
    int64_t seed = -1;
    std::string out;
    std::vector<std::string> sets;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--config", f.config_path, "config file (key=value lines or flat JSON)");
    cmd->add_option("--algo", f.algo, "clique | clique-bcb | exclique");
    cmd->add_option("--nodes", f.nodes, "consensus node count n");
    cmd->add_option("--m", f.m, "block capacity (transactions)");
    cmd->add_option("--steps", f.steps, "committed steps to simulate");
    cmd->add_option("--seed", f.seed, "rng seed");
    cmd->add_option("--out", f.out, "output directory");
    cmd->add_option("--set", f.sets, "extra key=value override (repeatable)")->take_all();
}

ExperimentConfig build_config(const CommonFlags& f) {
    ExperimentConfig cfg;
    if (!f.config_path.empty()) cfg = parse_config_file(f.config_path);
    else cfg.apply_algo_preset();
    if (!f.algo.empty()) apply_key(cfg, "algo", f.algo, "--algo");
    if (f.nodes) apply_key(cfg, "n", std::to_string(f.nodes), "--nodes");
    if (f.m) apply_key(cfg, "m", std::to_string(f.m), "--m");
    if (f.steps) apply_key(cfg, "steps", std::to_string(f.steps), "--steps");
    if (f.seed >= 0) apply_key(cfg, "seed", std::to_string(f.seed), "--seed");
    for (const auto& kv : f.sets) {
        const size_t eq = kv.find('=');
        if (eq == std::string::npos) throw ConfigError("--set needs key=value, got '" + kv + "'");
        apply_key(cfg, kv.substr(0, eq), kv.substr(eq + 1), "--set " + kv);
        if (kv.substr(0, eq) == "w_ms") cfg.w_explicit = true;
    }
    if (!f.out.empty()) cfg.out_dir = f.out;
    finalize_config(cfg);
    return cfg;
}

void print_run_line(const ExperimentConfig& cfg, const RunResult& res) {
    const auto& m = res.report.measured;
    std::cout << to_string(cfg.algo) << " n=" << cfg.sim.proto.n << " m=" << cfg.sim.proto.m
              << " steps=" << res.committed_steps << "  tps=" << m.tps
              << "  p_f=" << m.fork_rate << "  p=(" << m.rates.p0 << "," << m.rates.p1 << ","
              << m.rates.p2 << "," << m.rates.p3 << ")  blk=" << m.mean_block_bytes
              << "B  b=" << m.mean_b_ms << "ms\n";
}

int cmd_run(const CommonFlags& f, const std::string& sweep) {
    ExperimentConfig cfg = build_config(f);
    if (sweep.empty()) {
        RunResult res = run_simulation(cfg.sim);
        write_artifacts(res, cfg, cfg.out_dir);
        print_run_line(cfg, res);
        std::cout << "artifacts in " << cfg.out_dir << "/\n";
        return 0;
    }
    const size_t eq = sweep.find('=');
    if (eq == std::string::npos) throw ConfigError("--sweep needs KEY=V1,V2,...");
    const std::string key = sweep.substr(0, eq);
    std::vector<std::string> values;
    {
        std::stringstream ss(sweep.substr(eq + 1));
        std::string item;
        while (std::getline(ss, item, ',')) values.push_back(item);
    }
    if (values.empty()) throw ConfigError("--sweep has no values");
    for (const auto& v : values) {
        ExperimentConfig point = cfg;
        apply_key(point, key, v, "--sweep " + key);
        finalize_config(point);
        RunResult res = run_simulation(point.sim);
        const std::string dir = cfg.out_dir + "/" + key + "-" + v;
        write_artifacts(res, point, dir);
        print_run_line(point, res);
    }
    std::cout << "sweep artifacts in " << cfg.out_dir << "/\n";
    return 0;
}

int cmd_compare(const CommonFlags& f, const std::string& algos_csv) {
    std::vector<std::string> algos;
    std::stringstream ss(algos_csv);
    std::string item;
    while (std::getline(ss, item, ',')) algos.push_back(item);
    if (algos.size() < 2) throw ConfigError("--algos needs at least two entries");

    std::vector<std::pair<ExperimentConfig, RunResult>> runs;
    for (const auto& a : algos) {
        CommonFlags fa = f;
        fa.algo = a;
        ExperimentConfig cfg = build_config(fa);
        RunResult res = run_simulation(cfg.sim);
        write_artifacts(res, cfg, cfg.out_dir + "/" + a);
        runs.emplace_back(std::move(cfg), std::move(res));
    }
    const std::string base = runs.front().first.out_dir;
    std::ofstream out(base + "/comparison.json", std::ios::binary);
    out << comparison_json(runs);
    std::cout << comparison_table(runs);
    std::cout << "comparison in " << base << "/comparison.json\n";
    return 0;
}

int cmd_model(uint32_t n, uint64_t m, double t_b, const std::string& algo) {
    ExperimentConfig cfg;
    if (!algo.empty()) {
        cfg.algo = algo_from(algo);
        cfg.apply_algo_preset();
    }
    cfg.sim.proto.n = n;
    cfg.sim.proto.t_b = t_b;
    cfg.sim.proto.m = m;
    finalize_config(cfg);
    const auto& p = cfg.sim.proto;

    const StepCostModel mdl = make_step_cost_model(cfg.sim);
    const auto ms = find_m_star([&](uint64_t mm) { return mdl.f_ms(mm); }, p.t_b);
    const double d1 = delta1_ms(p.n, p.w);
    const double ce = cond_exp_delta_ms(p.n, p.w, 200'000);
    std::cout << "n=" << p.n << " t_b=" << p.t_b << "ms w=" << p.w << "ms mode="
              << to_string(p.pcb_mode) << "\n"
              << "m*        = " << (ms.feasible ? std::to_string(ms.m_star) : "infeasible") << "\n"
              << "lambda0   = " << lambda0(static_cast<double>(ms.m_star), p.t_b) << " tx/s\n"
              << "delta1    = " << d1 << " ms\n"
              << "lambda1   = " << lambda1(static_cast<double>(ms.m_star), p.t_b, d1) << " tx/s\n"
              << "cond_exp  = " << ce << " ms\n"
              << "lambda3   = " << 0.5 * static_cast<double>(ms.m_star) * 1000.0 / (p.t_b + ce)
              << " tx/s\n";
    const double b = mdl.b_ms(m);
    const double v = p.cost.verify_ms(m);
    const double ps = fork_prob_single(b, v, p.w);
    std::cout << "at m=" << m << ": b_model=" << b << "ms v=" << v << "ms p_s=" << ps
              << " p_f=" << fork_prob(ps, p.n) << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"ExClique consensus simulator"};
    app.require_subcommand(1);

    CommonFlags run_flags;
    std::string sweep;
    auto* run = app.add_subcommand("run", "run one experiment (or a sweep)");
    add_common(run, run_flags);
    run->add_option("--sweep", sweep, "KEY=V1,V2,... run once per value");

    CommonFlags cmp_flags;
    std::string algos = "clique,exclique";
    auto* cmp = app.add_subcommand("compare", "run several algorithms on the same seed/workload");
    add_common(cmp, cmp_flags);
    cmp->add_option("--algos", algos, "comma-separated algorithm list");

    uint32_t model_n = 21;
    uint64_t model_m = 950;
    double model_tb = 3000;
    std::string model_algo = "clique";
    auto* model = app.add_subcommand("model", "print closed-form model values");
    model->add_option("--nodes", model_n, "consensus node count");
    model->add_option("--m", model_m, "block capacity");
    model->add_option("--t-b", model_tb, "step duration, ms");
    model->add_option("--algo", model_algo, "algorithm preset for the cost model");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(run_flags, sweep);
        if (cmp->parsed()) return cmd_compare(cmp_flags, algos);
        if (model->parsed()) return cmd_model(model_n, model_m, model_tb, model_algo);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
