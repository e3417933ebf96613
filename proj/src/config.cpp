#include "exclique/config.hpp"

#include <nlohmann/json.hpp>

#include <charconv>
#include <fstream>
#include <sstream>

#include "exclique/params.hpp"

namespace exclique {

const char* to_string(Algo a) {
    switch (a) {
        case Algo::Clique: return "clique";
        case Algo::CliqueBcb: return "clique-bcb";
        case Algo::ExClique: return "exclique";
    }
    return "?";
}

Algo algo_from(const std::string& s) {
    if (s == "clique") return Algo::Clique;
    if (s == "clique-bcb" || s == "bcb") return Algo::CliqueBcb;
    if (s == "exclique") return Algo::ExClique;
    throw ConfigError("unknown algo '" + s + "' (clique | clique-bcb | exclique)");
}

void ExperimentConfig::apply_algo_preset() {
    switch (algo) {
        case Algo::Clique:
            sim.proto.order_mode = OrderMode::Fixed;
            sim.proto.delay_mode = DelayMode::Naive;
            sim.proto.pcb_mode = PcbMode::FullBlock;
            break;
        case Algo::CliqueBcb:
            sim.proto.order_mode = OrderMode::Fixed;
            sim.proto.delay_mode = DelayMode::Naive;
            sim.proto.pcb_mode = PcbMode::Bcb;
            break;
        case Algo::ExClique:
            sim.proto.order_mode = OrderMode::Differential;
            sim.proto.delay_mode = DelayMode::Accurate;
            sim.proto.pcb_mode = PcbMode::Pcb;
            break;
    }
}

namespace {

double parse_f(const std::string& v, const std::string& ctx) {
    try {
        size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing");
        return d;
    } catch (const std::exception&) {
        throw ConfigError(ctx + ": expected a number, got '" + v + "'");
    }
}

uint64_t parse_u(const std::string& v, const std::string& ctx) {
    uint64_t out = 0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size())
        throw ConfigError(ctx + ": expected a non-negative integer, got '" + v + "'");
    return out;
}

bool parse_b(const std::string& v, const std::string& ctx) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError(ctx + ": expected a boolean, got '" + v + "'");
}

std::vector<Step> parse_step_list(const std::string& v, const std::string& ctx) {
    std::vector<Step> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        out.push_back(parse_u(item, ctx));
    }
    return out;
}

} // namespace

void apply_key(ExperimentConfig& cfg, const std::string& key, const std::string& value,
               const std::string& ctx) {
    auto& p = cfg.sim.proto;
    if (key == "algo") {
        cfg.algo = algo_from(value);
        cfg.apply_algo_preset();
    } else if (key == "n")
        p.n = static_cast<uint32_t>(parse_u(value, ctx));
    else if (key == "t_b_ms")
        p.t_b = parse_f(value, ctx);
    else if (key == "w_ms")
        p.w = parse_f(value, ctx);
    else if (key == "m")
        p.m = parse_u(value, ctx);
    else if (key == "order_mode") {
        if (value == "fixed") p.order_mode = OrderMode::Fixed;
        else if (value == "differential") p.order_mode = OrderMode::Differential;
        else throw ConfigError(ctx + ": order_mode is 'fixed' or 'differential'");
    } else if (key == "delay_mode") {
        if (value == "naive") p.delay_mode = DelayMode::Naive;
        else if (value == "accurate") p.delay_mode = DelayMode::Accurate;
        else throw ConfigError(ctx + ": delay_mode is 'naive' or 'accurate'");
    } else if (key == "pcb_mode") {
        if (value == "full") p.pcb_mode = PcbMode::FullBlock;
        else if (value == "bcb") p.pcb_mode = PcbMode::Bcb;
        else if (value == "pcb") p.pcb_mode = PcbMode::Pcb;
        else throw ConfigError(ctx + ": pcb_mode is 'full', 'bcb' or 'pcb'");
    } else if (key == "ewma_alpha")
        p.ewma_alpha = parse_f(value, ctx);
    else if (key == "cost.v0") p.cost.v0 = parse_f(value, ctx);
    else if (key == "cost.v1") p.cost.v1 = parse_f(value, ctx);
    else if (key == "cost.r0") p.cost.r0 = parse_f(value, ctx);
    else if (key == "cost.r1") p.cost.r1 = parse_f(value, ctx);
    else if (key == "cost.a0") p.cost.a0 = parse_f(value, ctx);
    else if (key == "cost.a1") p.cost.a1 = parse_f(value, ctx);
    else if (key == "link.delay_min_ms") cfg.sim.link.delay_min_ms = parse_f(value, ctx);
    else if (key == "link.delay_max_ms") cfg.sim.link.delay_max_ms = parse_f(value, ctx);
    else if (key == "link.bandwidth_bps") cfg.sim.link.bandwidth_bps = parse_f(value, ctx);
    else if (key == "link.loss_min") cfg.sim.link.loss_min = parse_f(value, ctx);
    else if (key == "link.loss_max") cfg.sim.link.loss_max = parse_f(value, ctx);
    else if (key == "link.max_retries") cfg.sim.link.max_retries = static_cast<uint32_t>(parse_u(value, ctx));
    else if (key == "workload.tx_payload") cfg.sim.workload.tx_payload = static_cast<uint32_t>(parse_u(value, ctx));
    else if (key == "workload.miss_rate") cfg.sim.workload.miss_rate = parse_f(value, ctx);
    else if (key == "workload.late_factor") cfg.sim.workload.late_factor = parse_f(value, ctx);
    else if (key == "workload.fee_min") cfg.sim.workload.fee_min = parse_u(value, ctx);
    else if (key == "workload.fee_max") cfg.sim.workload.fee_max = parse_u(value, ctx);
    else if (key == "workload.batch_factor") cfg.sim.workload.batch_factor = parse_f(value, ctx);
    else if (key == "fault.fail_prob") cfg.sim.fault.fail_prob = parse_f(value, ctx);
    else if (key == "fault.fail_period") cfg.sim.fault.fail_period = parse_u(value, ctx);
    else if (key == "fault.fail_steps") cfg.sim.fault.fail_steps = parse_step_list(value, ctx);
    else if (key == "cbf.counters_per_item") cfg.sim.cbf.counters_per_item = static_cast<uint32_t>(parse_u(value, ctx));
    else if (key == "cbf.hashes") cfg.sim.cbf.hashes = static_cast<uint8_t>(parse_u(value, ctx));
    else if (key == "cbf.counter_bits") cfg.sim.cbf.counter_bits = static_cast<uint8_t>(parse_u(value, ctx));
    else if (key == "cbf.expected_pool_factor") cfg.sim.cbf.expected_pool_factor = parse_f(value, ctx);
    else if (key == "seed") cfg.sim.seed = parse_u(value, ctx);
    else if (key == "steps") cfg.sim.steps = parse_u(value, ctx);
    else if (key == "verbose_trace") cfg.sim.verbose_trace = parse_b(value, ctx);
    else if (key == "out") cfg.out_dir = value;
    else throw ConfigError(ctx + ": unknown key '" + key + "'");
}

void finalize_config(ExperimentConfig& cfg) {
    auto& p = cfg.sim.proto;
    if (p.n < 4 || p.n > 101)
        throw ConfigError("n must be within [4, 101], got " + std::to_string(p.n));
    if (p.t_b <= 0) throw ConfigError("t_b_ms must be positive");
    if (cfg.sim.workload.fee_max < cfg.sim.workload.fee_min)
        throw ConfigError("workload.fee_max below workload.fee_min");
    if (cfg.sim.link.delay_max_ms < cfg.sim.link.delay_min_ms)
        throw ConfigError("link.delay_max_ms below link.delay_min_ms");
    if (cfg.sim.workload.miss_rate < 0 || cfg.sim.workload.miss_rate > 1)
        throw ConfigError("workload.miss_rate must be within [0, 1]");
    if (!cfg.w_explicit) p.w = default_delay_bound_ms(p.n);
}

ExperimentConfig parse_config_text(const std::string& text, const std::string& origin) {
    ExperimentConfig cfg;
    cfg.apply_algo_preset();

    // JSON form: a flat object keyed like the key=value format.
    std::string_view sv(text);
    size_t first = sv.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && sv[first] == '{') {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(text);
        } catch (const nlohmann::json::parse_error& e) {
            throw ConfigError(origin + ": " + e.what());
        }
        // Algo first so explicit keys can override its preset.
        if (j.contains("algo")) apply_key(cfg, "algo", j["algo"].get<std::string>(), origin);
        for (const auto& [key, val] : j.items()) {
            if (key == "algo") continue;
            std::string v = val.is_string() ? val.get<std::string>() : val.dump();
            apply_key(cfg, key, v, origin + ": key '" + key + "'");
            if (key == "w_ms") cfg.w_explicit = true;
        }
        finalize_config(cfg);
        return cfg;
    }

    std::stringstream ss(text);
    std::string line;
    size_t lineno = 0;
    std::vector<std::tuple<std::string, std::string, size_t>> pairs;
    while (std::getline(ss, line)) {
        ++lineno;
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        const size_t eq = line.find('=');
        auto trim = [](std::string s) {
            const size_t b = s.find_first_not_of(" \t\r");
            const size_t e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        const std::string stripped = trim(line);
        if (stripped.empty()) continue;
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected 'key = value'");
        pairs.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)), lineno);
    }
    for (const auto& [k, v, ln] : pairs)
        if (k == "algo") apply_key(cfg, k, v, origin + ":" + std::to_string(ln));
    for (const auto& [k, v, ln] : pairs) {
        if (k == "algo") continue;
        apply_key(cfg, k, v, origin + ":" + std::to_string(ln));
        if (k == "w_ms") cfg.w_explicit = true;
    }
    finalize_config(cfg);
    return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), path);
}

std::string config_summary_json(const ExperimentConfig& cfg) {
    nlohmann::json j;
    j["algo"] = to_string(cfg.algo);
    j["n"] = cfg.sim.proto.n;
    j["t_b_ms"] = cfg.sim.proto.t_b;
    j["w_ms"] = cfg.sim.proto.w;
    j["m"] = cfg.sim.proto.m;
    j["order_mode"] = to_string(cfg.sim.proto.order_mode);
    j["delay_mode"] = to_string(cfg.sim.proto.delay_mode);
    j["pcb_mode"] = to_string(cfg.sim.proto.pcb_mode);
    j["steps"] = cfg.sim.steps;
    j["seed"] = cfg.sim.seed;
    j["workload"] = {{"tx_payload", cfg.sim.workload.tx_payload},
                     {"miss_rate", cfg.sim.workload.miss_rate}};
    j["link"] = {{"bandwidth_bps", cfg.sim.link.bandwidth_bps},
                 {"delay_max_ms", cfg.sim.link.delay_max_ms},
                 {"loss_max", cfg.sim.link.loss_max}};
    return j.dump(2);
}

} // namespace exclique
