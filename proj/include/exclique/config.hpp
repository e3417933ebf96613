#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "exclique/sim_config.hpp"

namespace exclique {

enum class Algo : uint8_t { Clique, CliqueBcb, ExClique };

const char* to_string(Algo a);
Algo algo_from(const std::string& s);

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
    Algo algo = Algo::Clique;
    SimConfig sim;
    std::string out_dir = "out";
    bool w_explicit = false; // w stays the (n-derived) default unless set

    // Applies the algorithm preset's mechanism flags (order/delay/pcb).
    void apply_algo_preset();
};

// Recognized keys for the key=value format, JSON configs and --set flags.
// Throws ConfigError with the offending key on unknown keys or bad values.
void apply_key(ExperimentConfig& cfg, const std::string& key, const std::string& value,
               const std::string& context);

// A config file is either `key = value` lines (# comments) or a flat JSON
// object with the same keys; errors carry file:line context.
ExperimentConfig parse_config_file(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text, const std::string& origin);

// Fills derived defaults (w from n, warmup) after all keys are applied.
void finalize_config(ExperimentConfig& cfg);

std::string config_summary_json(const ExperimentConfig& cfg);

} // namespace exclique
