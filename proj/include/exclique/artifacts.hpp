#pragma once

#include <string>

#include "exclique/config.hpp"
#include "exclique/runner.hpp"

namespace exclique {

// Writes trace.ndjson, steps.csv, summary.json and rewards.csv under dir
// (created if needed). Artifacts are byte-deterministic for a fixed
// (config, seed).
void write_artifacts(const RunResult& res, const ExperimentConfig& cfg, const std::string& dir);

std::string summary_json(const RunResult& res, const ExperimentConfig& cfg);

// Side-by-side metric table for compare runs.
std::string comparison_json(const std::vector<std::pair<ExperimentConfig, RunResult>>& runs);
std::string comparison_table(const std::vector<std::pair<ExperimentConfig, RunResult>>& runs);

} // namespace exclique
