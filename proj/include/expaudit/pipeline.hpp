#pragma once

#include <nlohmann/json.hpp>

#include <string>

#include "expaudit/expert_test.hpp"
#include "expaudit/io.hpp"

namespace expaudit::pipeline {

// Ties ingest -> scale -> match -> test family -> adjust into one
// reproducible run. The machine-readable report is deterministic: identical
// (inputs, config, seed) produce byte-identical JSON.
nlohmann::ordered_json run_pipeline(const io::PipelineConfig& config);

// Aligned plain-text table per intervention and direction, adjusted p-values
// starred when below alpha.
std::string human_summary(const nlohmann::ordered_json& report);

// Swap-count table: intervention, action count, decrease/increase/neutral
// swap classifications.
std::string swap_table(const nlohmann::ordered_json& report);

// Report fragments reused by the audit/match subcommands.
nlohmann::ordered_json match_json(const matching::PairSet& pairs,
                                  const matching::MatchQualityReport& quality);
nlohmann::ordered_json family_json(const expert_test::FamilyResult& family,
                                   const std::vector<std::string>& action_names, int k);

}  // namespace expaudit::pipeline
