#pragma once

#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "volbench/metrics.hpp"
#include "volbench/strategy.hpp"

namespace volbench {

/// Machine-readable experiment summary combining the volatility figure data
/// and the strategy dispersion table, plus provenance.
struct ExperimentSummary {
    nlohmann::json config_snapshot;
    std::vector<VolatilityRow> volatility;
    std::vector<RepetitionStats> strategy;
    std::size_t failure_count = 0;
    std::string provider;
    std::string model;
    std::string cache_digest;
    bool partial = false;  // strategy rows missing for some temperature
};

/// Builds the summary, refusing to mix stages computed from different response
/// sets (the two digests must match).
ExperimentSummary build_summary(const std::vector<VolatilityRow>& volatility,
                                const std::string& volatility_digest,
                                const std::vector<RepetitionStats>& strategy,
                                const std::string& strategy_digest,
                                const nlohmann::json& config_snapshot,
                                const std::vector<double>& temperatures,
                                std::size_t failure_count, const std::string& provider,
                                const std::string& model);

/// Writes summary.json, fig1_volatility.csv, and table2_strategy.csv into
/// `out_dir`. Emission is deterministic: identical inputs give identical bytes.
void emit_summary(const ExperimentSummary& summary, const std::string& out_dir);

void write_strategy_stats_csv(const std::vector<RepetitionStats>& stats, const std::string& path);

nlohmann::json summary_to_json(const ExperimentSummary& summary);
ExperimentSummary summary_from_json(const nlohmann::json& j);

}  // namespace volbench
