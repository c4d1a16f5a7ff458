#pragma once

#include <map>
#include <string>
#include <vector>

#include "volbench/gateway.hpp"
#include "volbench/metrics.hpp"
#include "volbench/parser.hpp"
#include "volbench/prompt.hpp"
#include "volbench/strategy.hpp"

namespace volbench {

struct ParsedResponses {
    std::vector<FeedSentiment> feed;
    /// (headline_id, temperature) -> the k per-run output fragments, run order.
    std::map<std::pair<std::string, double>, std::vector<std::string>> outputs_by_headline;
};

/// Routes each response back through its PromptJob: single-style responses
/// attach whole, batch responses are split by index first.
ParsedResponses parse_responses(const std::vector<PromptJob>& jobs,
                                const std::vector<LlmResponse>& responses);

void write_labels_csv(const std::vector<FeedSentiment>& feed, const std::string& path);
std::vector<FeedSentiment> read_labels_csv(const std::string& path);

/// Deterministic planted label in {-1, 0, +1} for synthetic runs without an
/// explicit label file.
int planted_label_for(const std::string& headline_id, std::uint64_t seed);

void write_backtest_daily_csv(const BacktestResult& result, const std::string& path);
void write_backtest_summary_csv(const std::vector<BacktestResult>& results,
                                const std::string& path);

}  // namespace volbench
