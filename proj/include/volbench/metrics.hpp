#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "volbench/corpus.hpp"
#include "volbench/parser.hpp"

namespace volbench {

/// Character-level Levenshtein distance with unit costs, counted over Unicode
/// scalar values.
std::size_t edit_distance(const std::string& a, const std::string& b);

/// Mean over all pairs i<j of D_ij/L_i + D_ij/L_j, lengths in Unicode scalar
/// values with an empty string clamped to length 1. Requires k >= 2 outputs.
double lexical_volatility(const std::vector<std::string>& outputs);

/// max - min of the per-run labels. Requires k >= 2.
double feed_range(const std::vector<int>& labels);

/// Mean per-run sentiment for one (ticker, date, temperature, run).
struct TickerDayScore {
    std::string ticker;
    Date date;
    double temperature = 0.0;
    int run_index = 0;
    double score = 0.0;  // in [-1, 1]
};

/// Joins feed labels to headlines and averages per ticker-day-run; a headline
/// tagged with two tickers contributes to both. A label whose headline_id has
/// no headline is an error.
std::vector<TickerDayScore> ticker_day_scores(const std::vector<FeedSentiment>& feed,
                                              const std::vector<Headline>& headlines);

struct VolatilityRow {
    double temperature = 0.0;
    double lexical_mean = 0.0;       // mean per-headline pairwise edit distance
    double feed_range_mean = 0.0;    // mean feed-level score range
    double ticker_range_mean = 0.0;  // mean ticker-level score range
};

/// Per-temperature corpus aggregates: the data behind the volatility figure.
/// `outputs_by_headline` maps (headline_id, temperature) to the k raw output
/// fragments for that headline.
std::vector<VolatilityRow> corpus_volatility_report(
    const std::vector<FeedSentiment>& feed, const std::vector<TickerDayScore>& scores,
    const std::map<std::pair<std::string, double>, std::vector<std::string>>& outputs_by_headline,
    const std::vector<double>& temperatures);

void write_volatility_csv(const std::vector<VolatilityRow>& rows, const std::string& path);

}  // namespace volbench
