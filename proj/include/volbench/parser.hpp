#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace volbench {

/// Per-headline, per-run extracted label. Confidence is parsed for fidelity
/// but never consumed downstream.
struct FeedSentiment {
    std::string headline_id;
    double temperature = 0.0;
    int run_index = 0;
    int label = 0;  // -1, 0, +1
    std::optional<double> confidence;
    std::string raw_fragment;
};

struct LabelResult {
    int label = 0;
    std::optional<double> confidence;
};

/// Rule-based matcher. Precedence: "not negative" => +1, "not positive" => -1,
/// bare "positive" => +1, bare "negative" => -1, anything else => 0. "not"
/// must fall within the three tokens before the sentiment word; a fragment
/// with both bare labels un-negated is ambiguous and maps to 0. Confidence is
/// the first float in [0, 1] after the deciding token. Total: every string
/// yields a label.
LabelResult extract_label(const std::string& fragment);

struct BatchCoverage {
    std::vector<int> missing_indexes;    // 1-based, expected but absent
    std::vector<int> duplicate_indexes;  // 1-based, repeated (first kept)
};

/// Splits a batch response on lines starting "<n>." / "<n>)" / "<n>:" and maps
/// the remainder to the n-th expected headline id. Out-of-range indexes are
/// ignored; missing ones map to an empty fragment (label 0 downstream).
std::map<std::string, std::string> split_batch(const std::string& raw_text,
                                               const std::vector<std::string>& expected_ids,
                                               BatchCoverage* coverage = nullptr);

}  // namespace volbench
