#include "volbench/parser.hpp"

#include <cctype>
#include <cstdlib>

namespace volbench {

namespace {

struct Token {
    std::string text;        // lowercased
    std::size_t end_offset;  // byte offset one past the token
};

std::vector<Token> tokenize_lower(const std::string& s) {
    std::vector<Token> tokens;
    std::string cur;
    for (std::size_t i = 0; i <= s.size(); ++i) {
        char c = i < s.size() ? s[i] : ' ';
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '\'') {
            cur.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        } else if (!cur.empty()) {
            tokens.push_back({cur, i});
            cur.clear();
        }
    }
    return tokens;
}

bool negated(const std::vector<Token>& tokens, std::size_t i) {
    // "not" within the three preceding tokens ("not at all negative").
    for (std::size_t back = 1; back <= 3 && back <= i; ++back) {
        if (tokens[i - back].text == "not") return true;
    }
    return false;
}

/// First float in [0, 1] at or after byte offset `from`; no regex, one pass.
std::optional<double> find_confidence(const std::string& s, std::size_t from) {
    std::size_t i = from;
    while (i < s.size()) {
        bool starts_number = std::isdigit(static_cast<unsigned char>(s[i])) ||
                             (s[i] == '.' && i + 1 < s.size() &&
                              std::isdigit(static_cast<unsigned char>(s[i + 1])));
        if (!starts_number) {
            ++i;
            continue;
        }
        std::size_t j = i;
        bool seen_dot = false;
        while (j < s.size() && (std::isdigit(static_cast<unsigned char>(s[j])) ||
                                (s[j] == '.' && !seen_dot))) {
            if (s[j] == '.') seen_dot = true;
            ++j;
        }
        double value = std::strtod(s.substr(i, j - i).c_str(), nullptr);
        if (value >= 0.0 && value <= 1.0) return value;
        i = j;
    }
    return std::nullopt;
}

}  // namespace

LabelResult extract_label(const std::string& fragment) {
    auto tokens = tokenize_lower(fragment);

    std::optional<std::size_t> neg_negative, neg_positive;  // negated occurrences
    std::optional<std::size_t> bare_positive, bare_negative, neutral;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const std::string& t = tokens[i].text;
        if (t.rfind("positive", 0) == 0) {
            if (negated(tokens, i)) {
                if (!neg_positive) neg_positive = i;
            } else if (!bare_positive) {
                bare_positive = i;
            }
        } else if (t.rfind("negative", 0) == 0) {
            if (negated(tokens, i)) {
                if (!neg_negative) neg_negative = i;
            } else if (!bare_negative) {
                bare_negative = i;
            }
        } else if (t.rfind("neutral", 0) == 0) {
            if (!neutral) neutral = i;
        }
    }

    int label = 0;
    std::optional<std::size_t> anchor;
    if (neg_negative) {
        label = 1;
        anchor = neg_negative;
    } else if (neg_positive) {
        label = -1;
        anchor = neg_positive;
    } else if (bare_positive && bare_negative) {
        label = 0;  // both labels un-negated: ambiguous
    } else if (bare_positive) {
        label = 1;
        anchor = bare_positive;
    } else if (bare_negative) {
        label = -1;
        anchor = bare_negative;
    } else if (neutral) {
        label = 0;
        anchor = neutral;
    }

    LabelResult out;
    out.label = label;
    if (anchor) out.confidence = find_confidence(fragment, tokens[*anchor].end_offset);
    return out;
}

std::map<std::string, std::string> split_batch(const std::string& raw_text,
                                               const std::vector<std::string>& expected_ids,
                                               BatchCoverage* coverage) {
    std::map<std::string, std::string> fragments;
    for (const auto& id : expected_ids) fragments[id] = "";

    std::vector<bool> assigned(expected_ids.size(), false);
    std::vector<int> duplicates;
    std::size_t pos = 0;
    while (pos <= raw_text.size()) {
        std::size_t eol = raw_text.find('\n', pos);
        std::string line = raw_text.substr(pos, eol == std::string::npos ? eol : eol - pos);
        pos = eol == std::string::npos ? raw_text.size() + 1 : eol + 1;

        std::size_t i = 0;
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
        std::size_t digits_start = i;
        while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) ++i;
        if (i == digits_start || i >= line.size()) continue;
        if (line[i] != '.' && line[i] != ')' && line[i] != ':') continue;
        int index = std::atoi(line.substr(digits_start, i - digits_start).c_str());
        if (index < 1 || static_cast<std::size_t>(index) > expected_ids.size()) continue;
        ++i;
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
        std::string fragment = line.substr(i);
        while (!fragment.empty() && (fragment.back() == '\r' || fragment.back() == ' ')) {
            fragment.pop_back();
        }
        if (assigned[index - 1]) {
            duplicates.push_back(index);  // first occurrence wins
            continue;
        }
        assigned[index - 1] = true;
        fragments[expected_ids[index - 1]] = fragment;
    }

    if (coverage) {
        coverage->duplicate_indexes = std::move(duplicates);
        coverage->missing_indexes.clear();
        for (std::size_t k = 0; k < assigned.size(); ++k) {
            if (!assigned[k]) coverage->missing_indexes.push_back(static_cast<int>(k + 1));
        }
    }
    return fragments;
}

}  // namespace volbench
