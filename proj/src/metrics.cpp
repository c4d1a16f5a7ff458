#include "volbench/metrics.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>

#include "volbench/util.hpp"

namespace volbench {

namespace {

/// Decodes UTF-8 into scalar values; invalid bytes pass through one at a time.
std::vector<std::uint32_t> to_scalars(const std::string& s) {
    std::vector<std::uint32_t> out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        unsigned char c = static_cast<unsigned char>(s[i]);
        std::size_t extra = c < 0x80 ? 0 : (c >> 5) == 0x6 ? 1 : (c >> 4) == 0xE ? 2 : (c >> 3) == 0x1E ? 3 : 0;
        if (extra == 0 || i + extra >= s.size()) {
            out.push_back(c);
            ++i;
            continue;
        }
        std::uint32_t cp = c & (0x3F >> extra);
        bool valid = true;
        for (std::size_t k = 1; k <= extra; ++k) {
            unsigned char cc = static_cast<unsigned char>(s[i + k]);
            if ((cc & 0xC0) != 0x80) {
                valid = false;
                break;
            }
            cp = (cp << 6) | (cc & 0x3F);
        }
        if (!valid) {
            out.push_back(c);
            ++i;
        } else {
            out.push_back(cp);
            i += extra + 1;
        }
    }
    return out;
}

}  // namespace

std::size_t edit_distance(const std::string& a, const std::string& b) {
    std::vector<std::uint32_t> x = to_scalars(a);
    std::vector<std::uint32_t> y = to_scalars(b);
    if (x.empty()) return y.size();
    if (y.empty()) return x.size();

    std::vector<std::size_t> costs(y.size() + 1);
    std::iota(costs.begin(), costs.end(), std::size_t{0});
    for (std::size_t i = 0; i < x.size(); ++i) {
        std::size_t corner = costs[0];
        costs[0] = i + 1;
        for (std::size_t j = 0; j < y.size(); ++j) {
            std::size_t upper = costs[j + 1];
            if (x[i] == y[j]) {
                costs[j + 1] = corner;
            } else {
                costs[j + 1] = std::min({upper, corner, costs[j]}) + 1;
            }
            corner = upper;
        }
    }
    return costs.back();
}

double lexical_volatility(const std::vector<std::string>& outputs) {
    if (outputs.size() < 2) {
        throw ValidationError("lexical_volatility needs at least 2 outputs, got " +
                              std::to_string(outputs.size()));
    }
    std::vector<double> lengths;
    lengths.reserve(outputs.size());
    for (const auto& s : outputs) {
        lengths.push_back(std::max<std::size_t>(to_scalars(s).size(), 1));
    }
    double sum = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < outputs.size(); ++i) {
        for (std::size_t j = i + 1; j < outputs.size(); ++j) {
            double d = static_cast<double>(edit_distance(outputs[i], outputs[j]));
            sum += d / lengths[i] + d / lengths[j];
            ++pairs;
        }
    }
    return sum / static_cast<double>(pairs);
}

double feed_range(const std::vector<int>& labels) {
    if (labels.size() < 2) {
        throw ValidationError("feed_range needs at least 2 runs, got " +
                              std::to_string(labels.size()));
    }
    auto [lo, hi] = std::minmax_element(labels.begin(), labels.end());
    return static_cast<double>(*hi - *lo);
}

std::vector<TickerDayScore> ticker_day_scores(const std::vector<FeedSentiment>& feed,
                                              const std::vector<Headline>& headlines) {
    std::map<std::string, const Headline*> by_id;
    for (const auto& h : headlines) by_id[h.id] = &h;

    // (ticker, date, temperature, run) -> (sum, count)
    std::map<std::tuple<std::string, Date, double, int>, std::pair<double, int>> acc;
    for (const auto& f : feed) {
        auto it = by_id.find(f.headline_id);
        if (it == by_id.end()) {
            throw ValidationError("feed sentiment references unknown headline " + f.headline_id);
        }
        const Headline& h = *it->second;
        for (const auto& ticker : h.tickers) {
            auto& slot = acc[{ticker, h.effective_date, f.temperature, f.run_index}];
            slot.first += f.label;
            slot.second += 1;
        }
    }
    std::vector<TickerDayScore> out;
    out.reserve(acc.size());
    for (const auto& [key, sum_count] : acc) {
        out.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key), std::get<3>(key),
                       sum_count.first / sum_count.second});
    }
    return out;
}

std::vector<VolatilityRow> corpus_volatility_report(
    const std::vector<FeedSentiment>& feed, const std::vector<TickerDayScore>& scores,
    const std::map<std::pair<std::string, double>, std::vector<std::string>>& outputs_by_headline,
    const std::vector<double>& temperatures) {
    std::vector<VolatilityRow> rows;
    for (double t : temperatures) {
        VolatilityRow row;
        row.temperature = t;

        // Lexical: per-headline pairwise distance mean, then corpus mean.
        double lex_sum = 0.0;
        std::size_t lex_n = 0;
        for (const auto& [key, outputs] : outputs_by_headline) {
            if (key.second != t || outputs.size() < 2) continue;
            lex_sum += lexical_volatility(outputs);
            ++lex_n;
        }
        row.lexical_mean = lex_n ? lex_sum / lex_n : 0.0;

        // Feed-level: range of labels across runs per headline.
        std::map<std::string, std::vector<int>> labels_by_headline;
        for (const auto& f : feed) {
            if (f.temperature == t) labels_by_headline[f.headline_id].push_back(f.label);
        }
        double feed_sum = 0.0;
        std::size_t feed_n = 0;
        for (const auto& [id, labels] : labels_by_headline) {
            if (labels.size() < 2) continue;
            feed_sum += feed_range(labels);
            ++feed_n;
        }
        row.feed_range_mean = feed_n ? feed_sum / feed_n : 0.0;

        // Ticker-level: range of the per-run ticker-day score.
        std::map<std::pair<std::string, Date>, std::pair<double, double>> minmax;
        for (const auto& s : scores) {
            if (s.temperature != t) continue;
            auto [it, inserted] = minmax.insert({{s.ticker, s.date}, {s.score, s.score}});
            if (!inserted) {
                it->second.first = std::min(it->second.first, s.score);
                it->second.second = std::max(it->second.second, s.score);
            }
        }
        double ticker_sum = 0.0;
        for (const auto& [key, mm] : minmax) ticker_sum += mm.second - mm.first;
        row.ticker_range_mean = minmax.empty() ? 0.0 : ticker_sum / minmax.size();

        rows.push_back(row);
    }
    return rows;
}

void write_volatility_csv(const std::vector<VolatilityRow>& rows, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write volatility report: " + path);
    out << "temperature,metric,level,value\n";
    char buf[64];
    auto emit = [&](double t, const char* metric, const char* level, double value) {
        std::snprintf(buf, sizeof(buf), "%s,%s,%s,%.12g\n", format_temperature(t).c_str(),
                      metric, level, value);
        out << buf;
    };
    for (const auto& r : rows) {
        emit(r.temperature, "lexical_mean", "feed", r.lexical_mean);
        emit(r.temperature, "semantic_range_mean", "feed", r.feed_range_mean);
        emit(r.temperature, "semantic_range_mean", "ticker", r.ticker_range_mean);
    }
}

}  // namespace volbench
