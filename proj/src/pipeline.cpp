#include "volbench/pipeline.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "volbench/digest.hpp"

namespace volbench {

ParsedResponses parse_responses(const std::vector<PromptJob>& jobs,
                                const std::vector<LlmResponse>& responses) {
    std::map<std::string, const PromptJob*> by_hash;
    for (const auto& job : jobs) by_hash[prompt_hash(job.prompt_text)] = &job;

    ParsedResponses out;
    for (const auto& r : responses) {
        auto it = by_hash.find(r.prompt_hash);
        if (it == by_hash.end()) {
            throw ValidationError("response " + r.prompt_hash.substr(0, 12) +
                                  " matches no rendered prompt");
        }
        const PromptJob& job = *it->second;
        std::map<std::string, std::string> fragments;
        if (job.style == PromptStyle::Single) {
            fragments[job.headline_ids.at(0)] = r.raw_text;
        } else {
            fragments = split_batch(r.raw_text, job.headline_ids);
        }
        for (const auto& id : job.headline_ids) {
            const std::string& fragment = fragments.at(id);
            LabelResult label = extract_label(fragment);
            FeedSentiment f;
            f.headline_id = id;
            f.temperature = r.temperature;
            f.run_index = r.run_index;
            f.label = label.label;
            f.confidence = label.confidence;
            f.raw_fragment = fragment;
            out.feed.push_back(std::move(f));

            auto& runs = out.outputs_by_headline[{id, r.temperature}];
            if (runs.size() <= static_cast<std::size_t>(r.run_index)) {
                runs.resize(r.run_index + 1);
            }
            runs[r.run_index] = fragment;
        }
    }
    return out;
}

void write_labels_csv(const std::vector<FeedSentiment>& feed, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write labels file: " + path);
    out << "headline_id,temperature,run,label,confidence\n";
    char buf[64];
    for (const auto& f : feed) {
        out << f.headline_id << "," << format_temperature(f.temperature) << "," << f.run_index
            << "," << f.label << ",";
        if (f.confidence) {
            std::snprintf(buf, sizeof(buf), "%g", *f.confidence);
            out << buf;
        }
        out << "\n";
    }
}

std::vector<FeedSentiment> read_labels_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open labels file: " + path);
    std::vector<FeedSentiment> out;
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (row == 1 || line.empty()) continue;
        std::istringstream ss(line);
        std::string id, temp, run, label, conf;
        if (!std::getline(ss, id, ',') || !std::getline(ss, temp, ',') ||
            !std::getline(ss, run, ',') || !std::getline(ss, label, ',')) {
            throw ParseError("labels row " + std::to_string(row) + ": malformed");
        }
        std::getline(ss, conf);
        FeedSentiment f;
        f.headline_id = id;
        f.temperature = std::stod(temp);
        f.run_index = std::stoi(run);
        f.label = std::stoi(label);
        if (!conf.empty()) f.confidence = std::stod(conf);
        out.push_back(std::move(f));
    }
    return out;
}

int planted_label_for(const std::string& headline_id, std::uint64_t seed) {
    std::string digest = sha256_hex(std::to_string(seed) + ":" + headline_id);
    unsigned v = static_cast<unsigned>(std::stoul(digest.substr(0, 4), nullptr, 16));
    return static_cast<int>(v % 3) - 1;
}

void write_backtest_daily_csv(const BacktestResult& result, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write backtest file: " + path);
    out << "date,daily_return,cum_return\n";
    char buf[96];
    double cum = 1.0;
    for (const auto& [date, r] : result.daily_returns) {
        cum *= 1.0 + r;
        std::snprintf(buf, sizeof(buf), "%s,%.12g,%.12g\n", date.to_string().c_str(), r,
                      cum - 1.0);
        out << buf;
    }
}

void write_backtest_summary_csv(const std::vector<BacktestResult>& results,
                                const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write backtest summary: " + path);
    out << "temperature,run,total_return,sharpe\n";
    char buf[96];
    for (const auto& r : results) {
        std::snprintf(buf, sizeof(buf), "%s,%d,%.12g,%.12g\n",
                      format_temperature(r.temperature).c_str(), r.run_index, r.total_return,
                      r.sharpe);
        out << buf;
    }
}

}  // namespace volbench
