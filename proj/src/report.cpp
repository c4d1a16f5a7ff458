#include "volbench/report.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "volbench/util.hpp"

namespace volbench {

using json = nlohmann::json;

ExperimentSummary build_summary(const std::vector<VolatilityRow>& volatility,
                                const std::string& volatility_digest,
                                const std::vector<RepetitionStats>& strategy,
                                const std::string& strategy_digest,
                                const nlohmann::json& config_snapshot,
                                const std::vector<double>& temperatures,
                                std::size_t failure_count, const std::string& provider,
                                const std::string& model) {
    if (!strategy.empty() && volatility_digest != strategy_digest) {
        throw ConsistencyError("volatility and strategy stats come from different response sets (" +
                               volatility_digest.substr(0, 12) + " vs " +
                               strategy_digest.substr(0, 12) + ")");
    }
    ExperimentSummary s;
    s.config_snapshot = config_snapshot;
    s.volatility = volatility;
    s.strategy = strategy;
    s.failure_count = failure_count;
    s.provider = provider;
    s.model = model;
    s.cache_digest = volatility_digest;
    for (double t : temperatures) {
        bool in_vol = std::any_of(volatility.begin(), volatility.end(),
                                  [&](const VolatilityRow& r) { return r.temperature == t; });
        bool in_strat = std::any_of(strategy.begin(), strategy.end(),
                                    [&](const RepetitionStats& r) { return r.temperature == t; });
        if (!in_vol || !in_strat) s.partial = true;
    }
    return s;
}

json summary_to_json(const ExperimentSummary& s) {
    json j;
    j["schema_version"] = 1;
    j["config"] = s.config_snapshot;
    j["provenance"] = {{"provider", s.provider},
                       {"model", s.model},
                       {"cache_digest", s.cache_digest},
                       {"failure_count", s.failure_count}};
    j["partial"] = s.partial;
    j["volatility"] = json::array();
    for (const auto& r : s.volatility) {
        j["volatility"].push_back({{"temperature", r.temperature},
                                   {"lexical_mean", r.lexical_mean},
                                   {"feed_range_mean", r.feed_range_mean},
                                   {"ticker_range_mean", r.ticker_range_mean}});
    }
    j["strategy"] = json::array();
    for (const auto& r : s.strategy) {
        j["strategy"].push_back({{"temperature", r.temperature},
                                 {"n", r.n},
                                 {"mean_total_return", r.mean_total_return},
                                 {"std_total_return", r.std_total_return},
                                 {"mean_sharpe", r.mean_sharpe},
                                 {"std_sharpe", r.std_sharpe},
                                 {"single_run", r.single_run}});
    }
    return j;
}

ExperimentSummary summary_from_json(const json& j) {
    ExperimentSummary s;
    s.config_snapshot = j.at("config");
    s.provider = j.at("provenance").at("provider").get<std::string>();
    s.model = j.at("provenance").at("model").get<std::string>();
    s.cache_digest = j.at("provenance").at("cache_digest").get<std::string>();
    s.failure_count = j.at("provenance").at("failure_count").get<std::size_t>();
    s.partial = j.at("partial").get<bool>();
    for (const auto& r : j.at("volatility")) {
        s.volatility.push_back({r.at("temperature").get<double>(),
                                r.at("lexical_mean").get<double>(),
                                r.at("feed_range_mean").get<double>(),
                                r.at("ticker_range_mean").get<double>()});
    }
    for (const auto& r : j.at("strategy")) {
        RepetitionStats st;
        st.temperature = r.at("temperature").get<double>();
        st.n = r.at("n").get<int>();
        st.mean_total_return = r.at("mean_total_return").get<double>();
        st.std_total_return = r.at("std_total_return").get<double>();
        st.mean_sharpe = r.at("mean_sharpe").get<double>();
        st.std_sharpe = r.at("std_sharpe").get<double>();
        st.single_run = r.at("single_run").get<bool>();
        s.strategy.push_back(st);
    }
    return s;
}

void write_strategy_stats_csv(const std::vector<RepetitionStats>& stats, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write strategy stats: " + path);
    out << "temperature,n,mean_total_return,std_total_return,mean_sharpe,std_sharpe,flag\n";
    char buf[160];
    for (const auto& s : stats) {
        std::snprintf(buf, sizeof(buf), "%s,%d,%.12g,%.12g,%.12g,%.12g,%s\n",
                      format_temperature(s.temperature).c_str(), s.n, s.mean_total_return,
                      s.std_total_return, s.mean_sharpe, s.std_sharpe,
                      s.single_run ? "single_run" : "");
        out << buf;
    }
}

void emit_summary(const ExperimentSummary& summary, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    {
        std::ofstream out(std::filesystem::path(out_dir) / "summary.json");
        out << summary_to_json(summary).dump(2) << "\n";
    }
    write_volatility_csv(summary.volatility,
                         (std::filesystem::path(out_dir) / "fig1_volatility.csv").string());
    write_strategy_stats_csv(summary.strategy,
                             (std::filesystem::path(out_dir) / "table2_strategy.csv").string());
}

}  // namespace volbench
