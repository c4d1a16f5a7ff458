// Pipeline driver: ingest | query | parse | metrics | backtest | report |
// run-all over a single JSON config. Each stage reads its predecessors' files
// from the output directory, so any stage can be re-run alone.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>

#include "volbench/digest.hpp"
#include "volbench/pipeline.hpp"
#include "volbench/report.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace volbench;

namespace {

// Distinct exit code per failing stage.
enum ExitCode {
    kOk = 0,
    kConfigError = 2,
    kIngestError = 10,
    kQueryError = 11,
    kParseError = 12,
    kMetricsError = 13,
    kBacktestError = 14,
    kReportError = 15,
};

struct PipelineConfig {
    // paths
    std::string headlines_path;
    std::string prices_path;
    std::string calendar_path;  // optional; weekday fallback otherwise
    std::string cache_dir = "cache";
    std::string output_dir = "out";
    std::string template_path;     // optional; built-in default otherwise
    std::string replay_archive;    // replay provider
    std::string planted_labels;    // optional synthetic label file
    // corpus
    std::set<std::string> universe;
    double prominence_floor = 0.8;
    std::string timezone = "America/New_York";
    int cutoff_minutes = 15 * 60;
    // prompt
    std::string prompt_style = "batch";  // or "single"
    std::size_t batch_size = 50;
    // generation
    RunConfig run;
    double epsilon = 0.2;  // synthetic provider noise
    HttpProviderConfig http;
    // strategy
    SignalConfig signal;
    std::uint64_t seed = 42;

    json snapshot;  // raw config as loaded, for provenance
};

PipelineConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config file: " + path);
    // comments allowed so configs can be annotated
    json j = json::parse(in, nullptr, true, true);

    PipelineConfig c;
    c.snapshot = j;
    const json& paths = j.at("paths");
    c.headlines_path = paths.value("headlines", "");
    c.prices_path = paths.value("prices", "");
    c.calendar_path = paths.value("calendar", "");
    c.cache_dir = paths.value("cache_dir", c.cache_dir);
    c.output_dir = paths.value("output_dir", c.output_dir);
    c.template_path = paths.value("template", "");
    c.replay_archive = paths.value("replay_archive", "");
    c.planted_labels = paths.value("planted_labels", "");

    for (const auto& t : j.value("universe", json::array())) {
        c.universe.insert(t.get<std::string>());
    }
    c.prominence_floor = j.value("prominence_floor", c.prominence_floor);
    c.timezone = j.value("timezone", c.timezone);
    if (j.contains("cutoff_time")) {
        std::string t = j.at("cutoff_time").get<std::string>();  // "HH:MM"
        c.cutoff_minutes = std::stoi(t.substr(0, 2)) * 60 + std::stoi(t.substr(3, 2));
    }
    if (j.contains("prompt")) {
        c.prompt_style = j.at("prompt").value("style", c.prompt_style);
        c.batch_size = j.at("prompt").value("batch_size", c.batch_size);
    }
    if (j.contains("run")) {
        const json& r = j.at("run");
        c.run.provider = r.value("provider", c.run.provider);
        c.run.model = r.value("model", c.run.model);
        if (r.contains("temperatures")) {
            c.run.temperatures = r.at("temperatures").get<std::vector<double>>();
        }
        c.run.repetitions = r.value("repetitions", c.run.repetitions);
        c.run.rate_limit_per_minute = r.value("rate_limit_per_minute", c.run.rate_limit_per_minute);
        c.run.max_retries = r.value("max_retries", c.run.max_retries);
        c.run.max_in_flight = r.value("max_in_flight", c.run.max_in_flight);
        c.epsilon = r.value("epsilon", c.epsilon);
        if (r.contains("http")) {
            const json& h = r.at("http");
            c.http.base_url = h.value("base_url", "");
            c.http.path = h.value("path", c.http.path);
            c.http.auth_env_var = h.value("auth_env_var", "");
            c.http.timeout_seconds = h.value("timeout_seconds", c.http.timeout_seconds);
            c.http.model = c.run.model;
        }
    }
    if (c.run.temperatures.empty()) c.run.temperatures = {0.0, 0.25, 0.5, 1.0};
    c.run.cache_dir = c.cache_dir;
    if (j.contains("signal")) {
        const json& s = j.at("signal");
        c.signal.lookback = s.value("lookback", c.signal.lookback);
        c.signal.long_gross = s.value("long_gross", c.signal.long_gross);
        c.signal.short_gross = s.value("short_gross", c.signal.short_gross);
    }
    c.seed = j.value("seed", c.seed);
    return c;
}

fs::path artifact(const PipelineConfig& c, const std::string& name) {
    return fs::path(c.output_dir) / name;
}

void require_artifact(const PipelineConfig& c, const std::string& name,
                      const std::string& produced_by) {
    if (!fs::exists(artifact(c, name))) {
        throw ValidationError("missing " + artifact(c, name).string() + "; run `volbench " +
                              produced_by + "` first");
    }
}

TradingCalendar load_calendar(const PipelineConfig& c) {
    if (!c.calendar_path.empty()) {
        return TradingCalendar::from_csv(c.calendar_path, c.cutoff_minutes);
    }
    // Documented fallback: every weekday spanning the price file's date range.
    PriceTable prices = ingest_prices(c.prices_path);
    if (prices.empty()) throw ValidationError("cannot derive calendar from empty price file");
    Date first = prices.begin()->first.second, last = first;
    for (const auto& [key, close] : prices) {
        first = std::min(first, key.second);
        last = std::max(last, key.second);
    }
    return TradingCalendar::weekdays(first, last, c.cutoff_minutes);
}

std::vector<PromptJob> render_jobs(const PipelineConfig& c,
                                   const std::vector<Headline>& headlines) {
    if (c.prompt_style == "single") {
        std::string tpl = c.template_path.empty() ? default_single_template()
                                                  : load_template(c.template_path);
        std::vector<PromptJob> jobs;
        jobs.reserve(headlines.size());
        for (const auto& h : headlines) jobs.push_back(render_single(h, tpl));
        return jobs;
    }
    if (c.prompt_style == "batch") {
        std::string tpl = c.template_path.empty() ? default_batch_template()
                                                  : load_template(c.template_path);
        return render_batch(headlines, tpl, c.batch_size);
    }
    throw ValidationError("unknown prompt style '" + c.prompt_style + "' (single|batch)");
}

std::unique_ptr<Provider> make_provider(const PipelineConfig& c,
                                        const std::vector<Headline>& headlines) {
    if (c.run.provider == "replay") {
        if (c.replay_archive.empty()) {
            throw ValidationError("replay provider needs paths.replay_archive");
        }
        return std::make_unique<ReplayProvider>(ReplayProvider::from_json_file(c.replay_archive));
    }
    if (c.run.provider == "synthetic") {
        std::map<std::string, int> planted;
        if (!c.planted_labels.empty()) {
            std::ifstream in(c.planted_labels);
            if (!in) throw ValidationError("cannot open planted labels: " + c.planted_labels);
            json j;
            in >> j;
            for (auto it = j.begin(); it != j.end(); ++it) planted[it.key()] = it->get<int>();
        } else {
            for (const auto& h : headlines) planted[h.id] = planted_label_for(h.id, c.seed);
        }
        return std::make_unique<SyntheticProvider>(c.epsilon, c.seed, std::move(planted));
    }
    if (c.run.provider == "http") {
        return std::make_unique<HttpChatProvider>(c.http);
    }
    throw ValidationError("unknown provider '" + c.run.provider + "' (synthetic|replay|http)");
}

// -- stages ------------------------------------------------------------------

void stage_ingest(const PipelineConfig& c) {
    TradingCalendar calendar = load_calendar(c);
    ExchangeTimezone tz(c.timezone);
    auto headlines =
        ingest_headlines(c.headlines_path, c.universe, c.prominence_floor, calendar, tz);
    PriceTable prices = ingest_prices(c.prices_path, c.calendar_path.empty() ? nullptr : &calendar);
    fs::create_directories(c.output_dir);
    write_headlines_jsonl(headlines, artifact(c, "headlines.canonical.jsonl").string());
    std::cerr << "ingest: " << headlines.size() << " headlines, " << prices.size()
              << " price bars\n";
}

void stage_query(const PipelineConfig& c) {
    require_artifact(c, "headlines.canonical.jsonl", "ingest");
    auto headlines = read_headlines_jsonl(artifact(c, "headlines.canonical.jsonl").string());
    auto jobs = render_jobs(c, headlines);
    auto provider = make_provider(c, headlines);
    GridResult grid = execute_grid(jobs, c.run, *provider);

    json arr = json::array();
    for (const auto& r : grid.responses) {
        arr.push_back({{"prompt_hash", r.prompt_hash},
                       {"temperature", r.temperature},
                       {"run_index", r.run_index},
                       {"raw_text", r.raw_text},
                       {"provider", r.provider},
                       {"model", r.model},
                       {"created_at", r.created_at}});
    }
    {
        std::ofstream out(artifact(c, "responses.json"));
        out << arr.dump() << "\n";
    }
    write_failure_manifest(grid.failures, artifact(c, "failures.jsonl").string());
    {
        std::ofstream out(artifact(c, "responses.digest"));
        out << response_set_digest(grid.responses) << "\n";
    }
    std::cerr << "query: " << grid.responses.size() << " responses (" << grid.cache_hits
              << " cached, " << grid.provider_calls << " provider calls, " << grid.failures.size()
              << " failed)\n";
}

std::vector<LlmResponse> read_responses(const PipelineConfig& c) {
    std::ifstream in(artifact(c, "responses.json"));
    json arr;
    in >> arr;
    std::vector<LlmResponse> out;
    for (const auto& rec : arr) {
        LlmResponse r;
        r.prompt_hash = rec.at("prompt_hash").get<std::string>();
        r.temperature = rec.at("temperature").get<double>();
        r.run_index = rec.at("run_index").get<int>();
        r.raw_text = rec.at("raw_text").get<std::string>();
        r.provider = rec.at("provider").get<std::string>();
        r.model = rec.at("model").get<std::string>();
        r.created_at = rec.at("created_at").get<std::string>();
        out.push_back(std::move(r));
    }
    return out;
}

std::string read_digest(const PipelineConfig& c) {
    std::ifstream in(artifact(c, "responses.digest"));
    std::string digest;
    in >> digest;
    return digest;
}

void stage_parse(const PipelineConfig& c) {
    require_artifact(c, "responses.json", "query");
    require_artifact(c, "headlines.canonical.jsonl", "ingest");
    auto headlines = read_headlines_jsonl(artifact(c, "headlines.canonical.jsonl").string());
    auto jobs = render_jobs(c, headlines);
    auto responses = read_responses(c);
    ParsedResponses parsed = parse_responses(jobs, responses);
    write_labels_csv(parsed.feed, artifact(c, "labels.csv").string());

    json j;
    j["digest"] = read_digest(c);
    j["feed"] = json::array();
    for (const auto& f : parsed.feed) {
        json rec = {{"headline_id", f.headline_id},
                    {"temperature", f.temperature},
                    {"run", f.run_index},
                    {"label", f.label},
                    {"fragment", f.raw_fragment}};
        if (f.confidence) rec["confidence"] = *f.confidence;
        j["feed"].push_back(std::move(rec));
    }
    std::ofstream out(artifact(c, "parsed.json"));
    out << j.dump() << "\n";
    std::cerr << "parse: " << parsed.feed.size() << " feed sentiments\n";
}

struct ParsedArtifact {
    std::string digest;
    std::vector<FeedSentiment> feed;
    std::map<std::pair<std::string, double>, std::vector<std::string>> outputs_by_headline;
};

ParsedArtifact read_parsed(const PipelineConfig& c) {
    std::ifstream in(artifact(c, "parsed.json"));
    json j;
    in >> j;
    ParsedArtifact out;
    out.digest = j.at("digest").get<std::string>();
    for (const auto& rec : j.at("feed")) {
        FeedSentiment f;
        f.headline_id = rec.at("headline_id").get<std::string>();
        f.temperature = rec.at("temperature").get<double>();
        f.run_index = rec.at("run").get<int>();
        f.label = rec.at("label").get<int>();
        if (rec.contains("confidence")) f.confidence = rec.at("confidence").get<double>();
        f.raw_fragment = rec.at("fragment").get<std::string>();
        auto& runs = out.outputs_by_headline[{f.headline_id, f.temperature}];
        if (runs.size() <= static_cast<std::size_t>(f.run_index)) runs.resize(f.run_index + 1);
        runs[f.run_index] = f.raw_fragment;
        out.feed.push_back(std::move(f));
    }
    return out;
}

void stage_metrics(const PipelineConfig& c) {
    require_artifact(c, "parsed.json", "parse");
    require_artifact(c, "headlines.canonical.jsonl", "ingest");
    auto headlines = read_headlines_jsonl(artifact(c, "headlines.canonical.jsonl").string());
    ParsedArtifact parsed = read_parsed(c);
    auto scores = ticker_day_scores(parsed.feed, headlines);
    auto rows = corpus_volatility_report(parsed.feed, scores, parsed.outputs_by_headline,
                                         c.run.temperatures);
    write_volatility_csv(rows, artifact(c, "fig1_volatility.csv").string());
    json j;
    j["digest"] = parsed.digest;
    j["rows"] = json::array();
    for (const auto& r : rows) {
        j["rows"].push_back({{"temperature", r.temperature},
                             {"lexical_mean", r.lexical_mean},
                             {"feed_range_mean", r.feed_range_mean},
                             {"ticker_range_mean", r.ticker_range_mean}});
    }
    std::ofstream out(artifact(c, "volatility.json"));
    out << j.dump() << "\n";
    std::cerr << "metrics: " << rows.size() << " temperature rows\n";
}

void stage_backtest(const PipelineConfig& c) {
    require_artifact(c, "parsed.json", "parse");
    require_artifact(c, "headlines.canonical.jsonl", "ingest");
    auto headlines = read_headlines_jsonl(artifact(c, "headlines.canonical.jsonl").string());
    ParsedArtifact parsed = read_parsed(c);
    TradingCalendar calendar = load_calendar(c);
    PriceTable prices = ingest_prices(c.prices_path);
    auto scores = ticker_day_scores(parsed.feed, headlines);

    std::vector<BacktestResult> results;
    fs::create_directories(artifact(c, "runs"));
    for (double t : c.run.temperatures) {
        for (int run = 0; run < c.run.repetitions; ++run) {
            BacktestResult r = backtest_run(scores, prices, calendar, c.signal, t, run);
            write_backtest_daily_csv(
                r, (artifact(c, "runs") /
                    ("t" + format_temperature(t) + "_run" + std::to_string(run) + ".csv"))
                       .string());
            results.push_back(std::move(r));
        }
    }
    write_backtest_summary_csv(results, artifact(c, "backtest_summary.csv").string());
    auto stats = repetition_stats(results);
    json j;
    j["digest"] = parsed.digest;
    j["stats"] = json::array();
    for (const auto& s : stats) {
        j["stats"].push_back({{"temperature", s.temperature},
                              {"n", s.n},
                              {"mean_total_return", s.mean_total_return},
                              {"std_total_return", s.std_total_return},
                              {"mean_sharpe", s.mean_sharpe},
                              {"std_sharpe", s.std_sharpe},
                              {"single_run", s.single_run}});
    }
    std::ofstream out(artifact(c, "strategy.json"));
    out << j.dump() << "\n";
    std::cerr << "backtest: " << results.size() << " runs\n";
}

void stage_report(const PipelineConfig& c) {
    require_artifact(c, "volatility.json", "metrics");
    require_artifact(c, "strategy.json", "backtest");
    json vol, strat;
    {
        std::ifstream in(artifact(c, "volatility.json"));
        in >> vol;
    }
    {
        std::ifstream in(artifact(c, "strategy.json"));
        in >> strat;
    }
    std::vector<VolatilityRow> rows;
    for (const auto& r : vol.at("rows")) {
        rows.push_back({r.at("temperature").get<double>(), r.at("lexical_mean").get<double>(),
                        r.at("feed_range_mean").get<double>(),
                        r.at("ticker_range_mean").get<double>()});
    }
    std::vector<RepetitionStats> stats;
    for (const auto& r : strat.at("stats")) {
        RepetitionStats s;
        s.temperature = r.at("temperature").get<double>();
        s.n = r.at("n").get<int>();
        s.mean_total_return = r.at("mean_total_return").get<double>();
        s.std_total_return = r.at("std_total_return").get<double>();
        s.mean_sharpe = r.at("mean_sharpe").get<double>();
        s.std_sharpe = r.at("std_sharpe").get<double>();
        s.single_run = r.at("single_run").get<bool>();
        stats.push_back(s);
    }
    std::size_t failures = 0;
    if (fs::exists(artifact(c, "failures.jsonl"))) {
        std::ifstream in(artifact(c, "failures.jsonl"));
        std::string line;
        while (std::getline(in, line)) {
            if (!line.empty()) ++failures;
        }
    }
    ExperimentSummary summary = build_summary(
        rows, vol.at("digest").get<std::string>(), stats, strat.at("digest").get<std::string>(),
        c.snapshot, c.run.temperatures, failures, c.run.provider, c.run.model);
    emit_summary(summary, c.output_dir);
    std::cerr << "report: wrote summary.json, fig1_volatility.csv, table2_strategy.csv\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"LLM sentiment volatility benchmark pipeline"};
    app.require_subcommand(1);

    std::string config_path;
    bool dry_run = false;
    std::string provider_override, style_override;
    double epsilon_override = -1.0;
    std::uint64_t seed_override = 0;
    bool seed_set = false;
    app.add_option("-c,--config", config_path, "pipeline config JSON")->required();
    app.add_flag("--dry-run", dry_run, "print the execution plan and exit");
    app.add_option("--provider", provider_override, "override run.provider");
    app.add_option("--style", style_override, "override prompt.style");
    app.add_option("--epsilon", epsilon_override, "override run.epsilon (synthetic)");
    app.add_option("--seed", seed_override, "override seed")->each([&](const std::string&) {
        seed_set = true;
    });

    std::vector<std::string> stage_names = {"ingest", "query",    "parse",  "metrics",
                                            "backtest", "report", "run-all"};
    for (const auto& name : stage_names) app.add_subcommand(name);

    CLI11_PARSE(app, argc, argv);

    PipelineConfig config;
    try {
        config = load_config(config_path);
        if (!provider_override.empty()) config.run.provider = provider_override;
        if (!style_override.empty()) config.prompt_style = style_override;
        if (epsilon_override >= 0.0) config.epsilon = epsilon_override;
        if (seed_set) config.seed = seed_override;
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    }

    std::string stage = app.get_subcommands().front()->get_name();
    std::vector<std::string> plan =
        stage == "run-all" ? std::vector<std::string>{"ingest", "query", "parse", "metrics",
                                                      "backtest", "report"}
                           : std::vector<std::string>{stage};
    if (dry_run) {
        for (const auto& s : plan) std::cout << s << "\n";
        return kOk;
    }

    for (const auto& s : plan) {
        try {
            if (s == "ingest") stage_ingest(config);
            else if (s == "query") stage_query(config);
            else if (s == "parse") stage_parse(config);
            else if (s == "metrics") stage_metrics(config);
            else if (s == "backtest") stage_backtest(config);
            else if (s == "report") stage_report(config);
        } catch (const std::exception& e) {
            std::cerr << s << " failed: " << e.what() << "\n";
            if (s == "ingest") return kIngestError;
            if (s == "query") return kQueryError;
            if (s == "parse") return kParseError;
            if (s == "metrics") return kMetricsError;
            if (s == "backtest") return kBacktestError;
            return kReportError;
        }
    }
    return kOk;
}
