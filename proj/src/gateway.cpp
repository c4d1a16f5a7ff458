#include "volbench/gateway.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <nlohmann/json.hpp>
#include <random>
#include <sstream>
#include <thread>

#include "volbench/digest.hpp"

namespace volbench {

namespace fs = std::filesystem;
using json = nlohmann::json;

std::string format_temperature(double t) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", t);
    return buf;
}

std::string prompt_hash(const std::string& prompt_text) {
    return sha256_hex(prompt_text);
}

std::string response_set_digest(const std::vector<LlmResponse>& responses) {
    std::vector<std::string> lines;
    lines.reserve(responses.size());
    for (const auto& r : responses) {
        lines.push_back(r.prompt_hash + "|" + format_temperature(r.temperature) + "|" +
                        std::to_string(r.run_index) + "|" + sha256_hex(r.raw_text));
    }
    std::sort(lines.begin(), lines.end());
    std::string all;
    for (const auto& l : lines) {
        all += l;
        all += '\n';
    }
    return sha256_hex(all);
}

namespace {

std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

double unit_uniform(std::mt19937_64& rng) {
    // 53-bit mantissa draw; avoids implementation-defined distributions.
    return static_cast<double>(rng() >> 11) * (1.0 / 9007199254740992.0);
}

fs::path cache_file(const RunConfig& config, const std::string& hash, double temperature,
                    int run_index) {
    return fs::path(config.cache_dir) / config.provider / config.model /
           ("t" + format_temperature(temperature)) / ("run" + std::to_string(run_index)) /
           (hash + ".json");
}

std::optional<LlmResponse> read_cached(const fs::path& path) {
    std::ifstream in(path);
    if (!in) return std::nullopt;
    json rec;
    try {
        in >> rec;
    } catch (const json::exception&) {
        return std::nullopt;  // truncated write from an interrupted run; re-query
    }
    LlmResponse r;
    r.prompt_hash = rec.at("prompt_hash").get<std::string>();
    r.temperature = rec.at("temperature").get<double>();
    r.run_index = rec.at("run_index").get<int>();
    r.raw_text = rec.at("raw_text").get<std::string>();
    r.provider = rec.at("provider").get<std::string>();
    r.model = rec.at("model").get<std::string>();
    r.created_at = rec.at("created_at").get<std::string>();
    return r;
}

void write_cached(const fs::path& path, const LlmResponse& r) {
    fs::create_directories(path.parent_path());
    json rec;
    rec["prompt_hash"] = r.prompt_hash;
    rec["temperature"] = r.temperature;
    rec["run_index"] = r.run_index;
    rec["raw_text"] = r.raw_text;
    rec["provider"] = r.provider;
    rec["model"] = r.model;
    rec["created_at"] = r.created_at;
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp);
        out << rec.dump();
    }
    fs::rename(tmp, path);
}

std::string now_rfc3339() {
    auto now = std::chrono::system_clock::now();
    return Timestamp{std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch())
                         .count()}
        .to_rfc3339_utc();
}

}  // namespace

RateLimiter::RateLimiter(double per_minute, Clock clock, std::function<void(int)> sleep_fn)
    : per_minute_(per_minute), clock_(std::move(clock)), sleep_(std::move(sleep_fn)) {}

void RateLimiter::acquire() {
    for (;;) {
        std::int64_t now = clock_();
        issued_.erase(std::remove_if(issued_.begin(), issued_.end(),
                                     [&](std::int64_t t) { return t <= now - 60000; }),
                      issued_.end());
        if (static_cast<double>(issued_.size()) < per_minute_) {
            issued_.push_back(now);
            return;
        }
        std::int64_t oldest = *std::min_element(issued_.begin(), issued_.end());
        sleep_(static_cast<int>(std::max<std::int64_t>(1, oldest + 60000 - now)));
    }
}

GridResult execute_grid(const std::vector<PromptJob>& jobs, const RunConfig& config,
                        Provider& provider, std::function<void(int)> sleep_fn) {
    if (config.temperatures.empty()) throw ValidationError("RunConfig.temperatures is empty");
    if (config.repetitions < 1) throw ValidationError("RunConfig.repetitions must be >= 1");
    if (!sleep_fn) {
        sleep_fn = [](int ms) { std::this_thread::sleep_for(std::chrono::milliseconds(ms)); };
    }

    struct Cell {
        const PromptJob* job;
        double temperature;
        int run_index;
        std::string hash;
    };
    std::vector<Cell> cells;
    for (const auto& job : jobs) {
        std::string hash = prompt_hash(job.prompt_text);
        for (double t : config.temperatures) {
            for (int r = 0; r < config.repetitions; ++r) {
                cells.push_back({&job, t, r, hash});
            }
        }
    }

    GridResult result;
    std::mutex mu;
    std::mutex limiter_mu;
    RateLimiter limiter(
        config.rate_limit_per_minute,
        [] {
            return std::chrono::duration_cast<std::chrono::milliseconds>(
                       std::chrono::steady_clock::now().time_since_epoch())
                .count();
        },
        sleep_fn);
    std::atomic<std::size_t> next{0};

    auto worker = [&] {
        std::mt19937_64 jitter_rng(std::random_device{}());
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= cells.size()) return;
            const Cell& cell = cells[i];
            fs::path path = cache_file(config, cell.hash, cell.temperature, cell.run_index);
            if (auto cached = read_cached(path)) {
                std::lock_guard lock(mu);
                result.responses.push_back(std::move(*cached));
                ++result.cache_hits;
                continue;
            }
            std::string text;
            std::string last_error;
            bool ok = false;
            for (int attempt = 0; attempt <= config.max_retries; ++attempt) {
                if (attempt > 0) {
                    int base = std::min(60000, 1000 << (attempt - 1));
                    int delay = base + static_cast<int>(unit_uniform(jitter_rng) * base);
                    sleep_fn(std::min(delay, 60000));
                    std::lock_guard lock(mu);
                    ++result.retries;
                }
                try {
                    if (provider.is_network()) {
                        std::lock_guard lock(limiter_mu);
                        limiter.acquire();
                    }
                    text = provider.generate(*cell.job, cell.temperature, cell.run_index);
                    ok = true;
                    break;
                } catch (const std::exception& e) {
                    last_error = e.what();
                }
            }
            {
                std::lock_guard lock(mu);
                result.provider_calls += 1;
            }
            if (!ok) {
                std::lock_guard lock(mu);
                result.failures.push_back(
                    {cell.hash, cell.temperature, cell.run_index, last_error});
                continue;
            }
            LlmResponse r;
            r.prompt_hash = cell.hash;
            r.temperature = cell.temperature;
            r.run_index = cell.run_index;
            r.raw_text = std::move(text);
            r.provider = config.provider;
            r.model = config.model;
            r.created_at = now_rfc3339();
            write_cached(path, r);
            std::lock_guard lock(mu);
            result.responses.push_back(std::move(r));
        }
    };

    int workers = std::max(1, config.max_in_flight);
    std::vector<std::thread> pool;
    for (int i = 0; i < workers; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    auto key = [](const LlmResponse& r) {
        return std::tuple(r.prompt_hash, r.temperature, r.run_index);
    };
    std::sort(result.responses.begin(), result.responses.end(),
              [&](const LlmResponse& a, const LlmResponse& b) { return key(a) < key(b); });
    std::sort(result.failures.begin(), result.failures.end(), [](const auto& a, const auto& b) {
        return std::tie(a.prompt_hash, a.temperature, a.run_index) <
               std::tie(b.prompt_hash, b.temperature, b.run_index);
    });
    return result;
}

void write_failure_manifest(const std::vector<FailedQuery>& failures, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write failure manifest: " + path);
    for (const auto& f : failures) {
        json rec;
        rec["prompt_hash"] = f.prompt_hash;
        rec["temperature"] = f.temperature;
        rec["run_index"] = f.run_index;
        rec["error"] = f.error;
        out << rec.dump() << "\n";
    }
}

// -- ReplayProvider ----------------------------------------------------------

ReplayProvider::ReplayProvider(std::map<Key, std::string> archive)
    : archive_(std::move(archive)) {}

ReplayProvider ReplayProvider::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open replay archive: " + path);
    json arr;
    in >> arr;
    std::map<Key, std::string> archive;
    for (const auto& rec : arr) {
        archive[{rec.at("prompt_hash").get<std::string>(),
                 format_temperature(rec.at("temperature").get<double>()),
                 rec.at("run_index").get<int>()}] = rec.at("raw_text").get<std::string>();
    }
    return ReplayProvider(std::move(archive));
}

std::string ReplayProvider::generate(const PromptJob& job, double temperature, int run_index) {
    Key key{prompt_hash(job.prompt_text), format_temperature(temperature), run_index};
    auto it = archive_.find(key);
    if (it == archive_.end()) {
        throw ReplayMissError("replay miss for (" + std::get<0>(key) + ", t=" +
                              std::get<1>(key) + ", run=" + std::to_string(run_index) + ")");
    }
    return it->second;
}

// -- SyntheticProvider -------------------------------------------------------

SyntheticProvider::SyntheticProvider(double epsilon, std::uint64_t seed,
                                     std::map<std::string, int> planted_labels)
    : epsilon_(epsilon), seed_(seed), planted_(std::move(planted_labels)) {
    if (epsilon < 0.0 || epsilon > 1.0) {
        throw ValidationError("synthetic noise epsilon must be in [0, 1]");
    }
}

std::string SyntheticProvider::canonical_phrasing(int label) {
    switch (label) {
        case 1:
            return "POSITIVE (0.90)";
        case -1:
            return "NEGATIVE (0.90)";
        default:
            return "NEUTRAL (0.50)";
    }
}

const std::vector<std::pair<std::string, int>>& SyntheticProvider::variant_bank() {
    static const std::vector<std::pair<std::string, int>> bank = {
        {"positive (0.8)", 1},
        {"The sentiment here is clearly positive.", 1},
        {"This is not negative at all.", 1},
        {"negative (0.8)", -1},
        {"Overall tone reads negative to me.", -1},
        {"Certainly not positive.", -1},
        {"neutral (0.5)", 0},
        {"Mixed signals, hard to call it positive or negative.", 0},
        {"I cannot determine the sentiment from this text.", 0},
        {"The text is ambiguous.", 0},
    };
    return bank;
}

std::string SyntheticProvider::phrase_for(const std::string& headline_id, double temperature,
                                          int run_index) const {
    auto it = planted_.find(headline_id);
    if (it == planted_.end()) {
        throw ValidationError("synthetic provider: no planted label for headline " + headline_id);
    }
    std::string key = std::to_string(seed_) + "|" + headline_id + "|" +
                      format_temperature(temperature) + "|" + std::to_string(run_index);
    std::mt19937_64 rng(fnv1a64(key));
    if (unit_uniform(rng) < 1.0 - epsilon_) return canonical_phrasing(it->second);
    const auto& bank = variant_bank();
    return bank[rng() % bank.size()].first;
}

std::string SyntheticProvider::generate(const PromptJob& job, double temperature, int run_index) {
    if (job.style == PromptStyle::Single) {
        return phrase_for(job.headline_ids.at(0), temperature, run_index);
    }
    std::ostringstream out;
    for (std::size_t i = 0; i < job.headline_ids.size(); ++i) {
        if (i > 0) out << "\n";
        out << (i + 1) << ". " << phrase_for(job.headline_ids[i], temperature, run_index);
    }
    return out.str();
}

}  // namespace volbench
