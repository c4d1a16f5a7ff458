#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "volbench/prompt.hpp"
#include "volbench/util.hpp"

namespace volbench {

struct RunConfig {
    std::vector<double> temperatures;
    int repetitions = 3;
    std::string provider = "synthetic";
    std::string model = "default";
    double rate_limit_per_minute = 60.0;  // network providers only
    int max_retries = 3;
    std::string cache_dir = "cache";
    int max_in_flight = 4;
};

/// One raw generation for a (prompt, temperature, run) triple.
struct LlmResponse {
    std::string prompt_hash;
    double temperature = 0.0;
    int run_index = 0;
    std::string raw_text;
    std::string provider;
    std::string model;
    std::string created_at;
};

struct FailedQuery {
    std::string prompt_hash;
    double temperature = 0.0;
    int run_index = 0;
    std::string error;
};

struct GridResult {
    std::vector<LlmResponse> responses;  // sorted by (prompt_hash, temperature, run)
    std::vector<FailedQuery> failures;
    std::size_t cache_hits = 0;
    std::size_t provider_calls = 0;
    std::size_t retries = 0;
};

class Provider {
public:
    virtual ~Provider() = default;
    virtual std::string name() const = 0;
    /// Must be safe to call from multiple threads. Throws on failure.
    virtual std::string generate(const PromptJob& job, double temperature, int run_index) = 0;
    virtual bool is_network() const { return false; }
};

std::string prompt_hash(const std::string& prompt_text);

/// Order-independent digest of a completed response set; stages downstream of
/// `query` carry it to guard against mixing outputs from different runs.
std::string response_set_digest(const std::vector<LlmResponse>& responses);

/// Runs every (job x temperature x run) cell against the provider, reusing
/// cached responses and persisting each completed cell immediately so an
/// interrupted run resumes where it stopped. Provider errors are retried with
/// exponential backoff; cells that still fail land in the failure manifest and
/// the run continues.
GridResult execute_grid(const std::vector<PromptJob>& jobs, const RunConfig& config,
                        Provider& provider,
                        std::function<void(int /*ms*/)> sleep_fn = {});

void write_failure_manifest(const std::vector<FailedQuery>& failures, const std::string& path);

// -- Providers ---------------------------------------------------------------

/// Serves archived responses byte-exactly; a missing tuple is an error.
class ReplayProvider : public Provider {
public:
    using Key = std::tuple<std::string, std::string, int>;  // (hash, temp-str, run)

    explicit ReplayProvider(std::map<Key, std::string> archive);
    static ReplayProvider from_json_file(const std::string& path);

    std::string name() const override { return "replay"; }
    std::string generate(const PromptJob& job, double temperature, int run_index) override;

private:
    std::map<Key, std::string> archive_;
};

/// Test double emulating output volatility: with probability 1-epsilon emits
/// the canonical phrasing of the planted label, otherwise a random entry from
/// a fixed variant bank. Fully deterministic given (seed, tuple).
class SyntheticProvider : public Provider {
public:
    SyntheticProvider(double epsilon, std::uint64_t seed,
                      std::map<std::string, int> planted_labels);

    std::string name() const override { return "synthetic"; }
    std::string generate(const PromptJob& job, double temperature, int run_index) override;

    static std::string canonical_phrasing(int label);
    /// The (text, label-under-the-parser) variant bank.
    static const std::vector<std::pair<std::string, int>>& variant_bank();

private:
    std::string phrase_for(const std::string& headline_id, double temperature,
                           int run_index) const;

    double epsilon_;
    std::uint64_t seed_;
    std::map<std::string, int> planted_;
};

struct HttpProviderConfig {
    std::string base_url;                  // e.g. "https://api.example.com"
    std::string path = "/v1/chat/completions";
    std::string model;
    std::string auth_env_var;              // token read from env, never persisted
    int timeout_seconds = 60;
};

/// Thin chat-completion adapter; any OpenAI-style JSON endpoint works.
class HttpChatProvider : public Provider {
public:
    explicit HttpChatProvider(HttpProviderConfig config);

    std::string name() const override { return "http"; }
    bool is_network() const override { return true; }
    std::string generate(const PromptJob& job, double temperature, int run_index) override;

private:
    HttpProviderConfig config_;
};

/// Sliding-window limiter: at most `per_minute` acquisitions in any 60 s span.
class RateLimiter {
public:
    using Clock = std::function<std::int64_t()>;  // milliseconds

    RateLimiter(double per_minute, Clock clock, std::function<void(int)> sleep_fn);

    /// Blocks (via the sleep function) until a slot is free, then records it.
    void acquire();

private:
    double per_minute_;
    Clock clock_;
    std::function<void(int)> sleep_;
    std::vector<std::int64_t> issued_;  // timestamps within the last minute
};

}  // namespace volbench
