#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include <cstdlib>
#include <nlohmann/json.hpp>

#include "volbench/gateway.hpp"

namespace volbench {

using json = nlohmann::json;

HttpChatProvider::HttpChatProvider(HttpProviderConfig config) : config_(std::move(config)) {
    if (config_.base_url.empty()) throw ValidationError("http provider: base_url is required");
}

std::string HttpChatProvider::generate(const PromptJob& job, double temperature,
                                       int /*run_index*/) {
    httplib::Client client(config_.base_url);
    client.set_read_timeout(config_.timeout_seconds, 0);
    client.set_connection_timeout(config_.timeout_seconds, 0);

    httplib::Headers headers;
    if (!config_.auth_env_var.empty()) {
        const char* token = std::getenv(config_.auth_env_var.c_str());
        if (!token) {
            throw ValidationError("http provider: env var " + config_.auth_env_var + " not set");
        }
        headers.emplace("Authorization", std::string("Bearer ") + token);
    }

    json body;
    body["model"] = config_.model;
    body["temperature"] = temperature;
    body["messages"] = json::array({{{"role", "user"}, {"content", job.prompt_text}}});

    auto res = client.Post(config_.path, headers, body.dump(), "application/json");
    if (!res) {
        throw Error("http provider: transport error " + httplib::to_string(res.error()));
    }
    if (res->status != 200) {
        throw Error("http provider: status " + std::to_string(res->status) + ": " + res->body);
    }
    json reply = json::parse(res->body);
    return reply.at("choices").at(0).at("message").at("content").get<std::string>();
}

}  // namespace volbench
