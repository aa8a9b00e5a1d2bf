#pragma once

#include <chrono>
#include <cstdlib>
#include <memory>
#include <string>
#include <thread>
#include <utility>

#include <httplib.h>
#include <json.hpp>

#include "argmed/agents.hpp"
#include "argmed/errors.hpp"

namespace argmed {

// Chat-completion client for an HTTP endpoint. Transient failures (transport
// errors, 408/429, 5xx) are retried with exponential backoff up to
// max_retries extra attempts; auth and other 4xx failures are not. The
// credential is read from the environment variable the config names, checked
// before any network traffic.
class RemoteBackend final : public AgentBackend {
public:
    explicit RemoteBackend(BackendConfig config,
                           std::chrono::milliseconds backoff_base = std::chrono::milliseconds(100))
        : cfg_(std::move(config)), backoff_base_(backoff_base) {
        if (cfg_.endpoint.empty())
            throw Error(Err::InvalidConfig, "remote backend needs an endpoint");
        if (cfg_.model_name.empty())
            throw Error(Err::InvalidConfig, "remote backend needs a model_name");
        if (cfg_.max_retries < 0)
            throw Error(Err::InvalidConfig, "max_retries must not be negative");
    }

    struct Endpoint {
        std::string base;  // scheme://host[:port]
        std::string path;
    };

    static Endpoint split_endpoint(const std::string& endpoint) {
        auto scheme = endpoint.find("://");
        std::size_t host_start = scheme == std::string::npos ? 0 : scheme + 3;
        auto slash = endpoint.find('/', host_start);
        if (slash == std::string::npos) return {endpoint, "/v1/chat/completions"};
        return {endpoint.substr(0, slash), endpoint.substr(slash)};
    }

    std::string complete(const BackendRequest& request) override {
        const char* key = std::getenv(cfg_.credential_env.c_str());
        if (key == nullptr || *key == '\0')
            throw Error(Err::BackendFailure, "credential environment variable '" +
                                                 cfg_.credential_env + "' is not set");

        nlohmann::json body;
        body["model"] = cfg_.model_name;
        body["temperature"] = cfg_.temperature;
        body["messages"] = nlohmann::json::array();
        body["messages"].push_back({{"role", "system"}, {"content", request.system_prompt}});
        for (const ChatMessage& m : request.context)
            body["messages"].push_back({{"role", m.role}, {"content", m.content}});
        body["messages"].push_back({{"role", "user"}, {"content", request.instruction}});
        std::string payload = body.dump();

        Endpoint ep = split_endpoint(cfg_.endpoint);
        httplib::Headers headers = {{"Authorization", std::string("Bearer ") + key}};

        std::string last_problem = "no attempt made";
        bool timed_out = false;
        for (int attempt = 0; attempt <= cfg_.max_retries; ++attempt) {
            if (attempt > 0)
                std::this_thread::sleep_for(backoff_base_ * (1 << (attempt - 1)));
            httplib::Client client(ep.base);
            auto timeout = std::chrono::milliseconds(cfg_.timeout_ms);
            client.set_connection_timeout(timeout);
            client.set_read_timeout(timeout);
            client.set_write_timeout(timeout);
            auto res = client.Post(ep.path, headers, payload, "application/json");
            if (!res) {
                httplib::Error err = res.error();
                timed_out = err == httplib::Error::ConnectionTimeout ||
                            err == httplib::Error::Read || err == httplib::Error::Write;
                last_problem = std::string("transport error: ") + httplib::to_string(err);
                continue;
            }
            timed_out = false;
            if (res->status >= 200 && res->status < 300) return extract_content(res->body);
            if (res->status == 408 || res->status == 429 || res->status >= 500) {
                last_problem = "http status " + std::to_string(res->status);
                continue;
            }
            throw Error(Err::BackendFailure,
                        "endpoint rejected the request with http status " +
                            std::to_string(res->status));
        }
        if (timed_out)
            throw Error(Err::Timeout, "request timed out after " +
                                          std::to_string(cfg_.max_retries + 1) + " attempts");
        throw Error(Err::BackendFailure,
                    "request failed after " + std::to_string(cfg_.max_retries + 1) +
                        " attempts; last problem: " + last_problem);
    }

    bool deterministic() const override { return false; }

    const BackendConfig& config() const { return cfg_; }

private:
    static std::string extract_content(const std::string& body) {
        nlohmann::json j = nlohmann::json::parse(body, nullptr, false);
        if (j.is_discarded() || !j.is_object() || !j.contains("choices") ||
            !j["choices"].is_array() || j["choices"].empty())
            throw Error(Err::BackendFailure, "malformed completion response body");
        const nlohmann::json& first = j["choices"][0];
        if (!first.is_object() || !first.contains("message") ||
            !first["message"].is_object() || !first["message"].contains("content") ||
            !first["message"]["content"].is_string())
            throw Error(Err::BackendFailure, "completion response has no message content");
        return first["message"]["content"].get<std::string>();
    }

    BackendConfig cfg_;
    std::chrono::milliseconds backoff_base_;
};

inline std::unique_ptr<AgentBackend> make_backend(const BackendConfig& cfg) {
    switch (cfg.kind) {
        case BackendKind::Scripted:
            if (!cfg.script.empty()) return scripted_backend(cfg.script);
            if (!cfg.script_path.empty()) return recorded_backend(cfg.script_path);
            throw Error(Err::InvalidConfig,
                        "scripted backend needs an inline 'script' or a 'script_path'");
        case BackendKind::Recorded:
            if (cfg.script_path.empty())
                throw Error(Err::InvalidConfig, "recorded backend needs a 'script_path'");
            return recorded_backend(cfg.script_path);
        case BackendKind::Remote:
            return std::make_unique<RemoteBackend>(cfg);
    }
    throw Error(Err::InvalidConfig, "unhandled backend kind");
}

}  // namespace argmed
