#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "fsmforge/diag.hpp"

namespace fsmforge::agent {

struct Message {
    std::string role;  // "system" | "user" | "assistant"
    std::string content;
};

/// Chat-completion abstraction the agents talk to. Implementations must
/// tolerate concurrent callers or be instantiated per pipeline.
class ChatBackend {
public:
    virtual ~ChatBackend() = default;

    /// Sends one request; returns the assistant text. Throws
    /// ContractError(E_LLM) once transient-failure retries are exhausted.
    virtual std::string send(const std::string& system_prompt,
                             const std::vector<Message>& messages, double temperature) = 0;
};

/// Replays a fixed response sequence; fully deterministic. With
/// `repeat_last`, the final response repeats forever once the list is
/// exhausted (for adversarial fixtures); otherwise exhaustion throws
/// ContractError(E_SCRIPT_EXHAUSTED).
class ScriptedBackend final : public ChatBackend {
public:
    explicit ScriptedBackend(std::vector<std::string> responses, bool repeat_last = false);

    /// Fixture file: either a JSON array of strings, a JSON object
    /// {"responses": [...], "repeat_last": bool}, or plain text with
    /// responses separated by lines containing only "---".
    static Result<ScriptedBackend> from_file(const std::filesystem::path& path);
    static Result<ScriptedBackend> from_text(const std::string& text);

    std::string send(const std::string& system_prompt, const std::vector<Message>& messages,
                     double temperature) override;

    std::size_t consumed() const { return next_; }

private:
    std::vector<std::string> responses_;
    bool repeat_last_ = false;
    std::size_t next_ = 0;
};

struct HttpBackendConfig {
    std::string base_url;  // e.g. "http://localhost:8000"
    std::string path = "/v1/chat/completions";
    std::string model;
    std::string api_key_env = "FSMFORGE_API_KEY";
    int max_retries = 3;
    int retry_backoff_ms = 250;
    int timeout_s = 120;
};

/// Chat-completion HTTP client. Request body: {model, messages, temperature};
/// reply read from choices[0].message.content. Connection errors, 429 and
/// 5xx responses are retried with linear backoff, then surface as
/// ContractError(E_LLM). Request/response bodies are logged to stderr when
/// FSMFORGE_DEBUG is set, with credentials redacted.
class HttpBackend final : public ChatBackend {
public:
    explicit HttpBackend(HttpBackendConfig config);

    std::string send(const std::string& system_prompt, const std::vector<Message>& messages,
                     double temperature) override;

private:
    HttpBackendConfig config_;
};

/// FNV-1a 64-bit hex digest used for transcript request/response digests.
std::string content_digest(const std::string& content);

}  // namespace fsmforge::agent
