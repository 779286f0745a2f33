#include "fsmforge/backend.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

namespace fsmforge::agent {

using nlohmann::json;

std::string content_digest(const std::string& content) {
    std::uint64_t hash = 1469598103934665603ull;
    for (unsigned char c : content) {
        hash ^= c;
        hash *= 1099511628211ull;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
    return std::string(buf) + ":" + std::to_string(content.size());
}

ScriptedBackend::ScriptedBackend(std::vector<std::string> responses, bool repeat_last)
    : responses_(std::move(responses)), repeat_last_(repeat_last) {}

Result<ScriptedBackend> ScriptedBackend::from_text(const std::string& text) {
    // JSON forms first; fall back to "---"-separated plain text.
    std::size_t start = text.find_first_not_of(" \t\r\n");
    if (start != std::string::npos && (text[start] == '[' || text[start] == '{')) {
        json doc;
        try {
            doc = json::parse(text);
        } catch (const json::parse_error& e) {
            return Result<ScriptedBackend>::failure(make_error("E_JSON", e.what(), ""));
        }
        std::vector<std::string> responses;
        bool repeat_last = false;
        const json* list = &doc;
        if (doc.is_object()) {
            if (!doc.contains("responses") || !doc["responses"].is_array())
                return Result<ScriptedBackend>::failure(
                    make_error("E_SCHEMA", "expected a 'responses' array", "/responses"));
            repeat_last = doc.value("repeat_last", false);
            list = &doc["responses"];
        }
        for (const auto& item : *list) {
            if (!item.is_string())
                return Result<ScriptedBackend>::failure(
                    make_error("E_SCHEMA", "script responses must be strings", ""));
            responses.push_back(item.get<std::string>());
        }
        return Result<ScriptedBackend>::success(ScriptedBackend(std::move(responses), repeat_last));
    }

    std::vector<std::string> responses;
    std::string current;
    std::istringstream in(text);
    std::string line;
    bool any = false;
    while (std::getline(in, line)) {
        if (line == "---") {
            responses.push_back(current);
            current.clear();
            any = true;
        } else {
            if (!current.empty()) current += "\n";
            current += line;
            any = true;
        }
    }
    if (!current.empty() || responses.empty()) responses.push_back(current);
    if (!any)
        return Result<ScriptedBackend>::failure(make_error("E_SCHEMA", "empty script file", ""));
    return Result<ScriptedBackend>::success(ScriptedBackend(std::move(responses), false));
}

Result<ScriptedBackend> ScriptedBackend::from_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        return Result<ScriptedBackend>::failure(
            make_error("E_NO_ROOT", "cannot open script '" + path.string() + "'", ""));
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_text(buf.str());
}

std::string ScriptedBackend::send(const std::string&, const std::vector<Message>&, double) {
    if (next_ >= responses_.size()) {
        if (repeat_last_ && !responses_.empty()) {
            ++next_;
            return responses_.back();
        }
        throw ContractError("E_SCRIPT_EXHAUSTED",
                            "scripted backend ran out of responses after " +
                                std::to_string(responses_.size()));
    }
    return responses_[next_++];
}

namespace {

bool debug_enabled() {
    const char* v = std::getenv("FSMFORGE_DEBUG");
    return v && *v && std::string(v) != "0";
}

void debug_log(const std::string& label, const std::string& body) {
    if (debug_enabled()) std::cerr << "[fsmforge " << label << "] " << body << "\n";
}

}  // namespace

HttpBackend::HttpBackend(HttpBackendConfig config) : config_(std::move(config)) {}

std::string HttpBackend::send(const std::string& system_prompt,
                              const std::vector<Message>& messages, double temperature) {
    json body;
    body["model"] = config_.model;
    body["messages"] = json::array();
    if (!system_prompt.empty())
        body["messages"].push_back({{"role", "system"}, {"content", system_prompt}});
    for (const auto& m : messages)
        body["messages"].push_back({{"role", m.role}, {"content", m.content}});
    body["temperature"] = temperature;
    const std::string payload = body.dump();
    debug_log("request", payload);

    httplib::Client client(config_.base_url);
    client.set_read_timeout(config_.timeout_s, 0);
    client.set_connection_timeout(config_.timeout_s, 0);
    httplib::Headers headers;
    if (const char* key = std::getenv(config_.api_key_env.c_str()); key && *key)
        headers.emplace("Authorization", std::string("Bearer ") + key);

    std::string last_error;
    for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
        if (attempt > 0)
            std::this_thread::sleep_for(
                std::chrono::milliseconds(config_.retry_backoff_ms * attempt));
        auto res = client.Post(config_.path, headers, payload, "application/json");
        if (!res) {
            last_error = "connection failed: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status == 429 || res->status >= 500) {
            last_error = "HTTP " + std::to_string(res->status);
            continue;
        }
        if (res->status != 200)
            throw ContractError("E_LLM", "backend returned HTTP " + std::to_string(res->status) +
                                             ": " + res->body);
        debug_log("response", res->body);
        try {
            json reply = json::parse(res->body);
            return reply.at("choices").at(0).at("message").at("content").get<std::string>();
        } catch (const json::exception& e) {
            throw ContractError("E_LLM", std::string("malformed completion response: ") + e.what());
        }
    }
    throw ContractError("E_LLM", "retries exhausted: " + last_error);
}

}  // namespace fsmforge::agent
