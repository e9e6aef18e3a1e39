#include "scatter/gateway.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>
#include <json.hpp>

#include "scatter/errors.hpp"
#include "sha256.hpp"

namespace scatter {

using nlohmann::json;

std::string to_string(BackendKind kind) {
    switch (kind) {
        case BackendKind::Http: return "http";
        case BackendKind::Mock: return "mock";
        case BackendKind::Replay: return "replay";
    }
    return "mock";
}

BackendKind backend_kind_from_string(const std::string& s) {
    if (s == "http") return BackendKind::Http;
    if (s == "mock") return BackendKind::Mock;
    if (s == "replay") return BackendKind::Replay;
    throw ValidationError("unknown backend kind: " + s);
}

std::string digest(const CompletionRequest& req) {
    char temp[32];
    std::snprintf(temp, sizeof(temp), "%.6f", req.temperature);
    std::string blob;
    blob += req.role;
    blob += '\x1f';
    blob += req.model;
    blob += '\x1f';
    blob += temp;
    blob += '\x1f';
    blob += std::to_string(req.max_tokens);
    blob += '\x1f';
    if (req.seed) blob += std::to_string(*req.seed);
    blob += '\x1f';
    blob += req.prompt;
    return detail::sha256_hex(blob);
}

// ---- cassette serialization ----

static json response_to_json(const CompletionResponse& r) {
    json j;
    j["text"] = r.text;
    j["backend"] = to_string(r.backend);
    j["latency_ms"] = r.latency_ms;
    if (r.usage) {
        j["usage"] = {{"prompt_tokens", r.usage->prompt_tokens},
                      {"completion_tokens", r.usage->completion_tokens},
                      {"total_tokens", r.usage->total_tokens}};
    } else {
        j["usage"] = nullptr;
    }
    return j;
}

static CompletionResponse response_from_json(const json& j) {
    CompletionResponse r;
    r.text = j.at("text").get<std::string>();
    r.backend = backend_kind_from_string(j.at("backend").get<std::string>());
    r.latency_ms = j.at("latency_ms").get<std::int64_t>();
    if (j.contains("usage") && !j.at("usage").is_null()) {
        TokenUsage u;
        u.prompt_tokens = j.at("usage").at("prompt_tokens").get<int>();
        u.completion_tokens = j.at("usage").at("completion_tokens").get<int>();
        u.total_tokens = j.at("usage").at("total_tokens").get<int>();
        r.usage = u;
    }
    return r;
}

std::string Cassette::to_json_string() const {
    json j = json::object();
    for (const auto& [key, responses] : entries) {
        json list = json::array();
        for (const auto& r : responses) list.push_back(response_to_json(r));
        j[key] = list;
    }
    return j.dump(2) + "\n";
}

Cassette Cassette::from_json_string(const std::string& s) {
    Cassette c;
    json j;
    try {
        j = json::parse(s);
    } catch (const json::exception& e) {
        throw ValidationError(std::string("cassette is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ValidationError("cassette root must be an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        std::vector<CompletionResponse> list;
        for (const auto& rec : it.value()) list.push_back(response_from_json(rec));
        c.entries.emplace(it.key(), std::move(list));
    }
    return c;
}

Cassette Cassette::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot read cassette file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_json_string(buf.str());
}

void Cassette::save_file(const std::string& path) const {
    std::ofstream out(path);
    out << to_json_string();
    if (!out) throw ValidationError("cannot write cassette file: " + path);
}

std::size_t Cassette::response_count() const {
    std::size_t n = 0;
    for (const auto& [key, responses] : entries) n += responses.size();
    return n;
}

// ---- backends ----

CompletionResponse MockBackend::complete(const CompletionRequest& req) {
    for (const auto& rule : rules_) {
        if (rule.role != req.role) continue;
        if (!rule.pattern.empty() && req.prompt.find(rule.pattern) == std::string::npos) continue;
        CompletionResponse r;
        r.text = rule.response;
        r.backend = BackendKind::Mock;
        r.latency_ms = 0;
        return r;
    }
    throw MockNoRuleMatched(req.role, req.prompt.substr(0, 80));
}

CompletionResponse ReplayBackend::complete(const CompletionRequest& req) {
    std::string key = digest(req);
    std::lock_guard<std::mutex> lock(mu_);
    auto it = cassette_.entries.find(key);
    if (it == cassette_.entries.end()) throw CassetteMiss(key);
    std::size_t& idx = next_[key];
    if (idx >= it->second.size()) throw CassetteMiss(key);
    CompletionResponse r = it->second[idx++];
    r.backend = BackendKind::Replay;
    return r;
}

CompletionResponse HttpBackend::complete(const CompletionRequest& req) {
    // Split base_url into scheme://host[:port] and a path prefix.
    std::string base = config_.base_url;
    while (!base.empty() && base.back() == '/') base.pop_back();
    std::string host = base;
    std::string prefix;
    auto scheme_end = base.find("://");
    auto path_start = base.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
    if (path_start != std::string::npos) {
        host = base.substr(0, path_start);
        prefix = base.substr(path_start);
    }

    json body;
    body["model"] = req.model;
    body["messages"] = json::array({{{"role", "user"}, {"content", req.prompt}}});
    body["temperature"] = req.temperature;
    body["max_tokens"] = req.max_tokens;
    if (req.seed) body["seed"] = *req.seed;

    httplib::Client client(host);
    client.set_connection_timeout(config_.timeout_seconds);
    client.set_read_timeout(config_.timeout_seconds);
    httplib::Headers headers;
    if (!config_.api_key.empty())
        headers.emplace("Authorization", "Bearer " + config_.api_key);

    auto start = std::chrono::steady_clock::now();
    auto res = client.Post(prefix + "/chat/completions", headers, body.dump(),
                           "application/json");
    auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                       std::chrono::steady_clock::now() - start)
                       .count();

    if (!res) throw HttpError(0, "transport failure: " + httplib::to_string(res.error()));
    if (res->status < 200 || res->status >= 300) throw HttpError(res->status, res->body);

    json parsed;
    try {
        parsed = json::parse(res->body);
    } catch (const json::exception& e) {
        throw HttpError(res->status, std::string("unparseable response body: ") + e.what());
    }

    CompletionResponse out;
    out.backend = BackendKind::Http;
    out.latency_ms = elapsed;
    try {
        out.text = parsed.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const json::exception&) {
        throw HttpError(res->status, "response lacks choices[0].message.content");
    }
    if (parsed.contains("usage") && parsed["usage"].is_object()) {
        TokenUsage u;
        u.prompt_tokens = parsed["usage"].value("prompt_tokens", 0);
        u.completion_tokens = parsed["usage"].value("completion_tokens", 0);
        u.total_tokens = parsed["usage"].value("total_tokens", 0);
        out.usage = u;
    }
    return out;
}

// ---- gateway ----

Gateway::Gateway(std::unique_ptr<LlmBackend> backend, bool record)
    : backend_(std::move(backend)), recording_(record) {}

CompletionResponse Gateway::complete(const CompletionRequest& req) {
    if (req.prompt.empty()) throw ValidationError("completion request has empty prompt");
    if (req.temperature < 0.0) throw ValidationError("temperature must be >= 0");
    CompletionResponse res = backend_->complete(req);
    if (recording_) {
        std::lock_guard<std::mutex> lock(mu_);
        recorded_.entries[digest(req)].push_back(res);
    }
    return res;
}

Gateway Gateway::mock(MockRulebook rules, bool record) {
    return Gateway(std::make_unique<MockBackend>(std::move(rules)), record);
}

Gateway Gateway::replay(Cassette cassette) {
    return Gateway(std::make_unique<ReplayBackend>(std::move(cassette)), false);
}

Gateway Gateway::http(HttpConfig config, bool record) {
    return Gateway(std::make_unique<HttpBackend>(std::move(config)), record);
}

} // namespace scatter
