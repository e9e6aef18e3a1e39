#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace scatter {

enum class BackendKind { Http, Mock, Replay };

std::string to_string(BackendKind kind);
BackendKind backend_kind_from_string(const std::string& s); // throws ValidationError

struct CompletionRequest {
    std::string role;   // prompting role tag ("diff", "gen", ..., "repair")
    std::string prompt; // non-empty
    std::string model = "gpt-4o";
    double temperature = 0.7;
    int max_tokens = 1024;
    std::optional<std::int64_t> seed;
};

struct TokenUsage {
    int prompt_tokens = 0;
    int completion_tokens = 0;
    int total_tokens = 0;
};

struct CompletionResponse {
    std::string text;
    BackendKind backend = BackendKind::Mock;
    std::int64_t latency_ms = 0;
    std::optional<TokenUsage> usage;
};

// Canonical request key: role, model, temperature (6 decimals), max_tokens,
// seed, prompt joined with 0x1f unit separators, SHA-256, lowercase hex.
std::string digest(const CompletionRequest& req);

// Recorded responses per request digest; replay consumes each list FIFO.
struct Cassette {
    std::map<std::string, std::vector<CompletionResponse>> entries;

    std::string to_json_string() const; // stable key order, byte-reproducible
    static Cassette from_json_string(const std::string& s);
    static Cassette load_file(const std::string& path); // ValidationError if unreadable
    void save_file(const std::string& path) const;
    std::size_t response_count() const;
};

class LlmBackend {
public:
    virtual ~LlmBackend() = default;
    virtual CompletionResponse complete(const CompletionRequest& req) = 0;
    virtual BackendKind kind() const = 0;
};

// Deterministic rule-based backend: first rule whose role matches and whose
// pattern occurs in the prompt wins. Stateless and reentrant.
struct MockRule {
    std::string role;
    std::string pattern; // plain substring; "" matches any prompt
    std::string response;
};

using MockRulebook = std::vector<MockRule>;

class MockBackend final : public LlmBackend {
public:
    explicit MockBackend(MockRulebook rules) : rules_(std::move(rules)) {}
    CompletionResponse complete(const CompletionRequest& req) override;
    BackendKind kind() const override { return BackendKind::Mock; }

private:
    MockRulebook rules_;
};

// Replays a cassette; each digest's recorded list is consumed in order.
// Throws CassetteMiss when a digest is absent or exhausted.
class ReplayBackend final : public LlmBackend {
public:
    explicit ReplayBackend(Cassette cassette) : cassette_(std::move(cassette)) {}
    CompletionResponse complete(const CompletionRequest& req) override;
    BackendKind kind() const override { return BackendKind::Replay; }

private:
    Cassette cassette_;
    std::unordered_map<std::string, std::size_t> next_;
    std::mutex mu_;
};

struct HttpConfig {
    std::string base_url;          // e.g. https://api.openai.com/v1
    std::string api_key;           // bearer token; resolved from LLM_API_KEY
    int timeout_seconds = 120;
};

// OpenAI-compatible chat-completions client over {base_url}/chat/completions.
class HttpBackend final : public LlmBackend {
public:
    explicit HttpBackend(HttpConfig config) : config_(std::move(config)) {}
    CompletionResponse complete(const CompletionRequest& req) override;
    BackendKind kind() const override { return BackendKind::Http; }

private:
    HttpConfig config_;
};

// Uniform completion surface. Optionally records every (digest, response)
// pair into an in-memory cassette; recording is mutex-guarded so concurrent
// completions append atomically.
class Gateway {
public:
    explicit Gateway(std::unique_ptr<LlmBackend> backend, bool record = false);

    CompletionResponse complete(const CompletionRequest& req);

    bool recording() const { return recording_; }
    const Cassette& recorded() const { return recorded_; }
    BackendKind backend_kind() const { return backend_->kind(); }

    static Gateway mock(MockRulebook rules, bool record = false);
    static Gateway replay(Cassette cassette);
    static Gateway http(HttpConfig config, bool record = true);

private:
    std::unique_ptr<LlmBackend> backend_;
    bool recording_;
    Cassette recorded_;
    std::mutex mu_;
};

// Rulebook that reproduces the shipped 20-round experiment against the
// lifecycle fixture (see mock_rules.cpp for the per-round layout).
MockRulebook default_mock_rulebook();

} // namespace scatter
