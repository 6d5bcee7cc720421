#pragma once

#include <condition_variable>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace urbankg::llm {

enum class Role { System, User, Assistant };

std::string_view role_name(Role r);

struct ChatMessage {
    Role role = Role::User;
    std::string content;
};

struct ChatRequest {
    std::vector<ChatMessage> messages; // at least one user message
    std::string model_id;
    double temperature = 0.0;
    int max_tokens = 2048;
};

struct ChatResponse {
    std::string content;
    long prompt_tokens = 0;
    long completion_tokens = 0;
    double latency_s = 0.0;
};

class GatewayError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};
// Transient transport failure; retried with exponential backoff.
class TransportError : public GatewayError {
public:
    using GatewayError::GatewayError;
};
// Non-retryable backend status (4xx).
class BackendRefusal : public GatewayError {
public:
    using GatewayError::GatewayError;
};
class TimeoutError : public TransportError {
public:
    using TransportError::TransportError;
};
// The scripted mock ran out of matching steps; message carries the request.
class ScriptExhausted : public GatewayError {
public:
    using GatewayError::GatewayError;
};

struct Price {
    double prompt_per_1k = 0.0;
    double completion_per_1k = 0.0;
};

using PriceTable = std::map<std::string, Price>; // model id -> price

struct LedgerEntry {
    std::string model;
    std::string tag; // caller-supplied task label, e.g. "rte"
    long calls = 0;
    long prompt_tokens = 0;
    long completion_tokens = 0;
    double wall_s = 0.0;
    double cost = 0.0;
};

using LedgerSnapshot = std::vector<LedgerEntry>; // sorted by (model, tag)

// Thread-safe accumulator; totals always equal the sum of recorded calls.
class CostLedger {
public:
    void record(const std::string& model, const std::string& tag, const ChatResponse& resp,
                const Price& price);
    LedgerSnapshot snapshot() const;
    LedgerEntry totals() const;

private:
    mutable std::mutex mutex_;
    std::map<std::pair<std::string, std::string>, LedgerEntry> entries_;
};

void save_ledger(const std::filesystem::path& path, const LedgerSnapshot& snapshot);
LedgerSnapshot load_ledger(const std::filesystem::path& path);

class ChatBackend {
public:
    virtual ~ChatBackend() = default;
    virtual ChatResponse complete(const ChatRequest& req) = 0;
    // One raw (unnormalized) vector per input text.
    virtual std::vector<std::vector<double>> embed(std::span<const std::string> texts,
                                                   const std::string& model_id) = 0;
};

struct ScriptStep {
    std::string match; // substring matched against the concatenated request text
    std::string response;
};

// Deterministic scripted backend. Each chat call consumes the first matching
// unconsumed step; unmatched requests raise ScriptExhausted carrying the
// request text. Embeddings are feature-hashed character n-grams, so surface
// overlap drives cosine similarity monotonically.
class MockBackend : public ChatBackend {
public:
    explicit MockBackend(std::vector<ScriptStep> steps = {}, int embedding_dim = 256);
    MockBackend(std::initializer_list<ScriptStep> steps)
        : MockBackend(std::vector<ScriptStep>(steps)) {}

    ChatResponse complete(const ChatRequest& req) override;
    std::vector<std::vector<double>> embed(std::span<const std::string> texts,
                                           const std::string& model_id) override;

    size_t consumed_steps() const;
    size_t remaining_steps() const;

private:
    std::vector<ScriptStep> steps_;
    std::vector<bool> consumed_;
    int embedding_dim_;
    mutable std::mutex mutex_;
};

// The deterministic embedding used by MockBackend, exposed for direct use.
// Character n-grams (n = 1..3, unigrams double-weighted) of the folded text,
// signed feature hashing; not normalized here.
std::vector<double> mock_embedding(std::string_view text, int dim = 256);

std::vector<ScriptStep> load_script(const std::filesystem::path& path);

struct RetryPolicy {
    int max_attempts = 3;
    int backoff_initial_ms = 200;
    double backoff_factor = 2.0;
};

struct HttpBackendConfig {
    std::string base_url; // scheme://host[:port]
    std::string chat_path = "/v1/chat/completions";
    std::string embeddings_path = "/v1/embeddings";
    std::string api_key_env = "URBANKG_API_KEY"; // credential comes from the environment
    int timeout_ms = 30000;
};

// Chat-completions JSON shape over HTTP(S): messages array in, choices and
// usage out. Every request is bounded by the configured timeout.
class HttpBackend : public ChatBackend {
public:
    explicit HttpBackend(HttpBackendConfig cfg);
    ~HttpBackend() override;

    ChatResponse complete(const ChatRequest& req) override;
    std::vector<std::vector<double>> embed(std::span<const std::string> texts,
                                           const std::string& model_id) override;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

struct GatewayConfig {
    RetryPolicy retry;
    PriceTable prices;
    int max_in_flight = 4; // concurrent backend calls
};

// Uniform entry point: retries transient failures, enforces the in-flight
// cap, and accounts every successful call in the ledger.
class Gateway {
public:
    Gateway(ChatBackend& backend, GatewayConfig cfg = {});

    ChatResponse chat(const ChatRequest& req, const std::string& tag = "");
    // L2-normalized embeddings, one unit vector per text.
    std::vector<std::vector<double>> embed(std::span<const std::string> texts,
                                           const std::string& model_id,
                                           const std::string& tag = "");

    const CostLedger& ledger() const { return ledger_; }
    long total_attempts() const;
    long total_calls() const;

private:
    template <typename F> auto with_retries(F&& call) -> decltype(call());
    void acquire_slot();
    void release_slot();

    ChatBackend& backend_;
    GatewayConfig cfg_;
    CostLedger ledger_;
    std::mutex slot_mutex_;
    std::condition_variable slot_cv_;
    int in_flight_ = 0;
    std::atomic<long> total_attempts_{0};
    std::atomic<long> total_calls_{0};
};

double cosine(std::span<const double> a, std::span<const double> b);

} // namespace urbankg::llm
