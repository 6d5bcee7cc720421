#include "urbankg/llm_gateway.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "urbankg/text_util.hpp"

namespace urbankg::llm {

using nlohmann::json;

std::string_view role_name(Role r) {
    switch (r) {
        case Role::System: return "system";
        case Role::User: return "user";
        case Role::Assistant: return "assistant";
    }
    return "?";
}

void CostLedger::record(const std::string& model, const std::string& tag,
                        const ChatResponse& resp, const Price& price) {
    std::lock_guard lock(mutex_);
    LedgerEntry& e = entries_[{model, tag}];
    e.model = model;
    e.tag = tag;
    e.calls += 1;
    e.prompt_tokens += resp.prompt_tokens;
    e.completion_tokens += resp.completion_tokens;
    e.wall_s += resp.latency_s;
    e.cost += resp.prompt_tokens / 1000.0 * price.prompt_per_1k +
              resp.completion_tokens / 1000.0 * price.completion_per_1k;
}

LedgerSnapshot CostLedger::snapshot() const {
    std::lock_guard lock(mutex_);
    LedgerSnapshot out;
    for (const auto& [key, entry] : entries_) out.push_back(entry);
    return out; // map iteration is already (model, tag) sorted
}

LedgerEntry CostLedger::totals() const {
    LedgerEntry total;
    total.model = "*";
    total.tag = "*";
    for (const LedgerEntry& e : snapshot()) {
        total.calls += e.calls;
        total.prompt_tokens += e.prompt_tokens;
        total.completion_tokens += e.completion_tokens;
        total.wall_s += e.wall_s;
        total.cost += e.cost;
    }
    return total;
}

void save_ledger(const std::filesystem::path& path, const LedgerSnapshot& snapshot) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    for (const LedgerEntry& e : snapshot)
        out << json{{"model", e.model},
                    {"tag", e.tag},
                    {"calls", e.calls},
                    {"prompt_tokens", e.prompt_tokens},
                    {"completion_tokens", e.completion_tokens},
                    {"wall_s", e.wall_s},
                    {"cost", e.cost}}
                   .dump()
            << '\n';
}

LedgerSnapshot load_ledger(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open for reading: " + path.string());
    LedgerSnapshot out;
    std::string line;
    while (std::getline(in, line)) {
        if (text::trim(line).empty()) continue;
        json j = json::parse(line);
        out.push_back({j.at("model").get<std::string>(), j.value("tag", ""),
                       j.value("calls", 0L), j.value("prompt_tokens", 0L),
                       j.value("completion_tokens", 0L), j.value("wall_s", 0.0),
                       j.value("cost", 0.0)});
    }
    return out;
}

namespace {

std::string concatenate_request(const ChatRequest& req) {
    std::string all;
    for (const ChatMessage& m : req.messages) {
        all += m.content;
        all += '\n';
    }
    return all;
}

long approx_tokens(std::string_view s) {
    return static_cast<long>(text::word_count(s));
}

} // namespace

MockBackend::MockBackend(std::vector<ScriptStep> steps, int embedding_dim)
    : steps_(std::move(steps)), consumed_(steps_.size(), false), embedding_dim_(embedding_dim) {}

ChatResponse MockBackend::complete(const ChatRequest& req) {
    if (req.messages.empty()) throw BackendRefusal("request has no messages");
    std::string request_text = concatenate_request(req);
    std::lock_guard lock(mutex_);
    for (size_t i = 0; i < steps_.size(); ++i) {
        if (consumed_[i]) continue;
        if (request_text.find(steps_[i].match) == std::string::npos) continue;
        consumed_[i] = true;
        ChatResponse resp;
        resp.content = steps_[i].response;
        resp.prompt_tokens = approx_tokens(request_text);
        resp.completion_tokens = approx_tokens(resp.content);
        resp.latency_s = 0.0;
        return resp;
    }
    throw ScriptExhausted("no unconsumed script step matches request:\n" + request_text);
}

std::vector<std::vector<double>> MockBackend::embed(std::span<const std::string> texts,
                                                    const std::string&) {
    std::vector<std::vector<double>> out;
    out.reserve(texts.size());
    for (const std::string& t : texts) out.push_back(mock_embedding(t, embedding_dim_));
    return out;
}

size_t MockBackend::consumed_steps() const {
    std::lock_guard lock(mutex_);
    return static_cast<size_t>(std::count(consumed_.begin(), consumed_.end(), true));
}

size_t MockBackend::remaining_steps() const {
    std::lock_guard lock(mutex_);
    return consumed_.size() - static_cast<size_t>(std::count(consumed_.begin(), consumed_.end(), true));
}

std::vector<double> mock_embedding(std::string_view text, int dim) {
    std::string folded;
    folded.reserve(text.size());
    for (char c : text)
        folded.push_back(c == ' ' ? '_'
                                  : static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    std::vector<double> v(static_cast<size_t>(dim), 0.0);
    auto add_gram = [&](std::string_view gram, double weight) {
        // FNV-1a; low bits pick the bucket, one high bit picks the sign.
        uint64_t h = 1469598103934665603ull;
        for (char c : gram) {
            h ^= static_cast<unsigned char>(c);
            h *= 1099511628211ull;
        }
        size_t bucket = static_cast<size_t>(h % static_cast<uint64_t>(dim));
        double sign = (h >> 62 & 1) ? -1.0 : 1.0;
        v[bucket] += sign * weight;
    };
    for (size_t n = 1; n <= 3 && n <= folded.size(); ++n) {
        double weight = (n == 1) ? 2.0 : 1.0;
        for (size_t i = 0; i + n <= folded.size(); ++i)
            add_gram(std::string_view(folded).substr(i, n), weight);
    }
    return v;
}

std::vector<ScriptStep> load_script(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open for reading: " + path.string());
    std::vector<ScriptStep> steps;
    std::string line;
    while (std::getline(in, line)) {
        if (text::trim(line).empty()) continue;
        json j = json::parse(line);
        steps.push_back({j.value("match", ""), j.at("response").get<std::string>()});
    }
    return steps;
}

// --- HTTP backend -----------------------------------------------------------

struct HttpBackend::Impl {
    HttpBackendConfig cfg;
    httplib::Client client;

    explicit Impl(HttpBackendConfig c) : cfg(std::move(c)), client(cfg.base_url) {
        client.set_connection_timeout(cfg.timeout_ms / 1000, cfg.timeout_ms % 1000 * 1000);
        client.set_read_timeout(cfg.timeout_ms / 1000, cfg.timeout_ms % 1000 * 1000);
        client.set_write_timeout(cfg.timeout_ms / 1000, cfg.timeout_ms % 1000 * 1000);
        if (const char* key = std::getenv(cfg.api_key_env.c_str()); key && *key)
            client.set_default_headers({{"Authorization", std::string("Bearer ") + key}});
    }

    json post(const std::string& path, const json& body) {
        auto res = client.Post(path, body.dump(), "application/json");
        if (!res) {
            auto err = res.error();
            if (err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read ||
                err == httplib::Error::Write)
                throw TimeoutError("request to " + path + " timed out");
            throw TransportError("transport failure on " + path + ": " + httplib::to_string(err));
        }
        if (res->status >= 500 || res->status == 429 || res->status == 408)
            throw TransportError("backend status " + std::to_string(res->status) + " on " + path);
        if (res->status < 200 || res->status >= 300)
            throw BackendRefusal("backend status " + std::to_string(res->status) + " on " + path +
                                 ": " + res->body);
        try {
            return json::parse(res->body);
        } catch (const json::exception& e) {
            throw TransportError("unparseable backend response: " + std::string(e.what()));
        }
    }
};

HttpBackend::HttpBackend(HttpBackendConfig cfg) : impl_(std::make_unique<Impl>(std::move(cfg))) {}
HttpBackend::~HttpBackend() = default;

ChatResponse HttpBackend::complete(const ChatRequest& req) {
    json messages = json::array();
    for (const ChatMessage& m : req.messages)
        messages.push_back({{"role", std::string(role_name(m.role))}, {"content", m.content}});
    json body{{"model", req.model_id},
              {"messages", messages},
              {"temperature", req.temperature},
              {"max_tokens", req.max_tokens}};

    auto start = std::chrono::steady_clock::now();
    json reply = impl_->post(impl_->cfg.chat_path, body);
    auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start);

    ChatResponse resp;
    try {
        resp.content = reply.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const json::exception&) {
        throw TransportError("backend response missing choices[0].message.content");
    }
    if (reply.contains("usage")) {
        resp.prompt_tokens = reply["usage"].value("prompt_tokens", 0L);
        resp.completion_tokens = reply["usage"].value("completion_tokens", 0L);
    }
    resp.latency_s = elapsed.count();
    return resp;
}

std::vector<std::vector<double>> HttpBackend::embed(std::span<const std::string> texts,
                                                    const std::string& model_id) {
    json body{{"model", model_id}, {"input", json(std::vector<std::string>(texts.begin(), texts.end()))}};
    json reply = impl_->post(impl_->cfg.embeddings_path, body);
    std::vector<std::vector<double>> out;
    try {
        for (const auto& item : reply.at("data"))
            out.push_back(item.at("embedding").get<std::vector<double>>());
    } catch (const json::exception&) {
        throw TransportError("backend response missing data[].embedding");
    }
    if (out.size() != texts.size())
        throw TransportError("embedding count mismatch");
    return out;
}

// --- Gateway ----------------------------------------------------------------

Gateway::Gateway(ChatBackend& backend, GatewayConfig cfg) : backend_(backend), cfg_(std::move(cfg)) {
    if (cfg_.max_in_flight < 1) cfg_.max_in_flight = 1;
    if (cfg_.retry.max_attempts < 1) cfg_.retry.max_attempts = 1;
}

void Gateway::acquire_slot() {
    std::unique_lock lock(slot_mutex_);
    slot_cv_.wait(lock, [&] { return in_flight_ < cfg_.max_in_flight; });
    ++in_flight_;
}

void Gateway::release_slot() {
    {
        std::lock_guard lock(slot_mutex_);
        --in_flight_;
    }
    slot_cv_.notify_one();
}

template <typename F>
auto Gateway::with_retries(F&& call) -> decltype(call()) {
    int backoff_ms = cfg_.retry.backoff_initial_ms;
    for (int attempt = 1;; ++attempt) {
        total_attempts_.fetch_add(1);
        try {
            return call();
        } catch (const TransportError&) {
            if (attempt >= cfg_.retry.max_attempts) throw;
            std::this_thread::sleep_for(std::chrono::milliseconds(backoff_ms));
            backoff_ms = static_cast<int>(backoff_ms * cfg_.retry.backoff_factor);
        }
    }
}

ChatResponse Gateway::chat(const ChatRequest& req, const std::string& tag) {
    bool has_user = false;
    for (const ChatMessage& m : req.messages) has_user |= (m.role == Role::User);
    if (!has_user) throw BackendRefusal("chat request requires at least one user message");

    acquire_slot();
    struct Release {
        Gateway* g;
        ~Release() { g->release_slot(); }
    } release{this};

    ChatResponse resp = with_retries([&] { return backend_.complete(req); });
    total_calls_.fetch_add(1);
    Price price;
    if (auto it = cfg_.prices.find(req.model_id); it != cfg_.prices.end()) price = it->second;
    ledger_.record(req.model_id, tag, resp, price);
    return resp;
}

std::vector<std::vector<double>> Gateway::embed(std::span<const std::string> texts,
                                                const std::string& model_id,
                                                const std::string& tag) {
    if (texts.empty()) return {};
    for (const std::string& t : texts)
        if (t.empty()) throw BackendRefusal("embedding input texts must be non-empty");

    acquire_slot();
    struct Release {
        Gateway* g;
        ~Release() { g->release_slot(); }
    } release{this};

    auto vectors = with_retries([&] { return backend_.embed(texts, model_id); });
    total_calls_.fetch_add(1);
    for (auto& v : vectors) {
        double norm = 0.0;
        for (double x : v) norm += x * x;
        norm = std::sqrt(norm);
        if (norm > 0.0)
            for (double& x : v) x /= norm;
    }
    ChatResponse usage;
    for (const std::string& t : texts) usage.prompt_tokens += approx_tokens(t);
    Price price;
    if (auto it = cfg_.prices.find(model_id); it != cfg_.prices.end()) price = it->second;
    ledger_.record(model_id, tag, usage, price);
    return vectors;
}

long Gateway::total_attempts() const { return total_attempts_.load(); }
long Gateway::total_calls() const { return total_calls_.load(); }

double cosine(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::invalid_argument("cosine: dimension mismatch");
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot / std::sqrt(na * nb);
}

} // namespace urbankg::llm
