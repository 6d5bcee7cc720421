#include "urbankg/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace urbankg::config {

using nlohmann::json;

namespace {

std::string join_problems(const std::vector<std::string>& problems) {
    std::string out = "invalid configuration:";
    for (const std::string& p : problems) out += "\n  - " + p;
    return out;
}

} // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : std::runtime_error(join_problems(problems)), problems_(std::move(problems)) {}

std::vector<std::string> validate(const PipelineConfig& cfg) {
    std::vector<std::string> problems;
    if (cfg.backend.type != "mock" && cfg.backend.type != "http")
        problems.push_back("backend.type must be \"mock\" or \"http\"");
    if (cfg.backend.type == "http" && cfg.backend.base_url.empty())
        problems.push_back("backend.base_url is required for the http backend");
    if (cfg.backend.model_id.empty()) problems.push_back("backend.model_id must be non-empty");
    if (cfg.backend.embedding_dim < 8)
        problems.push_back("backend.embedding_dim must be at least 8");
    if (cfg.max_iterations < 1) problems.push_back("max_iterations must be >= 1");
    if (!(cfg.rcc_eps_deg > 0.0)) problems.push_back("rcc_eps_deg must be positive");
    if (cfg.low_frequency_threshold < 0)
        problems.push_back("low_frequency_threshold must be >= 0");
    if (cfg.merge_similarity < 0.0 || cfg.merge_similarity > 1.0)
        problems.push_back("merge_similarity must lie in [0, 1]");
    if (cfg.link_similarity < 0.0 || cfg.link_similarity > 1.0)
        problems.push_back("link_similarity must lie in [0, 1]");
    if (cfg.retry.max_attempts < 1) problems.push_back("retry.max_attempts must be >= 1");
    if (cfg.retry.backoff_initial_ms < 0)
        problems.push_back("retry.backoff_initial_ms must be >= 0");
    if (cfg.retry.backoff_factor < 1.0)
        problems.push_back("retry.backoff_factor must be >= 1.0");
    if (cfg.timeout_ms < 1) problems.push_back("timeout_ms must be >= 1");
    if (cfg.max_in_flight < 1) problems.push_back("max_in_flight must be >= 1");
    if (cfg.parallelism < 1) problems.push_back("parallelism must be >= 1");
    if (cfg.max_tokens < 1) problems.push_back("max_tokens must be >= 1");
    if (cfg.temperature < 0.0) problems.push_back("temperature must be >= 0");
    for (const auto& [model, price] : cfg.price_table)
        if (price.prompt_per_1k < 0.0 || price.completion_per_1k < 0.0)
            problems.push_back("price_table." + model + " entries must be >= 0");
    return problems;
}

PipelineConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError({std::string("not valid JSON: ") + e.what()});
    }

    PipelineConfig cfg;
    std::vector<std::string> problems;

    auto get = [&](const json& obj, const char* key, auto& target) {
        if (!obj.contains(key)) return;
        try {
            target = obj.at(key).get<std::decay_t<decltype(target)>>();
        } catch (const json::exception&) {
            problems.push_back(std::string("wrong type for key: ") + key);
        }
    };

    if (j.contains("backend")) {
        const json& b = j["backend"];
        get(b, "type", cfg.backend.type);
        get(b, "base_url", cfg.backend.base_url);
        get(b, "chat_path", cfg.backend.chat_path);
        get(b, "embeddings_path", cfg.backend.embeddings_path);
        get(b, "api_key_env", cfg.backend.api_key_env);
        get(b, "script_path", cfg.backend.script_path);
        get(b, "embedding_dim", cfg.backend.embedding_dim);
        get(b, "model_id", cfg.backend.model_id);
        get(b, "embedding_model_id", cfg.backend.embedding_model_id);
    } else {
        problems.push_back("missing key: backend");
    }
    get(j, "max_iterations", cfg.max_iterations);
    get(j, "rcc_eps_deg", cfg.rcc_eps_deg);
    if (j.contains("thresholds")) {
        const json& t = j["thresholds"];
        get(t, "low_frequency", cfg.low_frequency_threshold);
        get(t, "merge_similarity", cfg.merge_similarity);
        get(t, "link_similarity", cfg.link_similarity);
    }
    if (j.contains("retry")) {
        const json& r = j["retry"];
        get(r, "max_attempts", cfg.retry.max_attempts);
        get(r, "backoff_initial_ms", cfg.retry.backoff_initial_ms);
        get(r, "backoff_factor", cfg.retry.backoff_factor);
    }
    get(j, "timeout_ms", cfg.timeout_ms);
    get(j, "max_in_flight", cfg.max_in_flight);
    get(j, "parallelism", cfg.parallelism);
    get(j, "template_set", cfg.template_set);
    get(j, "seed", cfg.seed);
    get(j, "max_tokens", cfg.max_tokens);
    get(j, "temperature", cfg.temperature);
    if (j.contains("price_table")) {
        for (const auto& [model, entry] : j["price_table"].items()) {
            llm::Price price;
            get(entry, "prompt_per_1k", price.prompt_per_1k);
            get(entry, "completion_per_1k", price.completion_per_1k);
            cfg.price_table[model] = price;
        }
    }

    auto more = validate(cfg);
    problems.insert(problems.end(), more.begin(), more.end());
    if (!problems.empty()) throw ConfigError(std::move(problems));
    return cfg;
}

PipelineConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError({"cannot open config file: " + path.string()});
    std::ostringstream body;
    body << in.rdbuf();
    return parse_config(body.str());
}

Runtime make_runtime(const PipelineConfig& cfg) {
    Runtime rt;
    if (cfg.backend.type == "mock") {
        std::vector<llm::ScriptStep> steps;
        if (!cfg.backend.script_path.empty())
            steps = llm::load_script(cfg.backend.script_path);
        rt.backend = std::make_unique<llm::MockBackend>(std::move(steps),
                                                        cfg.backend.embedding_dim);
    } else {
        llm::HttpBackendConfig http;
        http.base_url = cfg.backend.base_url;
        http.chat_path = cfg.backend.chat_path;
        http.embeddings_path = cfg.backend.embeddings_path;
        http.api_key_env = cfg.backend.api_key_env;
        http.timeout_ms = cfg.timeout_ms;
        rt.backend = std::make_unique<llm::HttpBackend>(std::move(http));
    }
    llm::GatewayConfig gw;
    gw.retry = cfg.retry;
    gw.prices = cfg.price_table;
    gw.max_in_flight = cfg.max_in_flight;
    rt.gateway = std::make_unique<llm::Gateway>(*rt.backend, std::move(gw));

    rt.templates = cfg.template_set == "default" ? prompts::TemplateSet::builtin()
                                                 : prompts::TemplateSet::load_dir(cfg.template_set);

    rt.agent.model_id = cfg.backend.model_id;
    rt.agent.max_iterations = cfg.max_iterations;
    rt.agent.temperature = cfg.temperature;
    rt.agent.max_tokens = cfg.max_tokens;
    rt.agent.parallelism = cfg.parallelism;
    return rt;
}

} // namespace urbankg::config
