#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "urbankg/agent.hpp"
#include "urbankg/geotools.hpp"
#include "urbankg/llm_gateway.hpp"
#include "urbankg/postprocess.hpp"

namespace urbankg::config {

struct BackendConfig {
    std::string type = "mock"; // "mock" | "http"
    // http
    std::string base_url;
    std::string chat_path = "/v1/chat/completions";
    std::string embeddings_path = "/v1/embeddings";
    std::string api_key_env = "URBANKG_API_KEY";
    // mock
    std::string script_path;
    int embedding_dim = 256;
    // both
    std::string model_id = "mock";
    std::string embedding_model_id = "mock-embed";
};

struct PipelineConfig {
    BackendConfig backend;
    int max_iterations = 3;
    double rcc_eps_deg = tools::kDefaultRccEps;
    int low_frequency_threshold = postprocess::kDefaultFrequencyThreshold;
    double merge_similarity = postprocess::kDefaultMergeSimilarity;
    double link_similarity = postprocess::kDefaultLinkSimilarity;
    llm::RetryPolicy retry;
    int timeout_ms = 30000;
    int max_in_flight = 4;
    int parallelism = 1;
    llm::PriceTable price_table;
    std::string template_set = "default"; // "default" or a directory path
    uint64_t seed = 42;
    int max_tokens = 2048;
    double temperature = 0.0;
};

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::vector<std::string> problems);
    const std::vector<std::string>& problems() const { return problems_; }

private:
    std::vector<std::string> problems_;
};

// Parses and validates; every problem is listed, not just the first.
PipelineConfig load_config(const std::filesystem::path& path);
PipelineConfig parse_config(const std::string& json_text);
std::vector<std::string> validate(const PipelineConfig& cfg);

// Materialized runtime pieces built from one config.
struct Runtime {
    std::unique_ptr<llm::ChatBackend> backend;
    std::unique_ptr<llm::Gateway> gateway;
    prompts::TemplateSet templates;
    agent::AgentConfig agent;
};

Runtime make_runtime(const PipelineConfig& cfg);

} // namespace urbankg::config
