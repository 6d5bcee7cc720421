#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "urbankg/kg_model.hpp"
#include "urbankg/llm_gateway.hpp"
#include "urbankg/prompts.hpp"

namespace urbankg::postprocess {

enum class MergeStage { Frequency, Cluster };

std::string_view merge_stage_name(MergeStage s);

// Relabeling plan: applying it twice is a no-op (targets are fixed points)
// and dropped labels never appear as targets.
struct MergePlan {
    std::map<std::string, std::string> mapping; // source label -> target label
    std::set<std::string> dropped;
    MergeStage stage = MergeStage::Frequency;
};

struct MergeOutcome {
    kg::UrbanGraph graph;
    MergePlan plan;
    std::vector<std::string> warnings;
};

inline constexpr int kDefaultFrequencyThreshold = 5;
inline constexpr double kDefaultMergeSimilarity = 0.85;
inline constexpr double kDefaultLinkSimilarity = 0.80;

// Stage 1: every relation occurring threshold_freq times or less is
// re-labeled to its most-similar high-frequency relation when the embedding
// cosine reaches threshold_sim, otherwise its facts are dropped. Embedding
// failures abort with the graph unmodified.
MergeOutcome merge_low_frequency(const kg::UrbanGraph& g, llm::Gateway& gateway,
                                 const std::string& embedding_model,
                                 int threshold_freq = kDefaultFrequencyThreshold,
                                 double threshold_sim = kDefaultMergeSimilarity);

struct ClusterMergeConfig {
    std::string embedding_model;
    std::string chat_model;
    double link_sim = kDefaultLinkSimilarity;
    int max_tokens = 1024;
};

// Stage 2: greedy single-link clustering of relation embeddings at link_sim;
// each multi-member cluster is shown to the chat model, whose
// "merge: a, b -> canonical" lines are applied. Unparseable answers or chat
// failures leave the cluster unmerged.
MergeOutcome cluster_and_merge(const kg::UrbanGraph& g, llm::Gateway& gateway,
                               const prompts::TemplateSet& ts, const ClusterMergeConfig& cfg);

// Relabel + drop + rebuild; frequencies recomputed from the surviving facts.
kg::UrbanGraph apply_merge_plan(const kg::UrbanGraph& g, const MergePlan& plan);

// Parses "merge: a, b -> canonical" lines; sources limited to `members`.
std::map<std::string, std::string> parse_merge_answer(std::string_view answer,
                                                      const std::set<std::string>& members,
                                                      std::vector<std::string>& warnings);

void save_plan(const std::filesystem::path& path, const MergePlan& plan);
MergePlan load_plan(const std::filesystem::path& path);
void append_plan(const std::filesystem::path& path, const MergePlan& plan);

} // namespace urbankg::postprocess
