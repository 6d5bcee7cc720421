#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "urbankg/geotools.hpp"
#include "urbankg/ingest.hpp"
#include "urbankg/kg_model.hpp"

namespace urbankg::prompts {

enum class ViewKind { Spatial, Temporal, Functional };

inline constexpr std::array<ViewKind, 3> kAllViews = {ViewKind::Spatial, ViewKind::Temporal,
                                                      ViewKind::Functional};

std::string_view view_kind_name(ViewKind v);
kg::View to_graph_view(ViewKind v);

enum class Paradigm { Zsl, Icl };
std::optional<Paradigm> paradigm_from_name(std::string_view);

class PromptError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Trigger phrases; each rendered prompt contains its own trigger exactly once.
inline constexpr std::string_view kCotTrigger = "Let's think step by step";
inline constexpr std::string_view kToolAsk = "Which types of tool interface you need";
inline constexpr std::string_view kDeliberateTrigger = "Please refine your reasoning process";
inline constexpr std::string_view kVerifierTrigger =
    "Judge whether all extracted triplets are correct and provide improvement suggestion";
inline constexpr std::string_view kUpdaterTrigger =
    "Follow suggestion to refine the reasoning process";
inline constexpr std::string_view kFaithfulSentinel = "This is a faithful trajectory";

// Output grammar for extracted triplets, one per line.
inline constexpr std::string_view kTripletGrammar = "<head, relation, tail>";

// Named template assets with {{slot}} placeholders. The built-in set ships
// the default wording; a directory of <name>.txt files overrides individual
// templates (the file stem is the template name).
class TemplateSet {
public:
    static TemplateSet builtin();
    static TemplateSet load_dir(const std::filesystem::path& dir);

    const std::string& version() const { return version_; }
    bool has(std::string_view name) const;
    // Substitutes every {{slot}}; an unbound slot throws PromptError. Slot
    // values are inserted verbatim, never re-expanded.
    std::string render(std::string_view name,
                       const std::map<std::string, std::string>& slots) const;

private:
    std::string version_ = "default";
    std::map<std::string, std::string> templates_;
};

// Turn 1 of a view dialog: view definitions + source text, asking for
// candidate entity and relation types.
std::string build_rte_view_turn1(const TemplateSet& ts, ViewKind view, std::string_view text);

// Turn 2: the extracted type lists feed the triplet-extraction ask; ends
// with the chain-of-thought trigger.
std::string build_rte_view_turn2(const TemplateSet& ts, ViewKind view, std::string_view text,
                                 std::span<const std::string> entity_types,
                                 std::span<const std::string> relation_types);

// Both entity names and WKT geometries plus the five RCC relationship
// definitions (DC, EC, EQ, PO, IN order); ends with the CoT trigger.
std::string build_kgc_instruction(const TemplateSet& ts, const ingest::KgcRecord& rec);

using ToolkitEntry = std::pair<tools::ToolName, std::string>;
std::vector<ToolkitEntry> default_toolkit();

// One name+description line per tool, ending with the verbatim tool ask.
std::string build_tool_prompt(const TemplateSet& ts, const ingest::KgcRecord& rec,
                              std::span<const ToolkitEntry> toolkit);

// Tool results rendered as "tool(name)=value" lines plus the prior
// reasoning; ends with the deliberation trigger.
std::string build_deliberation_prompt(const TemplateSet& ts,
                                      std::span<const tools::ToolResult> results,
                                      std::string_view prior_trajectory);

std::string build_verifier_prompt(const TemplateSet& ts, std::string_view trajectory);
std::string build_updater_prompt(const TemplateSet& ts, std::string_view trajectory,
                                 std::string_view feedback);

// RTE evaluation: asks for true/false triplet counts and a 1-5 confidence.
std::string build_eval_prompt_rte(const TemplateSet& ts, std::string_view text,
                                  std::string_view results);

// KGC evaluation: embeds one evidence line per tool (all eight) and asks for
// a True/False verdict and a 1-5 confidence.
std::string build_eval_prompt_kgc(const TemplateSet& ts, const ingest::KgcRecord& rec,
                                  tools::Rcc5Relation predicted,
                                  std::span<const std::string> evidence_lines);

using Demo = std::pair<std::string, std::string>; // question, answer

std::string build_baseline_rte(const TemplateSet& ts, Paradigm paradigm, std::string_view text,
                               std::span<const Demo> demos = {});
std::string build_baseline_kgc(const TemplateSet& ts, Paradigm paradigm,
                               const ingest::KgcRecord& rec, std::span<const Demo> demos = {});

// Relation-cluster merge ask; answers follow "merge: a, b -> canonical".
std::string build_cluster_merge_prompt(const TemplateSet& ts,
                                       std::span<const std::string> labels);

} // namespace urbankg::prompts
