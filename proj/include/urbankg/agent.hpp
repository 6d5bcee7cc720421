#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "urbankg/geotools.hpp"
#include "urbankg/ingest.hpp"
#include "urbankg/kg_model.hpp"
#include "urbankg/llm_gateway.hpp"
#include "urbankg/prompts.hpp"

namespace urbankg::agent {

using Task = kg::Stage; // RTE / KGC

enum class StepKind {
    Instruction,
    ModelResponse,
    ToolCall,
    ToolResult,
    VerifierFeedback,
    UpdaterRevision,
};

std::string_view step_kind_name(StepKind k);
std::optional<StepKind> step_kind_from_name(std::string_view);

enum class Halt { Faithful, MaxIterations, Error };

std::string_view halt_name(Halt h);

struct TrajectoryStep {
    StepKind kind;
    std::string payload;
    int iteration = 0; // refinement iteration; 0 before the loop starts
};

// Ordered log of one record's run. A Faithful halt implies the last
// VerifierFeedback contains the sentinel substring.
struct Trajectory {
    std::string record_id;
    Task task = Task::Rte;
    std::vector<TrajectoryStep> steps;
    std::string final_answer;
    Halt halted_by = Halt::Error;
    std::string error; // non-empty only when halted_by == Error
};

class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};
class NoTripletsFound : public ParseError {
public:
    using ParseError::ParseError;
};
class NoRelationFound : public ParseError {
public:
    using ParseError::ParseError;
};

struct TripletText {
    std::string head;
    std::string relation;
    std::string tail;
};

struct ParsedTriplets {
    std::vector<TripletText> triplets;
    size_t ignored_lines = 0;
};

// Extracts every line matching "<h, r, t>" (fields split at the first and
// last comma, trimmed); non-matching non-empty lines are counted. Throws
// NoTripletsFound when nothing matches.
ParsedTriplets parse_triplets(std::string_view response);

// Renders triplets back into the one-per-line output grammar;
// parse_triplets() inverts this rendering.
std::string render_triplet_lines(std::span<const TripletText> triplets);

// Finds the final relation answer: RCC codes case-sensitively on word
// boundaries, full relation names case-insensitively; the last occurrence in
// the text wins.
tools::Rcc5Relation parse_relation(std::string_view response);

// Case-insensitive tool-name mentions, deduplicated in first-mention order;
// unknown names are ignored.
std::vector<tools::ToolName> parse_tool_request(std::string_view response);

// Tools applicable to a head/tail geometry pair (Table-order); used when the
// model requests none.
std::vector<tools::ToolName> fallback_tools(geo::GeometryKind head, geo::GeometryKind tail);

struct AgentConfig {
    std::string model_id = "mock";
    int max_iterations = 3;
    double temperature = 0.0;
    int max_tokens = 2048;
    int parallelism = 1; // records processed concurrently in run_batch
};

// Alternates verifier and updater on the current answer at most
// cfg.max_iterations times; halts early when the feedback contains the
// faithful sentinel (case-insensitive substring). Appends every step to the
// trajectory, sets halted_by, and returns the final answer text.
std::string refine_loop(Trajectory& traj, std::string current_answer, llm::Gateway& gateway,
                        const prompts::TemplateSet& ts, const AgentConfig& cfg,
                        const std::string& ledger_tag);

struct RteOutcome {
    Trajectory trajectory;
    std::vector<kg::Triplet> triplets;
    std::vector<kg::View> views; // parallel to triplets
};

// Three view dialogs (turn 1 types, turn 2 triplets), union with dedup by
// case-folded fields, then the refinement loop; final triplets are re-parsed
// from the last revision. Backend errors preserve the partial trajectory.
RteOutcome run_rte(const ingest::RteRecord& rec, llm::Gateway& gateway,
                   const prompts::TemplateSet& ts, const AgentConfig& cfg);

struct KgcOutcome {
    Trajectory trajectory;
    std::optional<tools::Rcc5Relation> relation;
};

// KGC instruction, tool request + invocation, deliberation with the results,
// refinement loop, relation parsed from the final revision.
KgcOutcome run_kgc(const ingest::KgcRecord& rec, llm::Gateway& gateway,
                   const prompts::TemplateSet& ts, const AgentConfig& cfg);

struct RecordFailure {
    std::string record_id;
    std::string message;
};

struct BatchResult {
    kg::UrbanGraph graph;
    std::vector<Trajectory> trajectories; // input order: RTE records then KGC
    llm::LedgerSnapshot ledger;
    std::vector<RecordFailure> failures;
};

// RTE records then KGC records; per-record failures are isolated. Records
// may run in parallel up to cfg.parallelism; the graph is accumulated
// single-threaded in input order afterwards.
BatchResult run_batch(std::span<const ingest::RteRecord> rte_records,
                      std::span<const ingest::KgcRecord> kgc_records, llm::Gateway& gateway,
                      const prompts::TemplateSet& ts, const AgentConfig& cfg);

// One step per line plus a terminal halt line per record; replayable.
void write_trajectory_log(const std::filesystem::path& path,
                          std::span<const Trajectory> trajectories);
std::vector<Trajectory> read_trajectory_log(const std::filesystem::path& path);

} // namespace urbankg::agent
