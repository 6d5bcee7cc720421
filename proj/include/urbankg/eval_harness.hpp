#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "urbankg/agent.hpp"
#include "urbankg/geotools.hpp"
#include "urbankg/ingest.hpp"
#include "urbankg/llm_gateway.hpp"
#include "urbankg/prompts.hpp"

namespace urbankg::eval {

using Task = kg::Stage;

enum class Evaluator { Human, Model };

std::string_view evaluator_name(Evaluator e);

struct EvalJudgment {
    std::string item_id;
    Task task = Task::Rte;
    bool kgc_verdict = false; // KGC only
    int true_count = 0;       // RTE only
    int false_count = 0;      // RTE only
    double confidence = 3.0;  // 1..5
    Evaluator evaluator = Evaluator::Model;
    int repeat_index = 0;
};

class EvalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};
class EmptyInput : public EvalError {
public:
    using EvalError::EvalError;
};
class LengthMismatch : public EvalError {
public:
    using EvalError::EvalError;
};
class DegenerateInput : public EvalError {
public:
    using EvalError::EvalError;
};

// RTE: sum of true counts over all counted triplets. KGC: fraction of True
// verdicts. All judgments must share one task.
double accuracy(std::span<const EvalJudgment> judgments);

// One evaluation item: the record under judgment plus the model's result.
struct EvalItem {
    std::string item_id;
    Task task = Task::Rte;
    // RTE fields
    std::string text;
    std::string results; // triplet lines
    // KGC fields
    std::optional<ingest::KgcRecord> record;
    std::optional<tools::Rcc5Relation> relation;
};

// The eight evidence lines for a KGC evaluation prompt: one per tool, in
// table order; tools that do not fit the record's geometry kinds render as
// "n/a", Geohash carries both entities' codes.
std::vector<std::string> kgc_evidence_lines(const ingest::KgcRecord& rec);

struct ModelEvalConfig {
    std::string model_id;
    int repeats = 1;
    int max_tokens = 512;
};

struct ModelEvalOutcome {
    std::vector<EvalJudgment> repeats; // every individual judgment
    std::vector<EvalJudgment> final;   // one majority verdict per item
    std::vector<std::string> unevaluated; // item ids excluded from accuracy
};

// Queries the backend `repeats` times per item and majority-votes the
// verdicts; backend errors or unparseable replies mark the item unevaluated.
ModelEvalOutcome model_evaluate(std::span<const EvalItem> items, llm::Gateway& gateway,
                                const prompts::TemplateSet& ts, const ModelEvalConfig& cfg);

// Majority vote across the repeats of one item: KGC by verdict (even ties
// resolve to False), RTE by (true_count, false_count) pair (ties resolve to
// the smallest true count, then the largest false count); confidence is the
// mean over repeats.
EvalJudgment majority_vote(std::span<const EvalJudgment> repeats);

std::optional<EvalJudgment> parse_eval_response(std::string_view response, Task task);

// Rank correlation with average ranks for ties.
double spearman(std::span<const double> x, std::span<const double> y);

struct GroupCorrelation {
    std::string group;
    double coefficient = 0.0;
    size_t item_count = 0;
};

struct ConsistencyReport {
    std::vector<GroupCorrelation> groups;
    std::optional<double> overall;
    std::vector<std::string> skipped; // groups without usable overlap
};

// Aligns human and model judgments by item id within each group (RTE items
// compare true counts, KGC items compare 0/1 verdicts) and reports the
// Spearman coefficient per group plus pooled overall.
ConsistencyReport consistency_report(std::span<const EvalJudgment> human,
                                     std::span<const EvalJudgment> model,
                                     const std::map<std::string, std::string>& item_group);

struct CostLine {
    std::string tag;
    long calls = 0;
    long prompt_tokens = 0;
    long completion_tokens = 0;
    double wall_s = 0.0;
    double cost = 0.0;
};

struct CostReport {
    std::vector<CostLine> totals;   // per tag plus a "total" line
    std::vector<CostLine> per_1000; // normalized per 1000 records, when counts given
};

CostReport cost_report(const llm::LedgerSnapshot& ledger,
                       const std::map<std::string, size_t>& record_counts, bool per_1000);
std::string format_cost_report(const CostReport& report);

void save_judgments(const std::filesystem::path& path, std::span<const EvalJudgment> judgments);
std::vector<EvalJudgment> load_judgments(const std::filesystem::path& path);

void save_eval_items(const std::filesystem::path& path, std::span<const EvalItem> items);
std::vector<EvalItem> load_eval_items(const std::filesystem::path& path);

} // namespace urbankg::eval
