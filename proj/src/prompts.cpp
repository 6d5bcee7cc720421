#include "urbankg/prompts.hpp"

#include <fstream>
#include <sstream>

#include "urbankg/text_util.hpp"

namespace urbankg::prompts {

std::string_view view_kind_name(ViewKind v) {
    switch (v) {
        case ViewKind::Spatial: return "spatial";
        case ViewKind::Temporal: return "temporal";
        case ViewKind::Functional: return "functional";
    }
    return "?";
}

kg::View to_graph_view(ViewKind v) {
    switch (v) {
        case ViewKind::Spatial: return kg::View::Spatial;
        case ViewKind::Temporal: return kg::View::Temporal;
        case ViewKind::Functional: return kg::View::Functional;
    }
    return kg::View::Other;
}

std::optional<Paradigm> paradigm_from_name(std::string_view s) {
    std::string f = text::fold(s);
    if (f == "zsl") return Paradigm::Zsl;
    if (f == "icl") return Paradigm::Icl;
    return std::nullopt;
}

namespace {

const std::map<std::string, std::string>& builtin_templates() {
    static const std::map<std::string, std::string> templates = {
        {"spatial_entity_definitions",
         "Spatial entities are places anchored to a location in the city: points of interest, "
         "buildings, roads, bridges, districts, areas of interest, neighborhoods, and natural "
         "features such as parks, rivers, and bays."},
        {"spatial_relation_definitions",
         "Spatial relations describe where entities sit relative to each other, for example: "
         "locate-in, near, adjacent-to, borders, crosses, north-of, part-of."},
        {"temporal_entity_definitions",
         "Temporal entities are dates, years, periods, and events with a time extent, such as "
         "founding years, construction dates, and opening ceremonies."},
        {"temporal_relation_definitions",
         "Temporal relations connect an entity to a time or order events, for example: built-in, "
         "founded-in, opened-in, renovated-in, happened-before, happened-after."},
        {"functional_entity_definitions",
         "Functional entities are the roles, services, and activities an urban place supports: "
         "institutions, businesses, service categories such as education, transit, and retail, "
         "and the groups they serve."},
        {"functional_relation_definitions",
         "Functional relations describe what an entity does or provides, for example: serves-as, "
         "provides, used-for, operated-by, offers."},
        {"rcc_definitions",
         "The five candidate geospatial relationships:\n"
         "DC (disconnection): the two regions share no point.\n"
         "EC (external connection): the regions touch only at their boundaries.\n"
         "EQ (equality): the regions cover exactly the same area.\n"
         "PO (partial overlap): the interiors overlap but neither region contains the other.\n"
         "IN (proper part): one region lies entirely within the other, tangentially or "
         "non-tangentially."},
        {"rte_turn1",
         "You are building an urban knowledge graph from city text.\n"
         "Focus on the {{view_name}} view.\n"
         "{{entity_definitions}}\n"
         "{{relation_definitions}}\n"
         "\n"
         "Urban text:\n"
         "{{text}}\n"
         "\n"
         "From the {{view_name}} view, list the candidate entity types and relation types "
         "present in the text.\n"
         "Reply with two lines:\n"
         "Entity types: <comma-separated list>\n"
         "Relation types: <comma-separated list>"},
        {"rte_turn2",
         "You are building an urban knowledge graph from city text.\n"
         "Focus on the {{view_name}} view.\n"
         "Candidate entity types: {{entity_types}}\n"
         "Candidate relation types: {{relation_types}}\n"
         "\n"
         "Urban text:\n"
         "{{text}}\n"
         "\n"
         "Extract every {{view_name}} relational triplet from the text, using the candidate "
         "types as guidance.\n"
         "Output one triplet per line in the form {{grammar}}.\n"
         "{{cot}}"},
        {"kgc_instruction",
         "You are completing an urban knowledge graph.\n"
         "Head entity: {{head_name}}\n"
         "Head geometry: {{head_wkt}}\n"
         "Tail entity: {{tail_name}}\n"
         "Tail geometry: {{tail_wkt}}\n"
         "\n"
         "{{rcc_definitions}}\n"
         "\n"
         "Using the longitude and latitude in the geometry values, decide which single "
         "relationship holds between the head entity and the tail entity. Answer with exactly "
         "one of: DC, EC, EQ, PO, IN.\n"
         "{{cot}}"},
        {"tool_prompt",
         "External geospatial tool interfaces are available to support your reasoning.\n"
         "Available tools:\n"
         "{{tool_lines}}\n"
         "\n"
         "Head entity: {{head_name}} with geometry {{head_wkt}}\n"
         "Tail entity: {{tail_name}} with geometry {{tail_wkt}}\n"
         "\n"
         "{{ask}}"},
        {"deliberation",
         "The requested geospatial tools were executed. Calculation results:\n"
         "{{result_lines}}\n"
         "\n"
         "Your reasoning so far:\n"
         "{{trajectory}}\n"
         "\n"
         "{{trigger}}"},
        {"verifier",
         "Below is the reasoning trajectory of an urban knowledge graph task.\n"
         "\n"
         "{{trajectory}}\n"
         "\n"
         "{{trigger}}\n"
         "If the trajectory no longer requires modification, respond with \"{{sentinel}}\"."},
        {"updater",
         "Below is the reasoning trajectory of an urban knowledge graph task.\n"
         "\n"
         "{{trajectory}}\n"
         "\n"
         "Feedback:\n"
         "{{feedback}}\n"
         "\n"
         "{{trigger}}"},
        {"eval_rte",
         "Evaluate the following urban relational triplet extraction result.\n"
         "\n"
         "Urban text:\n"
         "{{text}}\n"
         "\n"
         "Extracted triplets:\n"
         "{{results}}\n"
         "\n"
         "Count how many extracted triplets are true and how many are false with respect to "
         "the text.\n"
         "Reply with three lines:\n"
         "True triplets: <number>\n"
         "False triplets: <number>\n"
         "Confidence: <integer from 1 to 5>"},
        {"eval_kgc",
         "Evaluate the following geospatial relationship prediction.\n"
         "\n"
         "Head entity: {{head_name}} with geometry {{head_wkt}}\n"
         "Tail entity: {{tail_name}} with geometry {{tail_wkt}}\n"
         "Predicted relationship: {{relation}}\n"
         "\n"
         "Geospatial tool calculation results:\n"
         "{{evidence_lines}}\n"
         "\n"
         "Judge whether the predicted relationship is correct.\n"
         "Reply with two lines:\n"
         "Verdict: <True or False>\n"
         "Confidence: <integer from 1 to 5>"},
        {"baseline_zsl_rte",
         "Task: extract urban relational triplets from the text below. A triplet connects a "
         "head entity to a tail entity through a relation. Output one triplet per line in the "
         "form {{grammar}}.\n"
         "\n"
         "Urban text:\n"
         "{{text}}"},
        {"baseline_zsl_kgc",
         "Task: given a head entity and a tail entity with their geometry values, predict the "
         "missing geospatial relationship. Answer with exactly one of: DC, EC, EQ, PO, IN.\n"
         "\n"
         "Head entity: {{head_name}} with geometry {{head_wkt}}\n"
         "Tail entity: {{tail_name}} with geometry {{tail_wkt}}"},
        {"icl_preamble",
         "Here are solved examples of the task:\n"
         "{{demos}}\n"
         "\n"},
        {"cluster_merge",
         "The following relation labels from an urban knowledge graph may be semantically "
         "similar:\n"
         "{{labels}}\n"
         "\n"
         "Identify the subsets that should be merged into a single relation category.\n"
         "For each merge, reply with one line in the form:\n"
         "merge: <label>, <label> -> <canonical label>\n"
         "If nothing should be merged, reply with: no merge"},
    };
    return templates;
}

} // namespace

TemplateSet TemplateSet::builtin() {
    TemplateSet ts;
    ts.templates_ = builtin_templates();
    ts.version_ = "default";
    return ts;
}

TemplateSet TemplateSet::load_dir(const std::filesystem::path& dir) {
    TemplateSet ts = builtin();
    if (!std::filesystem::is_directory(dir))
        throw PromptError("template directory does not exist: " + dir.string());
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (!entry.is_regular_file() || entry.path().extension() != ".txt") continue;
        std::ifstream in(entry.path());
        std::ostringstream body;
        body << in.rdbuf();
        std::string content = body.str();
        if (!content.empty() && content.back() == '\n') content.pop_back();
        ts.templates_[entry.path().stem().string()] = content;
    }
    ts.version_ = dir.filename().string();
    return ts;
}

bool TemplateSet::has(std::string_view name) const {
    return templates_.contains(std::string(name));
}

std::string TemplateSet::render(std::string_view name,
                                const std::map<std::string, std::string>& slots) const {
    auto it = templates_.find(std::string(name));
    if (it == templates_.end())
        throw PromptError("unknown template: " + std::string(name));
    const std::string& tpl = it->second;
    std::string out;
    out.reserve(tpl.size());
    size_t pos = 0;
    while (pos < tpl.size()) {
        size_t open = tpl.find("{{", pos);
        if (open == std::string::npos) {
            out.append(tpl, pos, std::string::npos);
            break;
        }
        out.append(tpl, pos, open - pos);
        size_t close = tpl.find("}}", open + 2);
        if (close == std::string::npos)
            throw PromptError("unterminated slot in template '" + std::string(name) + "'");
        std::string slot = tpl.substr(open + 2, close - open - 2);
        auto sit = slots.find(slot);
        if (sit == slots.end())
            throw PromptError("unbound slot '" + slot + "' in template '" + std::string(name) +
                              "'");
        out += sit->second;
        pos = close + 2;
    }
    return out;
}

namespace {

std::string join(std::span<const std::string> items, std::string_view sep) {
    std::string out;
    for (size_t i = 0; i < items.size(); ++i) {
        if (i) out += sep;
        out += items[i];
    }
    return out;
}

std::map<std::string, std::string> kgc_slots(const ingest::KgcRecord& rec) {
    return {{"head_name", rec.head_name},
            {"head_wkt", geo::serialize_wkt(rec.head_geometry)},
            {"tail_name", rec.tail_name},
            {"tail_wkt", geo::serialize_wkt(rec.tail_geometry)}};
}

} // namespace

std::string build_rte_view_turn1(const TemplateSet& ts, ViewKind view, std::string_view text) {
    if (text::trim(text).empty()) throw PromptError("rte turn 1 requires non-empty text");
    std::string v(view_kind_name(view));
    return ts.render("rte_turn1",
                     {{"view_name", v},
                      {"entity_definitions", ts.render(v + "_entity_definitions", {})},
                      {"relation_definitions", ts.render(v + "_relation_definitions", {})},
                      {"text", std::string(text)}});
}

std::string build_rte_view_turn2(const TemplateSet& ts, ViewKind view, std::string_view text,
                                 std::span<const std::string> entity_types,
                                 std::span<const std::string> relation_types) {
    if (text::trim(text).empty()) throw PromptError("rte turn 2 requires non-empty text");
    return ts.render("rte_turn2",
                     {{"view_name", std::string(view_kind_name(view))},
                      {"entity_types",
                       entity_types.empty() ? "(unconstrained)" : join(entity_types, ", ")},
                      {"relation_types",
                       relation_types.empty() ? "(unconstrained)" : join(relation_types, ", ")},
                      {"text", std::string(text)},
                      {"grammar", std::string(kTripletGrammar)},
                      {"cot", std::string(kCotTrigger)}});
}

std::string build_kgc_instruction(const TemplateSet& ts, const ingest::KgcRecord& rec) {
    auto slots = kgc_slots(rec);
    slots["rcc_definitions"] = ts.render("rcc_definitions", {});
    slots["cot"] = std::string(kCotTrigger);
    return ts.render("kgc_instruction", slots);
}

std::vector<ToolkitEntry> default_toolkit() {
    std::vector<ToolkitEntry> out;
    for (tools::ToolName t : tools::kAllTools)
        out.emplace_back(t, std::string(tools::tool_description(t)));
    return out;
}

std::string build_tool_prompt(const TemplateSet& ts, const ingest::KgcRecord& rec,
                              std::span<const ToolkitEntry> toolkit) {
    if (toolkit.empty()) throw PromptError("tool prompt requires a non-empty toolkit");
    std::string lines;
    for (size_t i = 0; i < toolkit.size(); ++i) {
        if (i) lines += '\n';
        lines += std::string(tools::tool_name(toolkit[i].first)) + ": " + toolkit[i].second;
    }
    auto slots = kgc_slots(rec);
    slots["tool_lines"] = lines;
    slots["ask"] = std::string(kToolAsk);
    return ts.render("tool_prompt", slots);
}

std::string build_deliberation_prompt(const TemplateSet& ts,
                                      std::span<const tools::ToolResult> results,
                                      std::string_view prior_trajectory) {
    std::string lines;
    if (results.empty()) {
        lines = "(no tool results)";
    } else {
        for (size_t i = 0; i < results.size(); ++i) {
            if (i) lines += '\n';
            lines += tools::render_tool_result(results[i]);
        }
    }
    return ts.render("deliberation", {{"result_lines", lines},
                                      {"trajectory", std::string(prior_trajectory)},
                                      {"trigger", std::string(kDeliberateTrigger)}});
}

std::string build_verifier_prompt(const TemplateSet& ts, std::string_view trajectory) {
    if (text::trim(trajectory).empty()) throw PromptError("verifier requires a trajectory");
    return ts.render("verifier", {{"trajectory", std::string(trajectory)},
                                  {"trigger", std::string(kVerifierTrigger)},
                                  {"sentinel", std::string(kFaithfulSentinel)}});
}

std::string build_updater_prompt(const TemplateSet& ts, std::string_view trajectory,
                                 std::string_view feedback) {
    if (text::trim(trajectory).empty()) throw PromptError("updater requires a trajectory");
    return ts.render("updater", {{"trajectory", std::string(trajectory)},
                                 {"feedback", std::string(feedback)},
                                 {"trigger", std::string(kUpdaterTrigger)}});
}

std::string build_eval_prompt_rte(const TemplateSet& ts, std::string_view text,
                                  std::string_view results) {
    return ts.render("eval_rte",
                     {{"text", std::string(text)}, {"results", std::string(results)}});
}

std::string build_eval_prompt_kgc(const TemplateSet& ts, const ingest::KgcRecord& rec,
                                  tools::Rcc5Relation predicted,
                                  std::span<const std::string> evidence_lines) {
    auto slots = kgc_slots(rec);
    slots["relation"] = std::string(tools::rcc5_code(predicted));
    slots["evidence_lines"] = join(evidence_lines, "\n");
    return ts.render("eval_kgc", slots);
}

namespace {

std::string render_demos(const TemplateSet& ts, std::span<const Demo> demos) {
    std::string block;
    for (size_t i = 0; i < demos.size(); ++i) {
        if (i) block += "\n\n";
        block += "Question:\n" + demos[i].first + "\nAnswer:\n" + demos[i].second;
    }
    return ts.render("icl_preamble", {{"demos", block}});
}

} // namespace

std::string build_baseline_rte(const TemplateSet& ts, Paradigm paradigm, std::string_view text,
                               std::span<const Demo> demos) {
    std::string body = ts.render(
        "baseline_zsl_rte",
        {{"text", std::string(text)}, {"grammar", std::string(kTripletGrammar)}});
    if (paradigm == Paradigm::Zsl) return body;
    return render_demos(ts, demos) + body;
}

std::string build_baseline_kgc(const TemplateSet& ts, Paradigm paradigm,
                               const ingest::KgcRecord& rec, std::span<const Demo> demos) {
    std::string body = ts.render("baseline_zsl_kgc", kgc_slots(rec));
    if (paradigm == Paradigm::Zsl) return body;
    return render_demos(ts, demos) + body;
}

std::string build_cluster_merge_prompt(const TemplateSet& ts,
                                       std::span<const std::string> labels) {
    if (labels.empty()) throw PromptError("cluster merge prompt requires labels");
    return ts.render("cluster_merge", {{"labels", join(labels, "\n")}});
}

} // namespace urbankg::prompts
