#include "urbankg/agent.hpp"

#include <algorithm>
#include <fstream>
#include <map>

#include <json.hpp>

#include "urbankg/text_util.hpp"

namespace urbankg::agent {

using nlohmann::json;

std::string_view step_kind_name(StepKind k) {
    switch (k) {
        case StepKind::Instruction: return "Instruction";
        case StepKind::ModelResponse: return "ModelResponse";
        case StepKind::ToolCall: return "ToolCall";
        case StepKind::ToolResult: return "ToolResult";
        case StepKind::VerifierFeedback: return "VerifierFeedback";
        case StepKind::UpdaterRevision: return "UpdaterRevision";
    }
    return "?";
}

std::optional<StepKind> step_kind_from_name(std::string_view s) {
    for (StepKind k : {StepKind::Instruction, StepKind::ModelResponse, StepKind::ToolCall,
                       StepKind::ToolResult, StepKind::VerifierFeedback,
                       StepKind::UpdaterRevision})
        if (s == step_kind_name(k)) return k;
    return std::nullopt;
}

std::string_view halt_name(Halt h) {
    switch (h) {
        case Halt::Faithful: return "Faithful";
        case Halt::MaxIterations: return "MaxIterations";
        case Halt::Error: return "Error";
    }
    return "?";
}

// --- response parsing --------------------------------------------------------

ParsedTriplets parse_triplets(std::string_view response) {
    ParsedTriplets out;
    for (const std::string& raw : text::split_lines(response)) {
        std::string line = text::trim(raw);
        if (line.empty()) continue;
        size_t open = line.find('<');
        size_t close = line.rfind('>');
        bool matched = false;
        if (open != std::string::npos && close != std::string::npos && open < close) {
            std::string body = line.substr(open + 1, close - open - 1);
            size_t first = body.find(',');
            size_t last = body.rfind(',');
            if (first != std::string::npos && last != first) {
                TripletText t{text::trim(body.substr(0, first)),
                              text::trim(body.substr(first + 1, last - first - 1)),
                              text::trim(body.substr(last + 1))};
                if (!t.head.empty() && !t.relation.empty() && !t.tail.empty()) {
                    out.triplets.push_back(std::move(t));
                    matched = true;
                }
            }
        }
        if (!matched) ++out.ignored_lines;
    }
    if (out.triplets.empty())
        throw NoTripletsFound("no lines match the <head, relation, tail> grammar");
    return out;
}

std::string render_triplet_lines(std::span<const TripletText> triplets) {
    std::string out;
    for (const TripletText& t : triplets) {
        if (!out.empty()) out += '\n';
        out += "<" + t.head + ", " + t.relation + ", " + t.tail + ">";
    }
    return out;
}

namespace {

bool is_word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

// Last word-bounded occurrence of `needle` in `haystack`; npos if absent.
size_t last_word_occurrence(std::string_view haystack, std::string_view needle) {
    size_t best = std::string_view::npos;
    for (size_t pos = haystack.find(needle); pos != std::string_view::npos;
         pos = haystack.find(needle, pos + 1)) {
        bool left_ok = pos == 0 || !is_word_char(haystack[pos - 1]);
        size_t end = pos + needle.size();
        bool right_ok = end >= haystack.size() || !is_word_char(haystack[end]);
        if (left_ok && right_ok) best = pos;
    }
    return best;
}

} // namespace

tools::Rcc5Relation parse_relation(std::string_view response) {
    using tools::Rcc5Relation;
    static const std::vector<std::pair<std::string, Rcc5Relation>> kNames = {
        {"disconnection", Rcc5Relation::DC},   {"disconnected", Rcc5Relation::DC},
        {"external connection", Rcc5Relation::EC}, {"externally connected", Rcc5Relation::EC},
        {"equality", Rcc5Relation::EQ},        {"equal", Rcc5Relation::EQ},
        {"partial overlap", Rcc5Relation::PO}, {"partially overlapping", Rcc5Relation::PO},
        {"partially overlaps", Rcc5Relation::PO}, {"proper part", Rcc5Relation::IN},
    };

    size_t best_pos = std::string_view::npos;
    std::optional<tools::Rcc5Relation> best;

    for (tools::Rcc5Relation r : tools::kAllRcc5) {
        size_t pos = last_word_occurrence(response, tools::rcc5_code(r));
        if (pos != std::string_view::npos && (best_pos == std::string_view::npos || pos >= best_pos)) {
            best_pos = pos;
            best = r;
        }
    }
    std::string folded = text::fold(response);
    for (const auto& [name, r] : kNames) {
        size_t pos = last_word_occurrence(folded, name);
        if (pos != std::string_view::npos && (best_pos == std::string_view::npos || pos > best_pos)) {
            best_pos = pos;
            best = r;
        }
    }
    if (!best) throw NoRelationFound("no RCC relation mentioned in response");
    return *best;
}

std::vector<tools::ToolName> parse_tool_request(std::string_view response) {
    std::string folded = text::fold(response);
    std::vector<std::pair<size_t, tools::ToolName>> mentions;
    for (tools::ToolName t : tools::kAllTools) {
        std::string name = text::fold(tools::tool_name(t));
        for (size_t pos = folded.find(name); pos != std::string::npos;
             pos = folded.find(name, pos + 1)) {
            bool left_ok = pos == 0 || !is_word_char(folded[pos - 1]);
            size_t end = pos + name.size();
            bool right_ok = end >= folded.size() || !is_word_char(folded[end]);
            if (left_ok && right_ok) {
                mentions.emplace_back(pos, t);
                break; // first mention decides the order
            }
        }
    }
    std::sort(mentions.begin(), mentions.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<tools::ToolName> out;
    for (const auto& [pos, t] : mentions) out.push_back(t);
    return out;
}

std::vector<tools::ToolName> fallback_tools(geo::GeometryKind head, geo::GeometryKind tail) {
    using geo::GeometryKind;
    std::vector<tools::ToolName> out{tools::ToolName::Geohash, tools::ToolName::Distance};
    auto pair_is = [&](GeometryKind a, GeometryKind b) {
        return (head == a && tail == b) || (head == b && tail == a);
    };
    for (tools::ToolName t : tools::kAllTools) {
        auto kinds = tools::tool_input_kinds(t);
        if (!kinds[0] || !kinds[1]) continue;
        if (pair_is(*kinds[0], *kinds[1])) out.push_back(t);
    }
    return out;
}

// --- pipelines ---------------------------------------------------------------

namespace {

void add_step(Trajectory& traj, StepKind kind, std::string payload, int iteration = 0) {
    traj.steps.push_back({kind, std::move(payload), iteration});
}

llm::ChatRequest make_request(const AgentConfig& cfg, std::vector<llm::ChatMessage> messages) {
    llm::ChatRequest req;
    req.messages = std::move(messages);
    req.model_id = cfg.model_id;
    req.temperature = cfg.temperature;
    req.max_tokens = cfg.max_tokens;
    return req;
}

std::string chat_once(llm::Gateway& gateway, const AgentConfig& cfg, const std::string& prompt,
                      const std::string& tag) {
    return gateway.chat(make_request(cfg, {{llm::Role::User, prompt}}), tag).content;
}

// The trajectory as the verifier/updater sees it: model output and tool
// evidence only. Embedding instruction payloads would duplicate their
// trigger phrases inside later prompts.
std::string render_refinement_view(const Trajectory& traj, std::string_view current_answer) {
    std::string out;
    for (const TrajectoryStep& s : traj.steps) {
        if (s.kind != StepKind::ModelResponse && s.kind != StepKind::ToolResult &&
            s.kind != StepKind::UpdaterRevision)
            continue;
        out += "- ";
        out += s.payload;
        out += '\n';
    }
    out += "Current answer:\n";
    out += current_answer;
    return out;
}

// Case-insensitive detection; model outputs wrap the sentinel in prose.
bool is_faithful(std::string_view feedback) {
    return text::icontains(feedback, "faithful trajectory");
}

struct TypeLists {
    std::vector<std::string> entity_types;
    std::vector<std::string> relation_types;
};

TypeLists parse_type_lists(std::string_view response) {
    TypeLists out;
    for (const std::string& raw : text::split_lines(response)) {
        std::string folded = text::fold(raw);
        auto extract = [&](std::string_view header) -> std::vector<std::string> {
            size_t pos = folded.find(header);
            if (pos == std::string::npos) return {};
            std::string rest(text::trim(raw.substr(pos + header.size())));
            std::vector<std::string> items;
            for (const std::string& part : text::split(rest, ',')) {
                std::string item = text::trim(part);
                if (!item.empty()) items.push_back(item);
            }
            return items;
        };
        if (auto items = extract("entity types:"); !items.empty())
            out.entity_types = std::move(items);
        else if (auto items = extract("relation types:"); !items.empty())
            out.relation_types = std::move(items);
    }
    return out;
}

// Arranges head/tail into the argument order the tool expects; Geohash runs
// once per geometry. Returns nothing when the kinds do not fit.
std::vector<tools::ToolResult> invoke_for_record(tools::ToolName tool, const geo::Geometry& head,
                                                 const geo::Geometry& tail) {
    using tools::ToolName;
    if (tool == ToolName::Geohash) {
        std::vector<geo::Geometry> h{head}, t{tail};
        return {tools::invoke_tool(tool, h), tools::invoke_tool(tool, t)};
    }
    auto kinds = tools::tool_input_kinds(tool);
    std::vector<geo::Geometry> args;
    if (!kinds[0] || !kinds[1]) {
        args = {head, tail};
    } else if (head.kind == *kinds[0] && tail.kind == *kinds[1]) {
        args = {head, tail};
    } else if (tail.kind == *kinds[0] && head.kind == *kinds[1]) {
        args = {tail, head};
    } else {
        return {};
    }
    return {tools::invoke_tool(tool, args)};
}

} // namespace

std::string refine_loop(Trajectory& traj, std::string current_answer, llm::Gateway& gateway,
                        const prompts::TemplateSet& ts, const AgentConfig& cfg,
                        const std::string& ledger_tag) {
    bool has_response = std::any_of(traj.steps.begin(), traj.steps.end(), [](const auto& s) {
        return s.kind == StepKind::ModelResponse || s.kind == StepKind::UpdaterRevision;
    });
    if (!has_response)
        throw ParseError("refine_loop requires a trajectory with at least one model response");

    for (int iter = 1; iter <= cfg.max_iterations; ++iter) {
        std::string view = render_refinement_view(traj, current_answer);
        std::string verifier_prompt = prompts::build_verifier_prompt(ts, view);
        add_step(traj, StepKind::Instruction, verifier_prompt, iter);
        std::string feedback = chat_once(gateway, cfg, verifier_prompt, ledger_tag);
        add_step(traj, StepKind::VerifierFeedback, feedback, iter);
        if (is_faithful(feedback)) {
            traj.halted_by = Halt::Faithful;
            traj.final_answer = current_answer;
            return current_answer;
        }
        std::string updater_prompt = prompts::build_updater_prompt(ts, view, feedback);
        add_step(traj, StepKind::Instruction, updater_prompt, iter);
        std::string revision = chat_once(gateway, cfg, updater_prompt, ledger_tag);
        add_step(traj, StepKind::UpdaterRevision, revision, iter);
        current_answer = revision;
    }
    traj.halted_by = Halt::MaxIterations;
    traj.final_answer = current_answer;
    return current_answer;
}

RteOutcome run_rte(const ingest::RteRecord& rec, llm::Gateway& gateway,
                   const prompts::TemplateSet& ts, const AgentConfig& cfg) {
    RteOutcome out;
    Trajectory& traj = out.trajectory;
    traj.record_id = rec.id;
    traj.task = Task::Rte;

    std::vector<TripletText> combined;
    std::map<std::string, kg::View> view_of;

    try {
        for (prompts::ViewKind view : prompts::kAllViews) {
            std::string p1 = prompts::build_rte_view_turn1(ts, view, rec.text);
            add_step(traj, StepKind::Instruction, p1);
            std::string r1 = chat_once(gateway, cfg, p1, "rte");
            add_step(traj, StepKind::ModelResponse, r1);
            TypeLists types = parse_type_lists(r1);

            std::string p2 = prompts::build_rte_view_turn2(ts, view, rec.text,
                                                           types.entity_types,
                                                           types.relation_types);
            add_step(traj, StepKind::Instruction, p2);
            std::string r2 =
                gateway
                    .chat(make_request(cfg, {{llm::Role::User, p1},
                                             {llm::Role::Assistant, r1},
                                             {llm::Role::User, p2}}),
                          "rte")
                    .content;
            add_step(traj, StepKind::ModelResponse, r2);

            try {
                for (TripletText& t : parse_triplets(r2).triplets) {
                    std::string key = text::fold(t.head) + "\x1f" + text::fold(t.relation) +
                                      "\x1f" + text::fold(t.tail);
                    if (view_of.contains(key)) continue;
                    view_of[key] = prompts::to_graph_view(view);
                    combined.push_back(std::move(t));
                }
            } catch (const NoTripletsFound&) {
                // a view may legitimately contribute nothing
            }
        }

        std::string initial = render_triplet_lines(combined);
        std::string final_answer = refine_loop(traj, initial, gateway, ts, cfg, "rte");

        ParsedTriplets parsed = parse_triplets(final_answer);
        for (const TripletText& t : parsed.triplets) {
            std::string key = text::fold(t.head) + "\x1f" + text::fold(t.relation) + "\x1f" +
                              text::fold(t.tail);
            auto it = view_of.find(key);
            out.views.push_back(it == view_of.end() ? kg::View::Other : it->second);
            out.triplets.push_back(
                kg::Triplet{t.head, t.relation, t.tail, {rec.id, kg::Stage::Rte}, false});
        }
    } catch (const std::exception& e) {
        traj.halted_by = Halt::Error;
        traj.error = e.what();
        out.triplets.clear();
        out.views.clear();
    }
    return out;
}

KgcOutcome run_kgc(const ingest::KgcRecord& rec, llm::Gateway& gateway,
                   const prompts::TemplateSet& ts, const AgentConfig& cfg) {
    KgcOutcome out;
    Trajectory& traj = out.trajectory;
    traj.record_id = rec.id;
    traj.task = Task::Kgc;

    try {
        std::string instruction = prompts::build_kgc_instruction(ts, rec);
        add_step(traj, StepKind::Instruction, instruction);
        std::string reasoning = chat_once(gateway, cfg, instruction, "kgc");
        add_step(traj, StepKind::ModelResponse, reasoning);

        auto toolkit = prompts::default_toolkit();
        std::string tool_prompt = prompts::build_tool_prompt(ts, rec, toolkit);
        add_step(traj, StepKind::Instruction, tool_prompt);
        std::string tool_reply = chat_once(gateway, cfg, tool_prompt, "kgc");
        add_step(traj, StepKind::ModelResponse, tool_reply);

        std::vector<tools::ToolName> requested = parse_tool_request(tool_reply);
        if (requested.empty())
            requested = fallback_tools(rec.head_geometry.kind, rec.tail_geometry.kind);

        std::vector<tools::ToolResult> results;
        for (tools::ToolName tool : requested) {
            auto invocations = invoke_for_record(tool, rec.head_geometry, rec.tail_geometry);
            for (tools::ToolResult& r : invocations) {
                std::string call = std::string(tools::tool_name(tool)) + "(";
                for (size_t i = 0; i < r.inputs.size(); ++i) {
                    if (i) call += ", ";
                    call += geo::serialize_wkt(r.inputs[i]);
                }
                call += ")";
                add_step(traj, StepKind::ToolCall, call);
                add_step(traj, StepKind::ToolResult, tools::render_tool_result(r));
                results.push_back(std::move(r));
            }
        }

        std::string deliberation = prompts::build_deliberation_prompt(ts, results, reasoning);
        add_step(traj, StepKind::Instruction, deliberation);
        std::string revised = chat_once(gateway, cfg, deliberation, "kgc");
        add_step(traj, StepKind::ModelResponse, revised);

        std::string final_answer = refine_loop(traj, revised, gateway, ts, cfg, "kgc");
        out.relation = parse_relation(final_answer);
    } catch (const std::exception& e) {
        traj.halted_by = Halt::Error;
        traj.error = e.what();
        out.relation.reset();
    }
    return out;
}

BatchResult run_batch(std::span<const ingest::RteRecord> rte_records,
                      std::span<const ingest::KgcRecord> kgc_records, llm::Gateway& gateway,
                      const prompts::TemplateSet& ts, const AgentConfig& cfg) {
    BatchResult out;
    std::vector<RteOutcome> rte_outcomes(rte_records.size());
    std::vector<KgcOutcome> kgc_outcomes(kgc_records.size());

    const long n_rte = static_cast<long>(rte_records.size());
    const long n_kgc = static_cast<long>(kgc_records.size());
    const int threads = std::max(1, cfg.parallelism);

#pragma omp parallel for schedule(dynamic, 1) num_threads(threads) if (threads > 1)
    for (long i = 0; i < n_rte; ++i)
        rte_outcomes[i] = run_rte(rte_records[i], gateway, ts, cfg);
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads) if (threads > 1)
    for (long i = 0; i < n_kgc; ++i)
        kgc_outcomes[i] = run_kgc(kgc_records[i], gateway, ts, cfg);

    for (size_t i = 0; i < rte_outcomes.size(); ++i) {
        RteOutcome& o = rte_outcomes[i];
        if (o.trajectory.halted_by == Halt::Error)
            out.failures.push_back({rte_records[i].id, o.trajectory.error});
        for (size_t j = 0; j < o.triplets.size(); ++j)
            out.graph.add_triplet(o.triplets[j], o.views[j]);
        out.trajectories.push_back(std::move(o.trajectory));
    }
    for (size_t i = 0; i < kgc_outcomes.size(); ++i) {
        KgcOutcome& o = kgc_outcomes[i];
        const ingest::KgcRecord& rec = kgc_records[i];
        if (o.trajectory.halted_by == Halt::Error)
            out.failures.push_back({rec.id, o.trajectory.error});
        if (o.relation) {
            out.graph.upsert_entity({rec.head_name, rec.head_geometry, std::nullopt, {}});
            out.graph.upsert_entity({rec.tail_name, rec.tail_geometry, std::nullopt, {}});
            out.graph.add_triplet(kg::Triplet{rec.head_name,
                                              std::string(tools::rcc5_code(*o.relation)),
                                              rec.tail_name,
                                              {rec.id, kg::Stage::Kgc},
                                              false},
                                  kg::View::Spatial);
        }
        out.trajectories.push_back(std::move(o.trajectory));
    }
    out.ledger = gateway.ledger().snapshot();
    return out;
}

void write_trajectory_log(const std::filesystem::path& path,
                          std::span<const Trajectory> trajectories) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    for (const Trajectory& traj : trajectories) {
        for (const TrajectoryStep& s : traj.steps)
            out << json{{"record_id", traj.record_id},
                        {"task", std::string(kg::stage_name(traj.task))},
                        {"kind", std::string(step_kind_name(s.kind))},
                        {"iteration", s.iteration},
                        {"payload", s.payload}}
                       .dump()
                << '\n';
        json halt{{"record_id", traj.record_id},
                  {"task", std::string(kg::stage_name(traj.task))},
                  {"kind", "Halt"},
                  {"halted_by", std::string(halt_name(traj.halted_by))},
                  {"final_answer", traj.final_answer}};
        if (!traj.error.empty()) halt["error"] = traj.error;
        out << halt.dump() << '\n';
    }
}

std::vector<Trajectory> read_trajectory_log(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open for reading: " + path.string());
    std::vector<Trajectory> out;
    std::map<std::string, size_t> index;
    std::string line;
    while (std::getline(in, line)) {
        if (text::trim(line).empty()) continue;
        json j = json::parse(line);
        std::string id = j.at("record_id").get<std::string>();
        auto [it, inserted] = index.try_emplace(id, out.size());
        if (inserted) {
            Trajectory t;
            t.record_id = id;
            if (auto task = kg::stage_from_name(j.value("task", "RTE"))) t.task = *task;
            out.push_back(std::move(t));
        }
        Trajectory& traj = out[it->second];
        std::string kind = j.value("kind", "");
        if (kind == "Halt") {
            traj.final_answer = j.value("final_answer", "");
            std::string halted = j.value("halted_by", "Error");
            traj.halted_by = halted == "Faithful"        ? Halt::Faithful
                             : halted == "MaxIterations" ? Halt::MaxIterations
                                                         : Halt::Error;
            traj.error = j.value("error", "");
        } else if (auto k = step_kind_from_name(kind)) {
            traj.steps.push_back({*k, j.value("payload", ""), j.value("iteration", 0)});
        }
    }
    return out;
}

} // namespace urbankg::agent
