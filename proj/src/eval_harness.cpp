#include "urbankg/eval_harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "urbankg/text_util.hpp"

namespace urbankg::eval {

using nlohmann::json;

std::string_view evaluator_name(Evaluator e) { return e == Evaluator::Human ? "human" : "model"; }

double accuracy(std::span<const EvalJudgment> judgments) {
    if (judgments.empty()) throw EmptyInput("no judgments");
    Task task = judgments.front().task;
    for (const EvalJudgment& j : judgments)
        if (j.task != task) throw EvalError("judgments mix RTE and KGC tasks");

    if (task == Task::Rte) {
        long true_total = 0, all_total = 0;
        for (const EvalJudgment& j : judgments) {
            true_total += j.true_count;
            all_total += j.true_count + j.false_count;
        }
        if (all_total == 0) throw EmptyInput("no counted triplets");
        return static_cast<double>(true_total) / static_cast<double>(all_total);
    }
    long positives = 0;
    for (const EvalJudgment& j : judgments) positives += j.kgc_verdict ? 1 : 0;
    return static_cast<double>(positives) / static_cast<double>(judgments.size());
}

std::vector<std::string> kgc_evidence_lines(const ingest::KgcRecord& rec) {
    std::vector<std::string> lines;
    for (tools::ToolName t : tools::kAllTools) {
        if (t == tools::ToolName::Geohash) {
            lines.push_back("tool(Geohash)=head:" + tools::geohash_encode(rec.head_geometry) +
                            " tail:" + tools::geohash_encode(rec.tail_geometry));
            continue;
        }
        if (t == tools::ToolName::Distance) {
            std::vector<geo::Geometry> args{rec.head_geometry, rec.tail_geometry};
            lines.push_back(tools::render_tool_result(tools::invoke_tool(t, args)));
            continue;
        }
        auto kinds = tools::tool_input_kinds(t);
        std::vector<geo::Geometry> args;
        if (rec.head_geometry.kind == *kinds[0] && rec.tail_geometry.kind == *kinds[1])
            args = {rec.head_geometry, rec.tail_geometry};
        else if (rec.tail_geometry.kind == *kinds[0] && rec.head_geometry.kind == *kinds[1])
            args = {rec.tail_geometry, rec.head_geometry};
        if (args.empty()) {
            lines.push_back("tool(" + std::string(tools::tool_name(t)) + ")=n/a");
            continue;
        }
        lines.push_back(tools::render_tool_result(tools::invoke_tool(t, args)));
    }
    return lines;
}

namespace {

std::optional<long> number_after(std::string_view folded, std::string_view header) {
    size_t pos = folded.find(header);
    if (pos == std::string_view::npos) return std::nullopt;
    pos += header.size();
    while (pos < folded.size() && !std::isdigit(static_cast<unsigned char>(folded[pos]))) {
        // a minus sign or digits must follow reasonably soon
        if (std::isalpha(static_cast<unsigned char>(folded[pos]))) return std::nullopt;
        ++pos;
    }
    if (pos >= folded.size()) return std::nullopt;
    long value = 0;
    while (pos < folded.size() && std::isdigit(static_cast<unsigned char>(folded[pos]))) {
        value = value * 10 + (folded[pos] - '0');
        ++pos;
    }
    return value;
}

std::optional<double> parse_confidence(std::string_view folded) {
    size_t pos = folded.find("confidence");
    if (pos == std::string_view::npos) return std::nullopt;
    pos += 10;
    while (pos < folded.size() &&
           !std::isdigit(static_cast<unsigned char>(folded[pos])))
        ++pos;
    if (pos >= folded.size()) return std::nullopt;
    size_t end = pos;
    while (end < folded.size() && (std::isdigit(static_cast<unsigned char>(folded[end])) ||
                                   folded[end] == '.'))
        ++end;
    try {
        double v = std::stod(std::string(folded.substr(pos, end - pos)));
        return std::clamp(v, 1.0, 5.0);
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

} // namespace

std::optional<EvalJudgment> parse_eval_response(std::string_view response, Task task) {
    std::string folded = text::fold(response);
    EvalJudgment j;
    j.task = task;
    j.evaluator = Evaluator::Model;
    if (auto conf = parse_confidence(folded)) j.confidence = *conf;

    if (task == Task::Rte) {
        auto t = number_after(folded, "true triplets");
        auto f = number_after(folded, "false triplets");
        if (!t || !f) return std::nullopt;
        j.true_count = static_cast<int>(*t);
        j.false_count = static_cast<int>(*f);
        return j;
    }
    // KGC: prefer an explicit "verdict:" line, else the last standalone
    // true/false word.
    size_t verdict_pos = folded.find("verdict");
    std::string_view scan = folded;
    if (verdict_pos != std::string::npos) scan = std::string_view(folded).substr(verdict_pos);
    size_t last_true = std::string_view::npos, last_false = std::string_view::npos;
    for (size_t pos = scan.find("true"); pos != std::string_view::npos;
         pos = scan.find("true", pos + 1)) {
        bool left = pos == 0 || !std::isalnum(static_cast<unsigned char>(scan[pos - 1]));
        bool right = pos + 4 >= scan.size() ||
                     !std::isalnum(static_cast<unsigned char>(scan[pos + 4]));
        if (left && right) last_true = pos;
    }
    for (size_t pos = scan.find("false"); pos != std::string_view::npos;
         pos = scan.find("false", pos + 1)) {
        bool left = pos == 0 || !std::isalnum(static_cast<unsigned char>(scan[pos - 1]));
        bool right = pos + 5 >= scan.size() ||
                     !std::isalnum(static_cast<unsigned char>(scan[pos + 5]));
        if (left && right) last_false = pos;
    }
    if (last_true == std::string_view::npos && last_false == std::string_view::npos)
        return std::nullopt;
    j.kgc_verdict = last_false == std::string_view::npos ||
                    (last_true != std::string_view::npos && last_true > last_false);
    return j;
}

EvalJudgment majority_vote(std::span<const EvalJudgment> repeats) {
    if (repeats.empty()) throw EmptyInput("majority vote over zero repeats");
    EvalJudgment out = repeats.front();
    double conf_sum = 0.0;
    for (const EvalJudgment& j : repeats) conf_sum += j.confidence;
    out.confidence = conf_sum / static_cast<double>(repeats.size());
    out.repeat_index = 0;

    if (out.task == Task::Kgc) {
        long trues = 0;
        for (const EvalJudgment& j : repeats) trues += j.kgc_verdict ? 1 : 0;
        long falses = static_cast<long>(repeats.size()) - trues;
        out.kgc_verdict = trues > falses; // even ties resolve to False
        return out;
    }
    std::map<std::pair<int, int>, int> counts;
    for (const EvalJudgment& j : repeats) counts[{j.true_count, j.false_count}] += 1;
    int best = 0;
    std::pair<int, int> winner{0, 0};
    bool first = true;
    for (const auto& [pair, n] : counts) {
        // Tie-break conservatively: fewer true triplets wins, then more false.
        bool better = n > best;
        if (n == best && !first) {
            better = pair.first < winner.first ||
                     (pair.first == winner.first && pair.second > winner.second);
        }
        if (first || better) {
            best = n;
            winner = pair;
            first = false;
        }
    }
    out.true_count = winner.first;
    out.false_count = winner.second;
    return out;
}

ModelEvalOutcome model_evaluate(std::span<const EvalItem> items, llm::Gateway& gateway,
                                const prompts::TemplateSet& ts, const ModelEvalConfig& cfg) {
    ModelEvalOutcome out;
    for (const EvalItem& item : items) {
        std::string prompt;
        if (item.task == Task::Rte) {
            prompt = prompts::build_eval_prompt_rte(ts, item.text, item.results);
        } else {
            if (!item.record || !item.relation) {
                out.unevaluated.push_back(item.item_id);
                continue;
            }
            prompt = prompts::build_eval_prompt_kgc(ts, *item.record, *item.relation,
                                                    kgc_evidence_lines(*item.record));
        }

        std::vector<EvalJudgment> votes;
        bool failed = false;
        for (int r = 0; r < cfg.repeats && !failed; ++r) {
            llm::ChatRequest req;
            req.messages = {{llm::Role::User, prompt}};
            req.model_id = cfg.model_id;
            req.max_tokens = cfg.max_tokens;
            try {
                std::string reply = gateway.chat(req, "eval").content;
                auto judged = parse_eval_response(reply, item.task);
                if (!judged) {
                    failed = true;
                    break;
                }
                judged->item_id = item.item_id;
                judged->repeat_index = r;
                votes.push_back(*judged);
            } catch (const llm::GatewayError&) {
                failed = true;
            }
        }
        if (failed || votes.empty()) {
            out.unevaluated.push_back(item.item_id);
            continue;
        }
        out.repeats.insert(out.repeats.end(), votes.begin(), votes.end());
        out.final.push_back(majority_vote(votes));
    }
    return out;
}

namespace {

std::vector<double> average_ranks(std::span<const double> v) {
    std::vector<size_t> order(v.size());
    for (size_t i = 0; i < v.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return v[a] < v[b]; });
    std::vector<double> ranks(v.size());
    size_t i = 0;
    while (i < order.size()) {
        size_t j = i;
        while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
        double rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
        i = j + 1;
    }
    return ranks;
}

double pearson(std::span<const double> x, std::span<const double> y) {
    double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        syy += y[i] * y[i];
        sxy += x[i] * y[i];
    }
    double vx = n * sxx - sx * sx;
    double vy = n * syy - sy * sy;
    if (vx <= 0.0 || vy <= 0.0) throw DegenerateInput("constant sequence");
    return (n * sxy - sx * sy) / std::sqrt(vx * vy);
}

} // namespace

double spearman(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw LengthMismatch("sequences differ in length");
    if (x.size() < 2) throw DegenerateInput("need at least two observations");
    std::vector<double> rx = average_ranks(x);
    std::vector<double> ry = average_ranks(y);
    return pearson(rx, ry);
}

ConsistencyReport consistency_report(std::span<const EvalJudgment> human,
                                     std::span<const EvalJudgment> model,
                                     const std::map<std::string, std::string>& item_group) {
    ConsistencyReport report;
    auto value_of = [](const EvalJudgment& j) {
        return j.task == Task::Rte ? static_cast<double>(j.true_count)
                                   : (j.kgc_verdict ? 1.0 : 0.0);
    };
    std::map<std::string, double> human_by_id, model_by_id;
    for (const EvalJudgment& j : human) human_by_id[j.item_id] = value_of(j);
    for (const EvalJudgment& j : model) model_by_id[j.item_id] = value_of(j);

    std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> groups;
    std::vector<double> all_h, all_m;
    for (const auto& [id, hv] : human_by_id) {
        auto mit = model_by_id.find(id);
        if (mit == model_by_id.end()) continue;
        std::string group = "all";
        if (auto git = item_group.find(id); git != item_group.end()) group = git->second;
        groups[group].first.push_back(hv);
        groups[group].second.push_back(mit->second);
        all_h.push_back(hv);
        all_m.push_back(mit->second);
    }
    for (const auto& [name, vectors] : groups) {
        try {
            report.groups.push_back(
                {name, spearman(vectors.first, vectors.second), vectors.first.size()});
        } catch (const EvalError& e) {
            report.skipped.push_back(name + ": " + e.what());
        }
    }
    try {
        report.overall = spearman(all_h, all_m);
    } catch (const EvalError&) {
        report.overall.reset();
    }
    return report;
}

CostReport cost_report(const llm::LedgerSnapshot& ledger,
                       const std::map<std::string, size_t>& record_counts, bool per_1000) {
    CostReport report;
    std::map<std::string, CostLine> by_tag;
    CostLine total;
    total.tag = "total";
    for (const llm::LedgerEntry& e : ledger) {
        CostLine& line = by_tag[e.tag.empty() ? "(untagged)" : e.tag];
        line.tag = e.tag.empty() ? "(untagged)" : e.tag;
        line.calls += e.calls;
        line.prompt_tokens += e.prompt_tokens;
        line.completion_tokens += e.completion_tokens;
        line.wall_s += e.wall_s;
        line.cost += e.cost;
        total.calls += e.calls;
        total.prompt_tokens += e.prompt_tokens;
        total.completion_tokens += e.completion_tokens;
        total.wall_s += e.wall_s;
        total.cost += e.cost;
    }
    for (const auto& [tag, line] : by_tag) report.totals.push_back(line);
    report.totals.push_back(total);

    if (per_1000) {
        for (const auto& [tag, line] : by_tag) {
            auto it = record_counts.find(tag);
            if (it == record_counts.end() || it->second == 0) continue;
            double scale = 1000.0 / static_cast<double>(it->second);
            CostLine norm = line;
            norm.tag = tag + "/1000";
            norm.calls = static_cast<long>(std::llround(line.calls * scale));
            norm.prompt_tokens = static_cast<long>(std::llround(line.prompt_tokens * scale));
            norm.completion_tokens =
                static_cast<long>(std::llround(line.completion_tokens * scale));
            norm.wall_s = line.wall_s * scale;
            norm.cost = line.cost * scale;
            report.per_1000.push_back(norm);
        }
    }
    return report;
}

std::string format_cost_report(const CostReport& report) {
    std::ostringstream out;
    auto print = [&](const CostLine& l) {
        out << l.tag << ": calls=" << l.calls << " prompt_tokens=" << l.prompt_tokens
            << " completion_tokens=" << l.completion_tokens << " wall_s=" << l.wall_s
            << " cost=" << l.cost << '\n';
    };
    for (const CostLine& l : report.totals) print(l);
    if (!report.per_1000.empty()) {
        out << "-- normalized per 1000 records --\n";
        for (const CostLine& l : report.per_1000) print(l);
    }
    return out.str();
}

void save_judgments(const std::filesystem::path& path, std::span<const EvalJudgment> judgments) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    for (const EvalJudgment& j : judgments) {
        json obj{{"item_id", j.item_id},
                 {"task", std::string(kg::stage_name(j.task))},
                 {"confidence", j.confidence},
                 {"evaluator", std::string(evaluator_name(j.evaluator))},
                 {"repeat_index", j.repeat_index}};
        if (j.task == Task::Kgc)
            obj["verdict"] = j.kgc_verdict;
        else {
            obj["true_count"] = j.true_count;
            obj["false_count"] = j.false_count;
        }
        out << obj.dump() << '\n';
    }
}

std::vector<EvalJudgment> load_judgments(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open for reading: " + path.string());
    std::vector<EvalJudgment> out;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (text::trim(line).empty()) continue;
        try {
            json j = json::parse(line);
            EvalJudgment e;
            e.item_id = j.at("item_id").get<std::string>();
            if (auto task = kg::stage_from_name(j.value("task", "RTE"))) e.task = *task;
            e.confidence = j.value("confidence", 3.0);
            e.evaluator =
                j.value("evaluator", "model") == "human" ? Evaluator::Human : Evaluator::Model;
            e.repeat_index = j.value("repeat_index", 0);
            if (e.task == Task::Kgc)
                e.kgc_verdict = j.value("verdict", false);
            else {
                e.true_count = j.value("true_count", 0);
                e.false_count = j.value("false_count", 0);
            }
            out.push_back(std::move(e));
        } catch (const json::exception& err) {
            throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": " +
                                     err.what());
        }
    }
    return out;
}

void save_eval_items(const std::filesystem::path& path, std::span<const EvalItem> items) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    for (const EvalItem& item : items) {
        json obj{{"item_id", item.item_id}, {"task", std::string(kg::stage_name(item.task))}};
        if (item.task == Task::Rte) {
            obj["text"] = item.text;
            obj["results"] = item.results;
        } else if (item.record && item.relation) {
            obj["head_name"] = item.record->head_name;
            obj["head_geometry"] = geo::serialize_wkt(item.record->head_geometry);
            obj["tail_name"] = item.record->tail_name;
            obj["tail_geometry"] = geo::serialize_wkt(item.record->tail_geometry);
            obj["relation"] = std::string(tools::rcc5_code(*item.relation));
        }
        out << obj.dump() << '\n';
    }
}

std::vector<EvalItem> load_eval_items(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open for reading: " + path.string());
    std::vector<EvalItem> out;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (text::trim(line).empty()) continue;
        try {
            json j = json::parse(line);
            EvalItem item;
            item.item_id = j.at("item_id").get<std::string>();
            if (auto task = kg::stage_from_name(j.value("task", "RTE"))) item.task = *task;
            if (item.task == Task::Rte) {
                item.text = j.value("text", "");
                item.results = j.value("results", "");
            } else {
                item.record = ingest::KgcRecord{
                    item.item_id, j.at("head_name").get<std::string>(),
                    geo::parse_wkt(j.at("head_geometry").get<std::string>()),
                    j.at("tail_name").get<std::string>(),
                    geo::parse_wkt(j.at("tail_geometry").get<std::string>())};
                item.relation = tools::rcc5_from_code(j.at("relation").get<std::string>());
            }
            out.push_back(std::move(item));
        } catch (const std::exception& err) {
            throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": " +
                                     err.what());
        }
    }
    return out;
}

} // namespace urbankg::eval
