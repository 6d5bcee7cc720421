#include "urbankg/postprocess.hpp"

#include <algorithm>
#include <fstream>
#include <functional>

#include <json.hpp>

#include "urbankg/text_util.hpp"

namespace urbankg::postprocess {

using nlohmann::json;

std::string_view merge_stage_name(MergeStage s) {
    return s == MergeStage::Frequency ? "frequency" : "cluster";
}

namespace {

// Collapse source->target chains so that every target is a fixed point, then
// drop self-maps. Cycles collapse onto their lexicographically smallest
// member.
void normalize_mapping(std::map<std::string, std::string>& mapping) {
    for (auto& [src, dst] : mapping) {
        std::set<std::string> seen{src};
        std::string target = dst;
        while (mapping.contains(target) && !seen.contains(target)) {
            seen.insert(target);
            target = mapping.at(target);
        }
        if (mapping.contains(target) && seen.contains(target)) {
            target = *std::min_element(seen.begin(), seen.end());
        }
        dst = target;
    }
    std::erase_if(mapping, [](const auto& kv) { return kv.first == kv.second; });
}

} // namespace

kg::UrbanGraph apply_merge_plan(const kg::UrbanGraph& g, const MergePlan& plan) {
    // Tolerate chained plans from disk: resolve to fixed points first.
    std::map<std::string, std::string> mapping = plan.mapping;
    normalize_mapping(mapping);
    kg::UrbanGraph out;
    for (const kg::Entity& e : g.entities()) out.upsert_entity(e);
    for (const kg::Triplet& t : g.facts()) {
        if (plan.dropped.contains(t.relation)) continue;
        kg::Triplet copy = t;
        std::string target = t.relation;
        if (auto it = mapping.find(t.relation); it != mapping.end()) target = it->second;
        copy.relation = target;
        const kg::Relation* r = g.find_relation(target);
        if (!r) r = g.find_relation(t.relation);
        out.add_triplet(std::move(copy), r ? r->view : kg::View::Other);
    }
    return out;
}

MergeOutcome merge_low_frequency(const kg::UrbanGraph& g, llm::Gateway& gateway,
                                 const std::string& embedding_model, int threshold_freq,
                                 double threshold_sim) {
    MergeOutcome out;
    out.plan.stage = MergeStage::Frequency;

    std::vector<std::string> low, high;
    for (const kg::Relation& r : g.relations())
        (r.frequency <= threshold_freq ? low : high).push_back(r.label);
    std::sort(low.begin(), low.end());
    std::sort(high.begin(), high.end());

    if (low.empty()) {
        out.graph = apply_merge_plan(g, out.plan); // structural copy
        return out;
    }

    std::vector<std::string> all = low;
    all.insert(all.end(), high.begin(), high.end());
    auto vectors = gateway.embed(all, embedding_model, "merge");

    for (size_t i = 0; i < low.size(); ++i) {
        double best_sim = -1.0;
        std::string best_label;
        for (size_t j = 0; j < high.size(); ++j) {
            double sim = llm::cosine(vectors[i], vectors[low.size() + j]);
            if (sim > best_sim) { // ties keep the lexicographically first label
                best_sim = sim;
                best_label = high[j];
            }
        }
        if (!high.empty() && best_sim >= threshold_sim)
            out.plan.mapping[low[i]] = best_label;
        else
            out.plan.dropped.insert(low[i]);
    }
    normalize_mapping(out.plan.mapping);
    out.graph = apply_merge_plan(g, out.plan);
    return out;
}

MergeOutcome cluster_and_merge(const kg::UrbanGraph& g, llm::Gateway& gateway,
                               const prompts::TemplateSet& ts, const ClusterMergeConfig& cfg) {
    MergeOutcome out;
    out.plan.stage = MergeStage::Cluster;

    std::vector<std::string> labels;
    for (const kg::Relation& r : g.relations()) labels.push_back(r.label);
    std::sort(labels.begin(), labels.end());
    if (labels.size() < 2) {
        out.graph = apply_merge_plan(g, out.plan);
        return out;
    }

    auto vectors = gateway.embed(labels, cfg.embedding_model, "merge");

    // Single-link clustering = connected components of the >= link_sim graph.
    std::vector<size_t> parent(labels.size());
    for (size_t i = 0; i < parent.size(); ++i) parent[i] = i;
    std::function<size_t(size_t)> find = [&](size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (size_t i = 0; i < labels.size(); ++i)
        for (size_t j = i + 1; j < labels.size(); ++j)
            if (llm::cosine(vectors[i], vectors[j]) >= cfg.link_sim) {
                size_t a = find(i), b = find(j);
                if (a != b) parent[std::max(a, b)] = std::min(a, b);
            }

    std::map<size_t, std::vector<std::string>> clusters;
    for (size_t i = 0; i < labels.size(); ++i) clusters[find(i)].push_back(labels[i]);

    for (const auto& [root, members] : clusters) {
        if (members.size() < 2) continue;
        std::string prompt = prompts::build_cluster_merge_prompt(ts, members);
        std::string answer;
        try {
            llm::ChatRequest req;
            req.messages = {{llm::Role::User, prompt}};
            req.model_id = cfg.chat_model;
            req.max_tokens = cfg.max_tokens;
            answer = gateway.chat(req, "merge").content;
        } catch (const llm::GatewayError& e) {
            out.warnings.push_back("cluster left unmerged (backend error): " +
                                   std::string(e.what()));
            continue;
        }
        std::set<std::string> member_set(members.begin(), members.end());
        auto mapping = parse_merge_answer(answer, member_set, out.warnings);
        out.plan.mapping.insert(mapping.begin(), mapping.end());
    }
    normalize_mapping(out.plan.mapping);
    out.graph = apply_merge_plan(g, out.plan);
    return out;
}

std::map<std::string, std::string> parse_merge_answer(std::string_view answer,
                                                      const std::set<std::string>& members,
                                                      std::vector<std::string>& warnings) {
    std::map<std::string, std::string> mapping;
    bool any_line = false;
    for (const std::string& raw : text::split_lines(answer)) {
        std::string line = text::trim(raw);
        if (!text::fold(line).starts_with("merge:")) continue;
        any_line = true;
        std::string body = text::trim(line.substr(6));
        size_t arrow = body.find("->");
        if (arrow == std::string::npos) {
            warnings.push_back("merge line without '->': " + line);
            continue;
        }
        std::string target = text::trim(body.substr(arrow + 2));
        if (target.empty()) {
            warnings.push_back("merge line without target: " + line);
            continue;
        }
        for (const std::string& part : text::split(body.substr(0, arrow), ',')) {
            std::string source = text::trim(part);
            if (source.empty() || source == target) continue;
            if (!members.contains(source)) {
                warnings.push_back("merge source not in cluster, ignored: " + source);
                continue;
            }
            mapping[source] = target;
        }
    }
    if (!any_line && !text::icontains(answer, "no merge"))
        warnings.push_back("unparseable merge answer, cluster left unmerged");
    return mapping;
}

void save_plan(const std::filesystem::path& path, const MergePlan& plan) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    for (const auto& [src, dst] : plan.mapping)
        out << json{{"stage", std::string(merge_stage_name(plan.stage))},
                    {"from", src},
                    {"to", dst}}
                   .dump()
            << '\n';
    for (const std::string& label : plan.dropped)
        out << json{{"stage", std::string(merge_stage_name(plan.stage))}, {"dropped", label}}
                   .dump()
            << '\n';
}

void append_plan(const std::filesystem::path& path, const MergePlan& plan) {
    std::ofstream out(path, std::ios::app);
    if (!out) throw std::runtime_error("cannot open for appending: " + path.string());
    for (const auto& [src, dst] : plan.mapping)
        out << json{{"stage", std::string(merge_stage_name(plan.stage))},
                    {"from", src},
                    {"to", dst}}
                   .dump()
            << '\n';
    for (const std::string& label : plan.dropped)
        out << json{{"stage", std::string(merge_stage_name(plan.stage))}, {"dropped", label}}
                   .dump()
            << '\n';
}

MergePlan load_plan(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open for reading: " + path.string());
    MergePlan plan;
    std::string line;
    while (std::getline(in, line)) {
        if (text::trim(line).empty()) continue;
        json j = json::parse(line);
        if (j.contains("dropped"))
            plan.dropped.insert(j["dropped"].get<std::string>());
        else
            plan.mapping[j.at("from").get<std::string>()] = j.at("to").get<std::string>();
        if (j.value("stage", "") == "cluster") plan.stage = MergeStage::Cluster;
    }
    return plan;
}

} // namespace urbankg::postprocess
