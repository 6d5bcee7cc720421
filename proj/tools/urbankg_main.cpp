#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "urbankg/agent.hpp"
#include "urbankg/config.hpp"
#include "urbankg/eval_harness.hpp"
#include "urbankg/geo_batch.hpp"
#include "urbankg/ingest.hpp"
#include "urbankg/kg_model.hpp"
#include "urbankg/postprocess.hpp"
#include "urbankg/text_util.hpp"

using nlohmann::json;
namespace ukg = urbankg;

namespace {

[[noreturn]] void fail(const std::string& message, int code = 1,
                       const std::vector<std::string>& problems = {}) {
    json err{{"error", message}};
    if (!problems.empty()) err["problems"] = problems;
    std::cerr << err.dump() << std::endl;
    std::exit(code);
}

ukg::config::PipelineConfig load_config_or_die(const std::string& path) {
    try {
        return ukg::config::load_config(path);
    } catch (const ukg::config::ConfigError& e) {
        fail("configuration invalid", 2, e.problems());
    }
}

int cmd_ingest(const std::string& config_path, const std::vector<std::string>& inputs,
               bool swap_latlon, const std::string& out_rte, const std::string& out_kgc,
               std::optional<size_t> kgc_count) {
    auto cfg = load_config_or_die(config_path);
    std::vector<ukg::ingest::RawRecord> kept;
    std::map<std::string, size_t> dropped;
    size_t total = 0;
    for (const std::string& spec : inputs) {
        size_t colon = spec.find(':');
        if (colon == std::string::npos)
            fail("--input must look like <source>:<path>, got: " + spec);
        auto source = ukg::ingest::source_from_name(spec.substr(0, colon));
        if (!source) fail("unknown source kind in --input: " + spec);
        std::string path = spec.substr(colon + 1);
        auto loaded = ukg::ingest::load_records(path, *source, swap_latlon);
        ukg::ingest::write_error_report(path, loaded.errors);
        for (ukg::ingest::RawRecord& rec : loaded.records) {
            ++total;
            auto decision = ukg::ingest::filter_record(rec);
            if (decision.kept)
                kept.push_back(std::move(rec));
            else
                dropped[decision.reason] += 1;
        }
    }
    auto tasks = ukg::ingest::to_task_records(kept, cfg.seed, kgc_count);
    ukg::ingest::write_rte_records(out_rte, tasks.rte);
    ukg::ingest::write_kgc_records(out_kgc, tasks.kgc);
    json summary{{"records", total},
                 {"kept", kept.size()},
                 {"dropped", dropped},
                 {"rte_records", tasks.rte.size()},
                 {"kgc_records", tasks.kgc.size()}};
    std::cout << summary.dump() << std::endl;
    return 0;
}

struct BatchArgs {
    std::string config_path;
    std::string rte_path;
    std::string kgc_path;
    std::string out_graph;
    std::string out_trajectories;
    std::string out_ledger;
};

int run_pipeline(const BatchArgs& args, bool run_rte, bool run_kgc) {
    auto cfg = load_config_or_die(args.config_path);
    auto rt = ukg::config::make_runtime(cfg);

    std::vector<ukg::ingest::RteRecord> rte_records;
    std::vector<ukg::ingest::KgcRecord> kgc_records;
    if (run_rte && !args.rte_path.empty())
        rte_records = ukg::ingest::load_rte_records(args.rte_path);
    if (run_kgc && !args.kgc_path.empty())
        kgc_records = ukg::ingest::load_kgc_records(args.kgc_path);

    // RTE first, then KGC, then the set union of the two stage graphs.
    auto rte_batch = ukg::agent::run_batch(rte_records, {}, *rt.gateway, rt.templates, rt.agent);
    auto kgc_batch = ukg::agent::run_batch({}, kgc_records, *rt.gateway, rt.templates, rt.agent);
    ukg::kg::UrbanGraph graph = ukg::kg::merge_graphs(rte_batch.graph, kgc_batch.graph);

    ukg::kg::export_graph(graph, args.out_graph);
    if (!args.out_trajectories.empty()) {
        std::vector<ukg::agent::Trajectory> all = std::move(rte_batch.trajectories);
        for (auto& t : kgc_batch.trajectories) all.push_back(std::move(t));
        ukg::agent::write_trajectory_log(args.out_trajectories, all);
    }
    if (!args.out_ledger.empty())
        ukg::llm::save_ledger(args.out_ledger, rt.gateway->ledger().snapshot());

    auto stats = graph.stats();
    json summary{{"entities", stats.entities},
                 {"relations", stats.relations},
                 {"facts", stats.facts},
                 {"failures", rte_batch.failures.size() + kgc_batch.failures.size()}};
    std::cout << summary.dump() << std::endl;
    return (rte_batch.failures.size() + kgc_batch.failures.size()) == 0 ? 0 : 1;
}

int cmd_merge_relations(const std::string& config_path, const std::string& graph_path,
                        const std::string& out_graph, const std::string& out_plan,
                        bool skip_cluster) {
    auto cfg = load_config_or_die(config_path);
    auto rt = ukg::config::make_runtime(cfg);
    ukg::kg::UrbanGraph graph = ukg::kg::import_graph(graph_path);
    auto before = graph.stats();

    auto stage1 = ukg::postprocess::merge_low_frequency(graph, *rt.gateway,
                                                        cfg.backend.embedding_model_id,
                                                        cfg.low_frequency_threshold,
                                                        cfg.merge_similarity);
    ukg::kg::UrbanGraph merged = std::move(stage1.graph);
    std::vector<std::string> warnings = stage1.warnings;
    if (!out_plan.empty()) ukg::postprocess::save_plan(out_plan, stage1.plan);

    if (!skip_cluster) {
        ukg::postprocess::ClusterMergeConfig cmc;
        cmc.embedding_model = cfg.backend.embedding_model_id;
        cmc.chat_model = cfg.backend.model_id;
        cmc.link_sim = cfg.link_similarity;
        auto stage2 = ukg::postprocess::cluster_and_merge(merged, *rt.gateway, rt.templates, cmc);
        merged = std::move(stage2.graph);
        warnings.insert(warnings.end(), stage2.warnings.begin(), stage2.warnings.end());
        if (!out_plan.empty()) ukg::postprocess::append_plan(out_plan, stage2.plan);
    }

    ukg::kg::export_graph(merged, out_graph);
    auto after = merged.stats();
    json summary{{"relations_before", before.relations},
                 {"relations_after", after.relations},
                 {"facts_before", before.facts},
                 {"facts_after", after.facts},
                 {"warnings", warnings}};
    std::cout << summary.dump() << std::endl;
    return 0;
}

int cmd_evaluate(const std::string& config_path, const std::string& items_path,
                 const std::string& judgments_path, int repeats,
                 const std::string& out_judgments, const std::string& out_report) {
    std::vector<ukg::eval::EvalJudgment> final_judgments;
    size_t unevaluated = 0;

    if (!judgments_path.empty()) {
        final_judgments = ukg::eval::load_judgments(judgments_path);
    } else {
        auto cfg = load_config_or_die(config_path);
        auto rt = ukg::config::make_runtime(cfg);
        auto items = ukg::eval::load_eval_items(items_path);
        ukg::eval::ModelEvalConfig mec;
        mec.model_id = cfg.backend.model_id;
        mec.repeats = repeats;
        auto outcome = ukg::eval::model_evaluate(items, *rt.gateway, rt.templates, mec);
        final_judgments = outcome.final;
        unevaluated = outcome.unevaluated.size();
        if (!out_judgments.empty()) ukg::eval::save_judgments(out_judgments, final_judgments);
    }

    if (final_judgments.empty()) fail("no judgments to score (all items unevaluated?)");
    double acc = ukg::eval::accuracy(final_judgments);
    double conf = 0.0;
    for (const auto& j : final_judgments) conf += j.confidence;
    conf /= static_cast<double>(final_judgments.size());
    json summary{{"accuracy", acc},
                 {"mean_confidence", conf},
                 {"items", final_judgments.size()},
                 {"unevaluated", unevaluated}};
    std::cout << summary.dump() << std::endl;
    if (!out_report.empty()) {
        std::ofstream out(out_report);
        out << summary.dump(2) << '\n';
    }
    return 0;
}

int cmd_correlate(const std::string& human_path, const std::string& model_path,
                  const std::string& groups_path, const std::string& out_report) {
    auto human = ukg::eval::load_judgments(human_path);
    auto model = ukg::eval::load_judgments(model_path);
    std::map<std::string, std::string> groups;
    if (!groups_path.empty()) {
        std::ifstream in(groups_path);
        if (!in) fail("cannot open groups file: " + groups_path);
        std::string line;
        while (std::getline(in, line)) {
            if (ukg::text::trim(line).empty()) continue;
            json j = json::parse(line);
            groups[j.at("item_id").get<std::string>()] = j.at("group").get<std::string>();
        }
    }
    auto report = ukg::eval::consistency_report(human, model, groups);
    json out = json::array();
    for (const auto& g : report.groups)
        out.push_back({{"group", g.group}, {"spearman", g.coefficient}, {"items", g.item_count}});
    json summary{{"groups", out}, {"skipped", report.skipped}};
    if (report.overall) summary["overall"] = *report.overall;
    std::cout << summary.dump() << std::endl;
    if (!out_report.empty()) {
        std::ofstream file(out_report);
        file << summary.dump(2) << '\n';
    }
    return 0;
}

int cmd_report_costs(const std::string& ledger_path, bool per_1000,
                     const std::vector<std::string>& counts) {
    auto ledger = ukg::llm::load_ledger(ledger_path);
    std::map<std::string, size_t> record_counts;
    for (const std::string& c : counts) {
        size_t eq = c.find('=');
        if (eq == std::string::npos) fail("--count must look like tag=N, got: " + c);
        record_counts[c.substr(0, eq)] = std::stoul(c.substr(eq + 1));
    }
    auto report = ukg::eval::cost_report(ledger, record_counts, per_1000);
    std::cout << ukg::eval::format_cost_report(report);
    return 0;
}

int cmd_tool(const std::string& name, const std::vector<std::string>& wkts, double eps) {
    std::vector<ukg::geo::Geometry> args;
    for (const std::string& wkt : wkts) args.push_back(ukg::geo::parse_wkt(wkt));
    // rcc5 sits beside the eight tool interfaces as the relation classifier
    if (ukg::text::fold(name) == "rcc5") {
        if (args.size() != 2) fail("rcc5 expects 2 geometries, got " + std::to_string(args.size()));
        std::cout << ukg::tools::rcc5_code(ukg::tools::classify_rcc5(args[0], args[1], eps))
                  << std::endl;
        return 0;
    }
    auto tool = ukg::tools::tool_from_name(name);
    if (!tool) fail("unknown tool: " + name);
    auto result = ukg::tools::invoke_tool(*tool, args);
    if (std::holds_alternative<std::string>(result.value)) {
        std::cout << std::get<std::string>(result.value) << std::endl;
    } else if (std::holds_alternative<double>(result.value)) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.6g", std::get<double>(result.value));
        std::cout << buf << std::endl;
    } else {
        std::cout << (std::get<bool>(result.value) ? "true" : "false") << std::endl;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Urban knowledge graph construction pipeline"};
    app.require_subcommand(1);

    // ingest
    auto* ingest = app.add_subcommand("ingest", "Load raw records, filter, emit task records");
    std::string ing_config, ing_rte, ing_kgc;
    std::vector<std::string> ing_inputs;
    bool ing_swap = false;
    std::optional<size_t> ing_kgc_count;
    size_t ing_kgc_count_raw = 0;
    ingest->add_option("--config", ing_config, "pipeline config JSON")->required();
    ingest->add_option("--input", ing_inputs, "<source>:<path> (repeatable)")->required();
    ingest->add_flag("--swap-latlon", ing_swap, "input WKT is written latitude-first");
    ingest->add_option("--out-rte", ing_rte, "output RTE records")->required();
    ingest->add_option("--out-kgc", ing_kgc, "output KGC records")->required();
    auto* kc = ingest->add_option("--kgc-count", ing_kgc_count_raw, "number of KGC pairs");

    // rte / kgc / build-kg
    BatchArgs batch;
    auto add_batch_options = [&](CLI::App* cmd, bool with_rte, bool with_kgc) {
        cmd->add_option("--config", batch.config_path, "pipeline config JSON")->required();
        if (with_rte) cmd->add_option("--rte", batch.rte_path, "RTE records file");
        if (with_kgc) cmd->add_option("--kgc", batch.kgc_path, "KGC records file");
        cmd->add_option("--out-graph", batch.out_graph, "graph export path")->required();
        cmd->add_option("--out-trajectories", batch.out_trajectories, "trajectory log path");
        cmd->add_option("--out-ledger", batch.out_ledger, "cost ledger path");
    };
    auto* rte_cmd = app.add_subcommand("rte", "Run the triplet-extraction pipeline");
    rte_cmd->add_option("--records", batch.rte_path, "RTE records file")->required();
    add_batch_options(rte_cmd, false, false);
    auto* kgc_cmd = app.add_subcommand("kgc", "Run the relation-completion pipeline");
    kgc_cmd->add_option("--records", batch.kgc_path, "KGC records file")->required();
    add_batch_options(kgc_cmd, false, false);
    auto* build_cmd = app.add_subcommand("build-kg", "RTE then KGC, union the stage graphs");
    add_batch_options(build_cmd, true, true);

    // merge-relations
    auto* merge_cmd = app.add_subcommand("merge-relations", "Two-stage relation merging");
    std::string mr_config, mr_graph, mr_out, mr_plan;
    bool mr_skip_cluster = false;
    merge_cmd->add_option("--config", mr_config, "pipeline config JSON")->required();
    merge_cmd->add_option("--graph", mr_graph, "input graph export")->required();
    merge_cmd->add_option("--out-graph", mr_out, "merged graph path")->required();
    merge_cmd->add_option("--out-plan", mr_plan, "merge plan audit file");
    merge_cmd->add_flag("--skip-cluster", mr_skip_cluster, "run stage 1 only");

    // evaluate
    auto* eval_cmd = app.add_subcommand("evaluate", "Model- or file-based evaluation");
    std::string ev_config, ev_items, ev_judgments, ev_out_j, ev_out_r;
    int ev_repeats = 1;
    eval_cmd->add_option("--config", ev_config, "pipeline config JSON");
    eval_cmd->add_option("--items", ev_items, "evaluation items file");
    eval_cmd->add_option("--judgments", ev_judgments, "precomputed judgments (skip backend)");
    eval_cmd->add_option("--repeats", ev_repeats, "judgments per item (majority vote)");
    eval_cmd->add_option("--out-judgments", ev_out_j, "write final judgments here");
    eval_cmd->add_option("--out-report", ev_out_r, "write the report here");

    // correlate
    auto* corr_cmd = app.add_subcommand("correlate", "Human vs model judgment consistency");
    std::string co_human, co_model, co_groups, co_out;
    corr_cmd->add_option("--human", co_human, "human judgments")->required();
    corr_cmd->add_option("--model", co_model, "model judgments")->required();
    corr_cmd->add_option("--groups", co_groups, "item-to-group mapping");
    corr_cmd->add_option("--out-report", co_out, "write the report here");

    // report-costs
    auto* cost_cmd = app.add_subcommand("report-costs", "Token/cost/latency report");
    std::string rc_ledger;
    bool rc_per_1000 = false;
    std::vector<std::string> rc_counts;
    cost_cmd->add_option("--ledger", rc_ledger, "ledger file")->required();
    cost_cmd->add_flag("--per-1000", rc_per_1000, "normalize per 1000 records");
    cost_cmd->add_option("--count", rc_counts, "records per tag, tag=N (repeatable)");

    // tool
    auto* tool_cmd = app.add_subcommand("tool", "Invoke one geospatial tool (or rcc5)");
    std::string tool_name;
    std::vector<std::string> tool_wkts;
    double tool_eps = ukg::tools::kDefaultRccEps;
    tool_cmd->add_option("name", tool_name, "tool name (case-insensitive)")->required();
    tool_cmd->add_option("wkt", tool_wkts, "geometry WKT argument(s)")->required();
    tool_cmd->add_option("--eps", tool_eps, "rcc5 tolerance in degrees");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*ingest) {
            if (*kc) ing_kgc_count = ing_kgc_count_raw;
            return cmd_ingest(ing_config, ing_inputs, ing_swap, ing_rte, ing_kgc, ing_kgc_count);
        }
        if (*rte_cmd) return run_pipeline(batch, true, false);
        if (*kgc_cmd) return run_pipeline(batch, false, true);
        if (*build_cmd) return run_pipeline(batch, true, true);
        if (*merge_cmd)
            return cmd_merge_relations(mr_config, mr_graph, mr_out, mr_plan, mr_skip_cluster);
        if (*eval_cmd) {
            if (ev_judgments.empty() && (ev_config.empty() || ev_items.empty()))
                fail("evaluate needs either --judgments or both --config and --items");
            return cmd_evaluate(ev_config, ev_items, ev_judgments, ev_repeats, ev_out_j,
                                ev_out_r);
        }
        if (*corr_cmd) return cmd_correlate(co_human, co_model, co_groups, co_out);
        if (*cost_cmd) return cmd_report_costs(rc_ledger, rc_per_1000, rc_counts);
        if (*tool_cmd) return cmd_tool(tool_name, tool_wkts, tool_eps);
    } catch (const ukg::config::ConfigError& e) {
        fail("configuration invalid", 2, e.problems());
    } catch (const std::exception& e) {
        fail(e.what());
    }
    return 0;
}
