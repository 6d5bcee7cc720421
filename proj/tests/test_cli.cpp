#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream body;
    body << in.rdbuf();
    return body.str();
}

RunResult run_cli(const std::string& args) {
    const char* cli = std::getenv("URBANKG_CLI");
    REQUIRE_MESSAGE(cli != nullptr, "URBANKG_CLI must point at the binary");
    fs::path out = fs::temp_directory_path() / "ukg_cli_out.txt";
    fs::path err = fs::temp_directory_path() / "ukg_cli_err.txt";
    std::string cmd = std::string(cli) + " " + args + " >" + out.string() + " 2>" + err.string();
    int status = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
}

fs::path fixtures() {
    const char* dir = std::getenv("URBANKG_FIXTURES");
    REQUIRE_MESSAGE(dir != nullptr, "URBANKG_FIXTURES must point at tests/fixtures");
    return fs::path(dir);
}

fs::path write_mock_config(const fs::path& dir) {
    json cfg{{"backend",
              {{"type", "mock"},
               {"model_id", "mock-chat"},
               {"embedding_model_id", "mock-embed"},
               {"script_path", (fixtures() / "script.jsonl").string()}}},
             {"max_iterations", 3},
             {"parallelism", 1},
             {"seed", 42},
             {"price_table", {{"mock-chat", {{"prompt_per_1k", 0.03}, {"completion_per_1k", 0.06}}}}}};
    fs::path path = dir / "pipeline.json";
    std::ofstream out(path);
    out << cfg.dump(2);
    return path;
}

} // namespace

TEST_CASE("tool subcommand: distance, geohash, predicates") {
    RunResult d = run_cli("tool distance \"POINT (0 0)\" \"POINT (1 0)\"");
    CHECK(d.exit_code == 0);
    CHECK(d.out == "111.195\n");

    RunResult g = run_cli("tool geohash \"POINT (10.40744 57.64911)\"");
    CHECK(g.exit_code == 0);
    CHECK(g.out == "u4pruydq\n");

    RunResult p = run_cli(
        "tool point2polygon \"POINT (0.5 0.5)\" \"POLYGON ((0 0, 1 0, 1 1, 0 1, 0 0))\"");
    CHECK(p.exit_code == 0);
    CHECK(p.out == "true\n");

    RunResult bad = run_cli("tool polygon2polygon \"POINT (0 0)\" \"POINT (1 1)\"");
    CHECK(bad.exit_code != 0);
    CHECK(bad.err.find("error") != std::string::npos);

    RunResult unknown = run_cli("tool ruler \"POINT (0 0)\"");
    CHECK(unknown.exit_code != 0);

    RunResult rcc = run_cli(
        "tool rcc5 \"POLYGON ((0 0, 2 0, 2 2, 0 2, 0 0))\" \"POLYGON ((1 1, 3 1, 3 3, 1 3, 1 1))\"");
    CHECK(rcc.exit_code == 0);
    CHECK(rcc.out == "PO\n");
}

TEST_CASE("config validation lists every problem and names missing keys") {
    fs::path dir = fs::temp_directory_path() / "ukg_cli_cfg";
    fs::create_directories(dir);
    fs::path cfg = dir / "bad.json";
    {
        std::ofstream out(cfg);
        out << R"json({"backend": {"type": "http", "model_id": ""}, "max_iterations": 0})json";
    }
    RunResult r = run_cli("build-kg --config " + cfg.string() + " --out-graph /tmp/never.jsonl");
    CHECK(r.exit_code == 2);
    json err = json::parse(r.err);
    REQUIRE(err.contains("problems"));
    std::string all = err["problems"].dump();
    CHECK(all.find("backend.base_url") != std::string::npos);
    CHECK(all.find("backend.model_id") != std::string::npos);
    CHECK(all.find("max_iterations") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("build-kg produces the expected graph and is byte-deterministic") {
    fs::path dir = fs::temp_directory_path() / "ukg_cli_build";
    fs::create_directories(dir);
    fs::path cfg = write_mock_config(dir);

    auto run_build = [&](const std::string& suffix) {
        std::string graph = (dir / ("graph" + suffix + ".jsonl")).string();
        std::string traj = (dir / ("traj" + suffix + ".jsonl")).string();
        std::string ledger = (dir / ("ledger" + suffix + ".jsonl")).string();
        RunResult r = run_cli("build-kg --config " + cfg.string() + " --rte " +
                              (fixtures() / "rte.jsonl").string() + " --kgc " +
                              (fixtures() / "kgc.jsonl").string() + " --out-graph " + graph +
                              " --out-trajectories " + traj + " --out-ledger " + ledger);
        REQUIRE_MESSAGE(r.exit_code == 0, r.err);
        return std::tuple(slurp(graph), slurp(traj), json::parse(r.out));
    };

    auto [graph1, traj1, summary1] = run_build("1");
    CHECK(summary1["facts"] == 5);
    CHECK(summary1["entities"] == 6);
    CHECK(summary1["relations"] == 4);
    CHECK(summary1["failures"] == 0);
    CHECK(graph1.find("\"head\":\"Columbia University\"") != std::string::npos);
    CHECK(graph1.find("\"relation\":\"DC\"") != std::string::npos);

    auto [graph2, traj2, summary2] = run_build("2");
    CHECK(graph1 == graph2);
    CHECK(traj1 == traj2);
    fs::remove_all(dir);
}

TEST_CASE("ingest filters records and emits task files") {
    fs::path dir = fs::temp_directory_path() / "ukg_cli_ingest";
    fs::create_directories(dir);
    fs::path cfg = write_mock_config(dir);
    fs::path raw = dir / "poi.jsonl";
    {
        std::ofstream out(raw);
        out << R"json({"name": "Trump World Tower", "geometry": "POINT (-73.96 40.75)", "type": "residential", "description": "Trump World Tower is a residential condominium in Midtown Manhattan near the East River."})json"
            << "\n";
        out << R"json({"name": "Short", "description": "too short to keep"})json" << "\n";
        out << R"json({"name": "No Description", "geometry": "POINT (-73.9 40.7)"})json" << "\n";
        out << R"json({"name": "Jamaica Bay", "geometry": "POLYGON ((-73.87 40.57, -73.85 40.57, -73.85 40.59, -73.87 40.59, -73.87 40.57))", "description": "Jamaica Bay is an estuary on the southern side of Long Island made of numerous marsh islands."})json"
            << "\n";
    }
    RunResult r = run_cli("ingest --config " + cfg.string() + " --input poi:" + raw.string() +
                          " --out-rte " + (dir / "rte.jsonl").string() + " --out-kgc " +
                          (dir / "kgc.jsonl").string());
    REQUIRE_MESSAGE(r.exit_code == 0, r.err);
    json summary = json::parse(r.out);
    CHECK(summary["records"] == 4);
    CHECK(summary["kept"] == 2);
    CHECK(summary["dropped"]["too_short"] == 1);
    CHECK(summary["dropped"]["null_description"] == 1);
    CHECK(summary["rte_records"] == 2);
    CHECK(summary["kgc_records"] == 1); // only one unordered pair exists
    CHECK(fs::exists(raw.string() + ".errors.jsonl"));
    fs::remove_all(dir);
}

TEST_CASE("merge-relations and report-costs round out the pipeline") {
    fs::path dir = fs::temp_directory_path() / "ukg_cli_merge";
    fs::create_directories(dir);

    // graph with a low-frequency synonym; merging needs no chat script
    fs::path graph = dir / "graph.jsonl";
    {
        std::ofstream out(graph);
        for (int i = 0; i < 6; ++i)
            out << json{{"type", "fact"},
                        {"head", "H" + std::to_string(i)},
                        {"relation", "located in"},
                        {"tail", "T" + std::to_string(i)},
                        {"record_id", "r"},
                        {"stage", "RTE"}}
                       .dump()
                << "\n";
        out << json{{"type", "fact"},   {"head", "X"},      {"relation", "locate in"},
                    {"tail", "Y"},      {"record_id", "r"}, {"stage", "RTE"}}
                   .dump()
            << "\n";
    }
    fs::path cfg = write_mock_config(dir);
    RunResult r = run_cli("merge-relations --config " + cfg.string() + " --graph " +
                          graph.string() + " --out-graph " + (dir / "merged.jsonl").string() +
                          " --out-plan " + (dir / "plan.jsonl").string() + " --skip-cluster");
    REQUIRE_MESSAGE(r.exit_code == 0, r.err);
    json summary = json::parse(r.out);
    CHECK(summary["relations_before"] == 2);
    CHECK(summary["relations_after"] == 1);
    CHECK(summary["facts_after"] == 7);
    std::string plan = slurp(dir / "plan.jsonl");
    CHECK(plan.find("locate in") != std::string::npos);

    // ledger report from a fabricated ledger
    fs::path ledger = dir / "ledger.jsonl";
    {
        std::ofstream out(ledger);
        out << json{{"model", "m"},        {"tag", "rte"},  {"calls", 500},
                    {"prompt_tokens", 1000}, {"completion_tokens", 500},
                    {"wall_s", 10.0},       {"cost", 2.0}}
                   .dump()
            << "\n";
    }
    RunResult costs = run_cli("report-costs --ledger " + ledger.string() +
                              " --per-1000 --count rte=500");
    REQUIRE_MESSAGE(costs.exit_code == 0, costs.err);
    CHECK(costs.out.find("rte/1000") != std::string::npos);
    CHECK(costs.out.find("cost=4") != std::string::npos); // doubled
    fs::remove_all(dir);
}

TEST_CASE("rte and kgc subcommands run standalone stages") {
    fs::path dir = fs::temp_directory_path() / "ukg_cli_stages";
    fs::create_directories(dir);

    // stage-specific scripts keep the step accounting obvious
    fs::path rte_script = dir / "rte_script.jsonl";
    {
        std::ofstream out(rte_script);
        for (int rec = 0; rec < 2; ++rec) {
            out << R"json({"match": "spatial view", "response": "Entity types: T\nRelation types: r"})json" << "\n";
            out << R"json({"match": "step by step", "response": "<A, locate-in, B>"})json" << "\n";
            out << R"json({"match": "temporal view", "response": "Entity types: none\nRelation types: none"})json" << "\n";
            out << R"json({"match": "step by step", "response": "none"})json" << "\n";
            out << R"json({"match": "functional view", "response": "Entity types: none\nRelation types: none"})json" << "\n";
            out << R"json({"match": "step by step", "response": "none"})json" << "\n";
            out << R"json({"match": "Judge whether", "response": "This is a faithful trajectory."})json" << "\n";
        }
    }
    json cfg{{"backend",
              {{"type", "mock"}, {"model_id", "mock-chat"}, {"script_path", rte_script.string()}}}};
    fs::path cfg_path = dir / "rte_cfg.json";
    {
        std::ofstream out(cfg_path);
        out << cfg.dump();
    }
    RunResult r = run_cli("rte --config " + cfg_path.string() + " --records " +
                          (fixtures() / "rte.jsonl").string() + " --out-graph " +
                          (dir / "g1.jsonl").string());
    REQUIRE_MESSAGE(r.exit_code == 0, r.err);
    json s1 = json::parse(r.out);
    CHECK(s1["facts"] == 1); // both records emit the same triplet, deduped

    fs::path kgc_script = dir / "kgc_script.jsonl";
    {
        std::ofstream out(kgc_script);
        out << R"json({"match": "completing an urban knowledge graph", "response": "points look far apart"})json" << "\n";
        out << R"json({"match": "Which types of tool interface you need", "response": "Distance"})json" << "\n";
        out << R"json({"match": "Please refine your reasoning process", "response": "the relation is DC"})json" << "\n";
        out << R"json({"match": "Judge whether", "response": "This is a faithful trajectory."})json" << "\n";
    }
    json kcfg{{"backend",
               {{"type", "mock"}, {"model_id", "mock-chat"}, {"script_path", kgc_script.string()}}}};
    fs::path kcfg_path = dir / "kgc_cfg.json";
    {
        std::ofstream out(kcfg_path);
        out << kcfg.dump();
    }
    RunResult k = run_cli("kgc --config " + kcfg_path.string() + " --records " +
                          (fixtures() / "kgc.jsonl").string() + " --out-graph " +
                          (dir / "g2.jsonl").string());
    REQUIRE_MESSAGE(k.exit_code == 0, k.err);
    json s2 = json::parse(k.out);
    CHECK(s2["facts"] == 1);
    CHECK(slurp(dir / "g2.jsonl").find("\"relation\":\"DC\"") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("evaluate drives the model through the eval prompts") {
    fs::path dir = fs::temp_directory_path() / "ukg_cli_model_eval";
    fs::create_directories(dir);
    fs::path script = dir / "eval_script.jsonl";
    {
        std::ofstream out(script);
        for (int i = 0; i < 3; ++i)
            out << R"json({"match": "True triplets", "response": "True triplets: 1\nFalse triplets: 0\nConfidence: 5"})json"
                << "\n";
    }
    json cfg{{"backend",
              {{"type", "mock"}, {"model_id", "mock-chat"}, {"script_path", script.string()}}}};
    fs::path cfg_path = dir / "cfg.json";
    {
        std::ofstream out(cfg_path);
        out << cfg.dump();
    }
    fs::path items = dir / "items.jsonl";
    {
        std::ofstream out(items);
        out << R"json({"item_id": "i1", "task": "RTE", "text": "Columbia University is in New York City.", "results": "<Columbia University, locate-in, New York City>"})json"
            << "\n";
    }
    RunResult r = run_cli("evaluate --config " + cfg_path.string() + " --items " +
                          items.string() + " --repeats 3 --out-judgments " +
                          (dir / "judgments.jsonl").string());
    REQUIRE_MESSAGE(r.exit_code == 0, r.err);
    json summary = json::parse(r.out);
    CHECK(summary["accuracy"] == 1.0);
    CHECK(summary["mean_confidence"] == 5.0);
    CHECK(fs::exists(dir / "judgments.jsonl"));
    fs::remove_all(dir);
}

TEST_CASE("correlate reports per-group and overall spearman") {
    fs::path dir = fs::temp_directory_path() / "ukg_cli_corr";
    fs::create_directories(dir);
    auto write_judgments = [&](const fs::path& p, bool reversed) {
        std::ofstream out(p);
        for (int i = 0; i < 4; ++i) {
            int value = reversed ? 4 - i : i + 1;
            out << json{{"item_id", "item" + std::to_string(i)},
                        {"task", "RTE"},
                        {"true_count", value},
                        {"false_count", 0},
                        {"confidence", 3},
                        {"evaluator", reversed ? "model" : "human"}}
                       .dump()
                << "\n";
        }
    };
    write_judgments(dir / "human.jsonl", false);
    write_judgments(dir / "model.jsonl", true);
    RunResult r = run_cli("correlate --human " + (dir / "human.jsonl").string() + " --model " +
                          (dir / "model.jsonl").string());
    REQUIRE_MESSAGE(r.exit_code == 0, r.err);
    json summary = json::parse(r.out);
    CHECK(summary["overall"] == doctest::Approx(-1.0));
    fs::remove_all(dir);
}

TEST_CASE("evaluate consumes precomputed judgments") {
    fs::path dir = fs::temp_directory_path() / "ukg_cli_eval";
    fs::create_directories(dir);
    fs::path judgments = dir / "human.jsonl";
    {
        std::ofstream out(judgments);
        out << R"json({"item_id": "a", "task": "RTE", "true_count": 1, "false_count": 0, "confidence": 5, "evaluator": "human"})json"
            << "\n";
        out << R"json({"item_id": "b", "task": "RTE", "true_count": 1, "false_count": 1, "confidence": 4, "evaluator": "human"})json"
            << "\n";
    }
    RunResult r = run_cli("evaluate --judgments " + judgments.string());
    REQUIRE_MESSAGE(r.exit_code == 0, r.err);
    json summary = json::parse(r.out);
    CHECK(summary["accuracy"] == doctest::Approx(2.0 / 3.0));
    fs::remove_all(dir);
}
