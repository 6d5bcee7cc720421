#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>

#include "urbankg/agent.hpp"
#include "urbankg/text_util.hpp"

using namespace urbankg;
using namespace urbankg::agent;
using llm::MockBackend;
using llm::ScriptStep;
using prompts::TemplateSet;

namespace {

const std::string kColumbiaText =
    "Columbia University is a private Ivy league research university in New York City.";

ingest::RteRecord columbia_record() { return {"rte-0", kColumbiaText}; }

ingest::KgcRecord columbia_empire() {
    return {"kgc-0", "Columbia University", geo::make_point(-73.9626, 40.8075),
            "Empire State Building", geo::make_point(-73.9857, 40.7484)};
}

// Scripted conversation for a full single-record RTE run: the spatial view
// yields the triplet, the other views add nothing, the verifier accepts
// immediately.
std::vector<ScriptStep> columbia_script() {
    return {
        {"spatial view", "Entity types: University, City\nRelation types: locate-in"},
        {"Let's think step by step", "<Columbia University, locate-in, New York City>"},
        {"temporal view", "Entity types: none\nRelation types: none"},
        {"Let's think step by step", "no temporal content"},
        {"functional view", "Entity types: University\nRelation types: serves"},
        {"Let's think step by step", "no functional content"},
        {"Judge whether", "This is a faithful trajectory."},
    };
}

size_t count_kind(const Trajectory& t, StepKind k) {
    size_t n = 0;
    for (const auto& s : t.steps) n += s.kind == k ? 1 : 0;
    return n;
}

} // namespace

TEST_CASE("parse_triplets grammar") {
    auto p = parse_triplets("<Columbia University, locate-in, New York City>");
    REQUIRE(p.triplets.size() == 1);
    CHECK(p.triplets[0].head == "Columbia University");
    CHECK(p.triplets[0].relation == "locate-in");
    CHECK(p.triplets[0].tail == "New York City");
    CHECK(p.ignored_lines == 0);

    auto mixed = parse_triplets("intro line\n<A, r, B>\n<C, s, D>\n<broken line>\n");
    CHECK(mixed.triplets.size() == 2);
    CHECK(mixed.ignored_lines == 2); // the intro and the malformed line

    CHECK_THROWS_AS(parse_triplets("free text with no brackets at all"), NoTripletsFound);

    // first/last comma split keeps inner commas in the relation field
    auto commas = parse_triplets("<A, rel, with, commas, B>");
    CHECK(commas.triplets[0].relation == "rel, with, commas");

    // round trip through the renderer
    std::vector<TripletText> ts{{"A", "r", "B"}, {"C d", "has part", "E f"}};
    auto back = parse_triplets(render_triplet_lines(ts));
    REQUIRE(back.triplets.size() == 2);
    CHECK(back.triplets[1].head == "C d");
    CHECK(back.ignored_lines == 0);
}

TEST_CASE("parse_relation code and name matching, last occurrence wins") {
    CHECK(parse_relation("...therefore the relation is DC.") == tools::Rcc5Relation::DC);
    CHECK(parse_relation("not EC but PO... final answer: PO") == tools::Rcc5Relation::PO);
    CHECK(parse_relation("could be EC, but actually EQ") == tools::Rcc5Relation::EQ);
    CHECK(parse_relation("they are disconnected") == tools::Rcc5Relation::DC);
    CHECK(parse_relation("one is a proper part of the other") == tools::Rcc5Relation::IN);
    CHECK(parse_relation("regions partially overlapping here") == tools::Rcc5Relation::PO);
    // lowercase "in" must not trigger the IN code
    CHECK_THROWS_AS(parse_relation("they are adjacent in the city"), NoRelationFound);
    CHECK_THROWS_AS(parse_relation("no idea"), NoRelationFound);
}

TEST_CASE("parse_tool_request dedup and order") {
    auto r1 = parse_tool_request("I need Distance and Geohash");
    REQUIRE(r1.size() == 2);
    CHECK(r1[0] == tools::ToolName::Distance);
    CHECK(r1[1] == tools::ToolName::Geohash);

    auto r2 = parse_tool_request("distance, DISTANCE, point2polygon");
    REQUIRE(r2.size() == 2);
    CHECK(r2[0] == tools::ToolName::Distance);
    CHECK(r2[1] == tools::ToolName::Point2Polygon);

    CHECK(parse_tool_request("I need the ruler tool").empty());
}

TEST_CASE("fallback_tools matches the record's geometry kinds") {
    using geo::GeometryKind;
    auto pp = fallback_tools(GeometryKind::Point, GeometryKind::Point);
    CHECK(pp == std::vector<tools::ToolName>{tools::ToolName::Geohash, tools::ToolName::Distance});

    auto p_poly = fallback_tools(GeometryKind::Point, GeometryKind::Polygon);
    CHECK(std::find(p_poly.begin(), p_poly.end(), tools::ToolName::Point2Polygon) !=
          p_poly.end());
    CHECK(std::find(p_poly.begin(), p_poly.end(), tools::ToolName::Polygon2Polygon) ==
          p_poly.end());

    auto poly_poly = fallback_tools(GeometryKind::Polygon, GeometryKind::Polygon);
    CHECK(std::find(poly_poly.begin(), poly_poly.end(), tools::ToolName::Polygon4Polygon) !=
          poly_poly.end());
}

TEST_CASE("refine_loop halts on the sentinel immediately") {
    MockBackend mock({{"Judge whether", "Looks complete. This is a faithful trajectory."}});
    llm::Gateway gw(mock);
    TemplateSet ts = TemplateSet::builtin();
    AgentConfig cfg;

    Trajectory traj;
    traj.record_id = "r";
    traj.steps.push_back({StepKind::ModelResponse, "<A, r, B>", 0});
    std::string answer = refine_loop(traj, "<A, r, B>", gw, ts, cfg, "t");
    CHECK(answer == "<A, r, B>");
    CHECK(traj.halted_by == Halt::Faithful);
    CHECK(count_kind(traj, StepKind::VerifierFeedback) == 1);
    CHECK(count_kind(traj, StepKind::UpdaterRevision) == 0);
}

TEST_CASE("refine_loop runs exactly max_iterations when never faithful") {
    std::vector<ScriptStep> steps;
    for (int i = 0; i < 3; ++i) {
        steps.push_back({"Judge whether", "still missing a triplet"});
        steps.push_back({"Follow suggestion", "<A, r, B>\n<C, s, D>"});
    }
    MockBackend mock(steps);
    llm::Gateway gw(mock);
    TemplateSet ts = TemplateSet::builtin();
    AgentConfig cfg; // max_iterations = 3

    Trajectory traj;
    traj.steps.push_back({StepKind::ModelResponse, "<A, r, B>", 0});
    std::string answer = refine_loop(traj, "<A, r, B>", gw, ts, cfg, "t");
    CHECK(traj.halted_by == Halt::MaxIterations);
    CHECK(count_kind(traj, StepKind::VerifierFeedback) == 3);
    CHECK(count_kind(traj, StepKind::UpdaterRevision) == 3);
    CHECK(answer == "<A, r, B>\n<C, s, D>");
}

TEST_CASE("refine_loop: one revision then faithful") {
    MockBackend mock({{"Judge whether", "missing temporal triplet"},
                      {"Follow suggestion", "<A, r, B>\n<A, built-in, 1900>"},
                      {"Judge whether", "This is a faithful trajectory."}});
    llm::Gateway gw(mock);
    TemplateSet ts = TemplateSet::builtin();
    AgentConfig cfg;

    Trajectory traj;
    traj.steps.push_back({StepKind::ModelResponse, "<A, r, B>", 0});
    refine_loop(traj, "<A, r, B>", gw, ts, cfg, "t");
    CHECK(traj.halted_by == Halt::Faithful);
    CHECK(count_kind(traj, StepKind::VerifierFeedback) == 2);
    CHECK(count_kind(traj, StepKind::UpdaterRevision) == 1);
}

TEST_CASE("run_rte on the Columbia record yields exactly the expected triplet") {
    MockBackend mock(columbia_script());
    llm::Gateway gw(mock);
    TemplateSet ts = TemplateSet::builtin();
    AgentConfig cfg;

    RteOutcome out = run_rte(columbia_record(), gw, ts, cfg);
    CHECK(out.trajectory.halted_by == Halt::Faithful);
    REQUIRE(out.triplets.size() == 1);
    CHECK(out.triplets[0].head == "Columbia University");
    CHECK(out.triplets[0].relation == "locate-in");
    CHECK(out.triplets[0].tail == "New York City");
    CHECK(out.triplets[0].provenance.record_id == "rte-0");
    CHECK(out.triplets[0].provenance.stage == kg::Stage::Rte);
    CHECK(out.views[0] == kg::View::Spatial);
    CHECK(mock.remaining_steps() == 0);
}

TEST_CASE("run_rte deduplicates a triplet repeated across views") {
    MockBackend mock({
        {"spatial view", "Entity types: University\nRelation types: locate-in"},
        {"Let's think step by step", "<Columbia University, locate-in, New York City>"},
        {"temporal view", "Entity types: none\nRelation types: none"},
        {"Let's think step by step", "<columbia university, locate-in, new york city>"},
        {"functional view", "Entity types: none\nRelation types: none"},
        {"Let's think step by step", "nothing"},
        {"Judge whether", "This is a faithful trajectory."},
    });
    llm::Gateway gw(mock);
    RteOutcome out = run_rte(columbia_record(), gw, TemplateSet::builtin(), AgentConfig{});
    CHECK(out.triplets.size() == 1);
    CHECK(out.views[0] == kg::View::Spatial); // first-view attribution sticks
}

TEST_CASE("run_rte call budget stays within the termination bound") {
    std::vector<ScriptStep> steps;
    for (int v = 0; v < 3; ++v) {
        steps.push_back({"view", "Entity types: T\nRelation types: r"});
        steps.push_back({"step by step", "<A, r, B>"});
    }
    for (int i = 0; i < 3; ++i) {
        steps.push_back({"Judge whether", "keep going"});
        steps.push_back({"Follow suggestion", "<A, r, B>"});
    }
    MockBackend mock(steps);
    llm::Gateway gw(mock);
    AgentConfig cfg;
    run_rte(columbia_record(), gw, TemplateSet::builtin(), cfg);
    long bound = 3 * 2 + 2 * cfg.max_iterations + 2;
    CHECK(gw.total_calls() <= bound);
}

TEST_CASE("run_kgc: tool request, deliberation, faithful verdict") {
    MockBackend mock({
        {"completing an urban knowledge graph", "Coordinates look far apart; tools will confirm."},
        {"Which types of tool interface you need", "I need Distance and Geohash."},
        {"Please refine your reasoning process",
         "The distance is about 6.9 km, so the relation is DC."},
        {"Judge whether", "This is a faithful trajectory."},
    });
    llm::Gateway gw(mock);
    AgentConfig cfg;
    KgcOutcome out = run_kgc(columbia_empire(), gw, TemplateSet::builtin(), cfg);
    REQUIRE(out.relation.has_value());
    CHECK(*out.relation == tools::Rcc5Relation::DC);
    CHECK(out.trajectory.halted_by == Halt::Faithful);
    long tool_invocations = static_cast<long>(count_kind(out.trajectory, StepKind::ToolCall));
    CHECK(gw.total_calls() <= 2 + tool_invocations + 2 * cfg.max_iterations);
    // Distance once + Geohash twice (head and tail)
    CHECK(count_kind(out.trajectory, StepKind::ToolResult) == 3);
    bool has_distance_result = false;
    for (const auto& s : out.trajectory.steps)
        if (s.kind == StepKind::ToolResult && s.payload.starts_with("tool(Distance)="))
            has_distance_result = true;
    CHECK(has_distance_result);
}

TEST_CASE("run_kgc falls back to kind-matched tools when none are requested") {
    MockBackend mock({
        {"completing an urban knowledge graph", "reasoning"},
        {"Which types of tool interface you need", "I need the ruler tool."},
        {"Please refine your reasoning process", "final answer: DC"},
        {"Judge whether", "This is a faithful trajectory."},
    });
    llm::Gateway gw(mock);
    KgcOutcome out = run_kgc(columbia_empire(), gw, TemplateSet::builtin(), AgentConfig{});
    REQUIRE(out.relation.has_value());
    // fallback for two points: Geohash (x2) + Distance
    CHECK(count_kind(out.trajectory, StepKind::ToolResult) == 3);
}

TEST_CASE("run_kgc without a parseable relation halts with Error") {
    MockBackend mock({
        {"completing an urban knowledge graph", "reasoning"},
        {"Which types of tool interface", "Distance"},
        {"Please refine", "the entities are adjacent"},
        {"Judge whether", "keep trying"},
        {"Follow suggestion", "they are adjacent, truly"},
        {"Judge whether", "keep trying"},
        {"Follow suggestion", "adjacent I say"},
        {"Judge whether", "keep trying"},
        {"Follow suggestion", "adjacent!"},
    });
    llm::Gateway gw(mock);
    KgcOutcome out = run_kgc(columbia_empire(), gw, TemplateSet::builtin(), AgentConfig{});
    CHECK_FALSE(out.relation.has_value());
    CHECK(out.trajectory.halted_by == Halt::Error);
    CHECK_FALSE(out.trajectory.error.empty());
}

TEST_CASE("backend failure preserves the partial trajectory") {
    MockBackend mock({{"spatial view", "Entity types: T\nRelation types: r"}});
    llm::Gateway gw(mock); // second call exhausts the script
    RteOutcome out = run_rte(columbia_record(), gw, TemplateSet::builtin(), AgentConfig{});
    CHECK(out.trajectory.halted_by == Halt::Error);
    CHECK(out.triplets.empty());
    CHECK(out.trajectory.steps.size() >= 2); // instruction + first response retained
}

TEST_CASE("run_batch unions RTE and KGC facts with provenance") {
    auto steps = columbia_script();
    steps.push_back({"completing an urban knowledge graph", "far apart"});
    steps.push_back({"Which types of tool interface you need", "Distance"});
    steps.push_back({"Please refine your reasoning process", "relation: DC"});
    steps.push_back({"Judge whether", "This is a faithful trajectory."});
    MockBackend mock(steps);
    llm::Gateway gw(mock);

    std::vector<ingest::RteRecord> rte{columbia_record()};
    std::vector<ingest::KgcRecord> kgc{columbia_empire()};
    BatchResult batch = run_batch(rte, kgc, gw, TemplateSet::builtin(), AgentConfig{});

    CHECK(batch.failures.empty());
    CHECK(batch.graph.stats().facts == 2);
    CHECK(batch.graph.stats().entities == 3);
    CHECK(batch.trajectories.size() == 2);
    CHECK(batch.graph.find_relation("DC") != nullptr);
    CHECK(batch.graph.find_relation("DC")->view == kg::View::Spatial);
    // KGC entities carry their geometries into the graph
    CHECK(batch.graph.find_entity("Empire State Building")->geometry.has_value());
    CHECK_FALSE(batch.ledger.empty());

    SUBCASE("per-record failures are isolated") {
        MockBackend empty_mock(std::vector<ScriptStep>{});
        llm::Gateway gw2(empty_mock);
        BatchResult failed = run_batch(rte, kgc, gw2, TemplateSet::builtin(), AgentConfig{});
        CHECK(failed.failures.size() == 2);
        CHECK(failed.graph.stats().facts == 0);
        CHECK(failed.trajectories.size() == 2);
    }
}

TEST_CASE("run_batch with parallel records produces the full fact union") {
    // Four records with record-specific matchers; the shared verifier steps
    // are interchangeable, so any interleaving yields the same graph.
    std::vector<ScriptStep> steps;
    std::vector<ingest::RteRecord> records;
    for (int i = 0; i < 4; ++i) {
        std::string marker = "district-" + std::to_string(i);
        records.push_back({"rec-" + std::to_string(i),
                           "The " + marker + " area lies in the city and serves residents."});
        for (int rep = 0; rep < 3; ++rep) { // one per view
            steps.push_back({marker, "Entity types: Area\nRelation types: locate-in"});
            steps.push_back({marker, "<" + marker + ", locate-in, the city>"});
        }
    }
    for (int i = 0; i < 4; ++i)
        steps.push_back({"Judge whether", "This is a faithful trajectory."});
    MockBackend mock(steps);
    llm::GatewayConfig gcfg;
    gcfg.max_in_flight = 4;
    llm::Gateway gw(mock, gcfg);
    AgentConfig cfg;
    cfg.parallelism = 4;
    BatchResult batch = run_batch(records, {}, gw, TemplateSet::builtin(), cfg);
    CHECK(batch.failures.empty());
    CHECK(batch.graph.stats().facts == 4);
    // trajectories come back in input order regardless of completion order
    for (size_t i = 0; i < batch.trajectories.size(); ++i)
        CHECK(batch.trajectories[i].record_id == "rec-" + std::to_string(i));
}

TEST_CASE("empty batch yields an empty graph") {
    MockBackend mock(std::vector<ScriptStep>{});
    llm::Gateway gw(mock);
    BatchResult batch = run_batch({}, {}, gw, TemplateSet::builtin(), AgentConfig{});
    CHECK(batch.graph.stats() == kg::GraphStats{0, 0, 0});
    CHECK(batch.trajectories.empty());
}

TEST_CASE("trajectory log round trip") {
    MockBackend mock(columbia_script());
    llm::Gateway gw(mock);
    RteOutcome out = run_rte(columbia_record(), gw, TemplateSet::builtin(), AgentConfig{});

    auto path = std::filesystem::temp_directory_path() / "ukg_traj.jsonl";
    std::vector<Trajectory> trajectories{out.trajectory};
    write_trajectory_log(path, trajectories);
    auto back = read_trajectory_log(path);
    REQUIRE(back.size() == 1);
    CHECK(back[0].record_id == out.trajectory.record_id);
    CHECK(back[0].task == Task::Rte);
    CHECK(back[0].steps.size() == out.trajectory.steps.size());
    CHECK(back[0].halted_by == out.trajectory.halted_by);
    CHECK(back[0].final_answer == out.trajectory.final_answer);
    for (size_t i = 0; i < back[0].steps.size(); ++i) {
        CHECK(back[0].steps[i].kind == out.trajectory.steps[i].kind);
        CHECK(back[0].steps[i].payload == out.trajectory.steps[i].payload);
        CHECK(back[0].steps[i].iteration == out.trajectory.steps[i].iteration);
    }
    std::remove(path.string().c_str());
}

TEST_CASE("identical scripts produce identical trajectories") {
    auto run_once = [] {
        MockBackend mock(columbia_script());
        llm::Gateway gw(mock);
        return run_rte(columbia_record(), gw, TemplateSet::builtin(), AgentConfig{});
    };
    RteOutcome a = run_once();
    RteOutcome b = run_once();
    REQUIRE(a.trajectory.steps.size() == b.trajectory.steps.size());
    for (size_t i = 0; i < a.trajectory.steps.size(); ++i)
        CHECK(a.trajectory.steps[i].payload == b.trajectory.steps[i].payload);
}
