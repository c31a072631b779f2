#include "doctest.h"

#include <random>

#include "plccov/coverage.hpp"
#include "plccov/errors.hpp"
#include "plccov/parser.hpp"

#include "support/fixtures.hpp"
#include "support/gen.hpp"

using namespace plccov;

namespace {

struct Rig {
    SourceProject project;
    DependencyModel model;
    InstrumentedProject instr;
    TracePointDatabase db;

    explicit Rig(uint32_t seed) {
        gen::Generated g = gen::random_project(seed, {});
        project = parse_project(g.files, g.tasks);
        model = build_model(project);
        auto [ip, d] = instrument(project, model);
        instr = std::move(ip);
        db = std::move(d);
    }

    Rig(std::vector<std::pair<std::string, std::string>> files, std::vector<TaskDecl> tasks) {
        project = parse_project(files, tasks);
        model = build_model(project);
        auto [ip, d] = instrument(project, model);
        instr = std::move(ip);
        db = std::move(d);
    }
};

ExecutionTrace make_trace(const std::string& id, const TracePointDatabase& db,
                          const std::vector<int>& visited) {
    ExecutionTrace t;
    t.test_id = id;
    for (const TracePoint& tp : db.points) t.visits[tp.id] = false;
    for (int v : visited) t.visits[v] = true;
    return t;
}

ExecutionTrace random_trace(const std::string& id, const TracePointDatabase& db,
                            std::mt19937& rng) {
    ExecutionTrace t;
    t.test_id = id;
    for (const TracePoint& tp : db.points) t.visits[tp.id] = rng() % 3 == 0;
    return t;
}

// Brute-force status oracle: recompute descendant point sets per node.
CoverageStatus oracle_status(const DependencyModel& m, const TracePointDatabase& db,
                             const std::vector<bool>& visited, int node) {
    std::set<int> points;
    std::vector<int> work{node};
    std::set<int> seen{node};
    while (!work.empty()) {
        int id = work.back();
        work.pop_back();
        for (const TracePoint& tp : db.points)
            if (tp.node_ref == id) points.insert(tp.id);
        for (const DepEdge& e : m.edges)
            if (e.kind == EdgeKind::Contains && e.source == id && seen.insert(e.target).second)
                work.push_back(e.target);
    }
    if (points.empty()) return CoverageStatus::Covered;
    size_t vis = 0;
    for (int p : points)
        if (visited[static_cast<size_t>(p)]) ++vis;
    if (vis == points.size()) return CoverageStatus::Covered;
    if (vis == 0) return CoverageStatus::Uncovered;
    return CoverageStatus::Partial;
}

} // namespace

TEST_CASE("superimpose: OR-column equals the set union of traces") {
    Rig rig({{"sign.st", fixtures::kSignCheckFb}, {"main.st", fixtures::kSignCheckDriver}},
            {{"MainTask", 10, 1, "Main"}});
    std::mt19937 rng(99);
    std::vector<ExecutionTrace> traces;
    std::set<int> union_oracle;
    for (int t = 0; t < 6; ++t) {
        traces.push_back(random_trace("t" + std::to_string(t), rig.db, rng));
        for (const auto& [id, v] : traces.back().visits)
            if (v) union_oracle.insert(id);
    }
    VisitMatrix m = superimpose(traces, rig.db);
    for (int id = 0; id <= rig.db.max_tp; ++id)
        CHECK(was_visited(m, id) == (union_oracle.count(id) > 0));

    // one all-true trace -> all columns visited
    VisitMatrix all = superimpose({make_trace("all", rig.db, {0, 1, 2, 3, 4})}, rig.db);
    for (int id = 0; id <= rig.db.max_tp; ++id) CHECK(was_visited(all, id));

    // zero traces -> WasVisited false everywhere
    VisitMatrix none = superimpose({}, rig.db);
    for (int id = 0; id <= rig.db.max_tp; ++id) CHECK_FALSE(was_visited(none, id));
    CHECK_THROWS_AS(was_visited(none, 99), ConsistencyError);
}

TEST_CASE("superimpose rejects duplicates and id mismatches") {
    Rig rig({{"sign.st", fixtures::kSignCheckFb}, {"main.st", fixtures::kSignCheckDriver}},
            {{"MainTask", 10, 1, "Main"}});
    auto t = make_trace("dup", rig.db, {0});
    CHECK_THROWS_AS(superimpose({t, t}, rig.db), ConsistencyError);
    ExecutionTrace bad = make_trace("bad", rig.db, {});
    bad.visits.erase(2);
    bad.visits[77] = true;
    CHECK_THROWS_AS(superimpose({bad}, rig.db), ConsistencyError);
}

TEST_CASE("superimposition is order-independent") {
    Rig rig(4242);
    std::mt19937 rng(7);
    std::vector<ExecutionTrace> traces;
    for (int t = 0; t < 5; ++t)
        traces.push_back(random_trace("t" + std::to_string(t), rig.db, rng));
    VisitMatrix a = superimpose(traces, rig.db);
    std::reverse(traces.begin(), traces.end());
    VisitMatrix b = superimpose(traces, rig.db);
    CHECK(a.column_or() == b.column_or());
}

TEST_CASE("fig3 partial POU: blocks visited by sign split the status") {
    Rig rig({{"sign.st", fixtures::kSignCheckFb}, {"main.st", fixtures::kSignCheckDriver}},
            {{"MainTask", 10, 1, "Main"}});
    // Visits: main block 0, header 1, then 2 -- elsif 3 and else 4 unvisited.
    VisitMatrix m = superimpose({make_trace("neg", rig.db, {0, 1, 2})}, rig.db);
    CoverageReport report = rollup(rig.model, m, rig.db);

    const DepNode* sign = rig.model.find_by_name(NodeKind::Pou, "SignCheck");
    REQUIRE(sign != nullptr);
    CHECK(report.status.at(sign->id) == CoverageStatus::Partial);
    for (const DepNode* b : basic_blocks(rig.model)) {
        if (b->sequential_id == 3 || b->sequential_id == 4)
            CHECK(report.status.at(b->id) == CoverageStatus::Uncovered);
        else
            CHECK(report.status.at(b->id) == CoverageStatus::Covered);
    }
    // Leaf status is never Partial.
    for (const DepNode& n : rig.model.nodes)
        if (n.kind == NodeKind::BasicBlock)
            CHECK(report.status.at(n.id) != CoverageStatus::Partial);
}

TEST_CASE("all-false visits mark the POU uncovered (red)") {
    Rig rig({{"sign.st", fixtures::kSignCheckFb}, {"main.st", fixtures::kSignCheckDriver}},
            {{"MainTask", 10, 1, "Main"}});
    VisitMatrix m = superimpose({make_trace("none", rig.db, {})}, rig.db);
    CoverageReport report = rollup(rig.model, m, rig.db);
    const DepNode* sign = rig.model.find_by_name(NodeKind::Pou, "SignCheck");
    CHECK(report.status.at(sign->id) == CoverageStatus::Uncovered);
    CHECK(report.status.at(0) == CoverageStatus::Uncovered); // project
}

TEST_CASE("rollup matches the brute-force oracle on random models and visits") {
    for (uint32_t seed = 5000; seed < 5030; ++seed) {
        Rig rig(seed);
        std::mt19937 rng(seed + 1);
        std::vector<ExecutionTrace> traces;
        for (int t = 0; t < 4; ++t)
            traces.push_back(random_trace("t" + std::to_string(t), rig.db, rng));
        VisitMatrix m = superimpose(traces, rig.db);
        CoverageReport report = rollup(rig.model, m, rig.db);
        std::vector<bool> visited = m.column_or();
        visited.resize(static_cast<size_t>(rig.db.max_tp + 1), false);
        for (const DepNode& n : rig.model.nodes)
            REQUIRE_MESSAGE(report.status.at(n.id) ==
                                oracle_status(rig.model, rig.db, visited, n.id),
                            "seed ", seed, " node ", n.name);
    }
}

TEST_CASE("monotonicity: adding a trace never demotes a status") {
    for (uint32_t seed = 5100; seed < 5110; ++seed) {
        Rig rig(seed);
        std::mt19937 rng(seed);
        std::vector<ExecutionTrace> traces{random_trace("a", rig.db, rng)};
        VisitMatrix m1 = superimpose(traces, rig.db);
        CoverageReport r1 = rollup(rig.model, m1, rig.db);
        traces.push_back(random_trace("b", rig.db, rng));
        VisitMatrix m2 = superimpose(traces, rig.db);
        CoverageReport r2 = rollup(rig.model, m2, rig.db);
        auto rank = [](CoverageStatus s) {
            return s == CoverageStatus::Uncovered ? 0 : s == CoverageStatus::Partial ? 1 : 2;
        };
        for (const auto& [node, s1] : r1.status)
            REQUIRE_MESSAGE(rank(r2.status.at(node)) >= rank(s1), "seed ", seed);
    }
}

TEST_CASE("find_untested: maximal subtrees plus leaves on demand") {
    Rig rig({{"sign.st", fixtures::kSignCheckFb}, {"main.st", fixtures::kSignCheckDriver}},
            {{"MainTask", 10, 1, "Main"}});
    VisitMatrix m = superimpose({make_trace("neg", rig.db, {0, 1, 2})}, rig.db);
    CoverageReport report = rollup(rig.model, m, rig.db);

    // Maximal subtrees: the two uncovered arm blocks (their POU is partial).
    REQUIRE(report.untested.size() == 2);
    CHECK(report.untested[0].kind == NodeKind::BasicBlock);
    CHECK(report.untested[0].loc.line < report.untested[1].loc.line); // ordered by line

    // All uncovered leaves on demand.
    auto leaves = find_untested(report, rig.model, {NodeKind::BasicBlock});
    CHECK(leaves.size() == 2);

    // Fully-covered project has no findings.
    VisitMatrix full = superimpose({make_trace("all", rig.db, {0, 1, 2, 3, 4})}, rig.db);
    CoverageReport covered = rollup(rig.model, full, rig.db);
    CHECK(covered.untested.empty());
    CHECK(find_untested(covered, rig.model, {NodeKind::BasicBlock}).empty());
}

TEST_CASE("findings equal the complement of the visited leaf set") {
    for (uint32_t seed = 5200; seed < 5220; ++seed) {
        Rig rig(seed);
        std::mt19937 rng(seed * 3);
        VisitMatrix m = superimpose({random_trace("t", rig.db, rng)}, rig.db);
        CoverageReport report = rollup(rig.model, m, rig.db);
        std::vector<bool> visited = m.column_or();
        visited.resize(static_cast<size_t>(rig.db.max_tp + 1), false);

        auto blocks = find_untested(report, rig.model, {NodeKind::BasicBlock});
        std::set<int> found;
        for (const Finding& f : blocks) found.insert(rig.model.node(f.node).sequential_id);
        std::set<int> expected;
        for (const TracePoint& tp : rig.db.points)
            if (tp.kind == TpKind::Block && !visited[static_cast<size_t>(tp.id)])
                expected.insert(tp.id);
        REQUIRE_MESSAGE(found == expected, "seed ", seed);
    }
}

TEST_CASE("dot output: colored POU nodes, never green") {
    const char* src = "FUNCTION_BLOCK Helper\nVAR\n    x : INT;\nEND_VAR\nx := 1;\n"
                      "END_FUNCTION_BLOCK\n"
                      "PROGRAM Main\nHelper();\nEND_PROGRAM\n";
    Rig rig({{"a.st", src}}, {{"T", 10, 1, "Main"}});
    VisitMatrix m = superimpose({make_trace("t", rig.db, {0})}, rig.db);
    CoverageReport report = rollup(rig.model, m, rig.db);
    std::string dot = report_to_dot(report, rig.model);
    // Two POUs -> exactly two filled (colored) nodes.
    size_t fills = 0, pos = 0;
    while ((pos = dot.find("fillcolor=", pos)) != std::string::npos) {
        ++fills;
        pos += 10;
    }
    CHECK(fills == 2);
    CHECK(dot.find("green") == std::string::npos);
    CHECK(dot.find("firebrick") != std::string::npos); // Helper uncovered
    CHECK(dot.find("lightgrey") != std::string::npos); // Main covered
    // POU-level call edge present.
    const DepNode* main_pou = rig.model.find_by_name(NodeKind::Pou, "Main");
    const DepNode* helper = rig.model.find_by_name(NodeKind::Pou, "Helper");
    CHECK(dot.find("n" + std::to_string(main_pou->id) + " -> n" +
                   std::to_string(helper->id)) != std::string::npos);
}

TEST_CASE("no output format ever carries a green marker") {
    Rig rig({{"sign.st", fixtures::kSignCheckFb}, {"main.st", fixtures::kSignCheckDriver},
             {"chart.st", fixtures::kTinySfcProgram}},
            {{"MainTask", 10, 1, "Main"}, {"ChartTask", 20, 2, "Chart"}});
    VisitMatrix m = superimpose({make_trace("t", rig.db, {0, 1, 2})}, rig.db);
    CoverageReport report = rollup(rig.model, m, rig.db);
    for (const std::string& text :
         {report_to_text(report, rig.model), report_to_dot(report, rig.model),
          report_to_html(report, rig.model, rig.project, rig.db, m),
          report_to_json(report, rig.model)}) {
        CAPTURE(text.substr(0, 60));
        CHECK(text.find("green") == std::string::npos);
    }
}

TEST_CASE("html renders uncovered lines and SFC step lists") {
    Rig rig({{"sign.st", fixtures::kSignCheckFb}, {"main.st", fixtures::kSignCheckDriver},
             {"chart.st", fixtures::kTinySfcProgram}},
            {{"MainTask", 10, 1, "Main"}, {"ChartTask", 20, 2, "Chart"}});
    VisitMatrix m = superimpose({make_trace("t", rig.db, {0, 1, 2})}, rig.db);
    CoverageReport report = rollup(rig.model, m, rig.db);
    std::string html = report_to_html(report, rig.model, rig.project, rig.db, m);
    CHECK(html.find("class=\"unc\"") != std::string::npos);
    CHECK(html.find("out := -1") != std::string::npos); // covered line shown
    CHECK(html.find("Chart.Idle") != std::string::npos);
    CHECK(html.find("never traversed") != std::string::npos);
}

TEST_CASE("json report round-trips") {
    for (uint32_t seed : {5300u, 5301u, 5302u}) {
        Rig rig(seed);
        std::mt19937 rng(seed);
        VisitMatrix m = superimpose(
            {random_trace("a", rig.db, rng), random_trace("b", rig.db, rng)}, rig.db);
        CoverageReport report = rollup(rig.model, m, rig.db);
        CoverageReport loaded = report_from_json(report_to_json(report, rig.model));
        REQUIRE_MESSAGE(loaded == report, "seed ", seed);
    }
}

TEST_CASE("per-test counts and totals") {
    Rig rig({{"sign.st", fixtures::kSignCheckFb}, {"main.st", fixtures::kSignCheckDriver}},
            {{"MainTask", 10, 1, "Main"}});
    VisitMatrix m = superimpose(
        {make_trace("a", rig.db, {0, 1, 2}), make_trace("b", rig.db, {0})}, rig.db);
    CoverageReport report = rollup(rig.model, m, rig.db);
    CHECK(report.per_test_counts.at("a") == 3);
    CHECK(report.per_test_counts.at("b") == 1);
    CHECK(report.points_total == 5);
    CHECK(report.points_visited == 3);
    CHECK(report.totals.at("block").at("covered") == 3);
    CHECK(report.totals.at("block").at("uncovered") == 2);
}

TEST_CASE("rollup rejects a database without model references") {
    Rig rig({{"sign.st", fixtures::kSignCheckFb}, {"main.st", fixtures::kSignCheckDriver}},
            {{"MainTask", 10, 1, "Main"}});
    TracePointDatabase loaded = parse_tp_database(tp_database_text(rig.db));
    VisitMatrix m = superimpose({make_trace("t", rig.db, {})}, rig.db);
    CHECK_THROWS_AS(rollup(rig.model, m, loaded), ConsistencyError);
}
