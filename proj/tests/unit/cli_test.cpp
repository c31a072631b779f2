#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "plccov/commands.hpp"
#include "plccov/coverage.hpp"
#include "plccov/errors.hpp"
#include "plccov/manifest.hpp"

using namespace plccov;
namespace fs = std::filesystem;

namespace {

struct Sandbox {
    fs::path dir;
    explicit Sandbox(const std::string& name) : dir(fs::temp_directory_path() / name) {
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    ~Sandbox() { fs::remove_all(dir); }
    std::string path(const std::string& rel) const { return (dir / rel).string(); }
    void write(const std::string& rel, const std::string& text) const {
        fs::create_directories((dir / rel).parent_path());
        std::ofstream f(dir / rel, std::ios::binary);
        f << text;
    }
    std::string read(const std::string& rel) const {
        std::ifstream f(dir / rel, std::ios::binary);
        std::stringstream ss;
        ss << f.rdbuf();
        return ss.str();
    }
};

const std::string kDemoManifest = std::string(PLCCOV_DEMO_DIR) + "/project.manifest";
const std::string kDemoSuite = std::string(PLCCOV_DEMO_DIR) + "/suite.xml";
const std::string kDemoSupplementary = std::string(PLCCOV_DEMO_DIR) + "/suite_supplementary.xml";

} // namespace

TEST_CASE("manifest parses sections, tasks and options") {
    Sandbox sb("plccov_cli_manifest");
    sb.write("a.st", "PROGRAM Main\nEND_PROGRAM\n");
    sb.write("p.manifest", "[project]\nname = demo\nout = build\n\n[sources]\nfile = a.st\n\n"
                           "[task]\nname = T\ncycle_ms = 10\npriority = 1\nprogram = Main\n\n"
                           "[options]\nno_reinit = true\n");
    ProjectManifest m = load_manifest(sb.path("p.manifest"));
    CHECK(m.name == "demo");
    CHECK(m.out_dir == "build");
    CHECK(m.source_files == std::vector<std::string>{"a.st"});
    REQUIRE(m.tasks.size() == 1);
    CHECK(m.tasks[0].cycle_ms == 10);
    CHECK(m.no_reinit);
    SourceProject p = load_project(m);
    CHECK(p.pous.size() == 1);

    // round trip through manifest_text
    ProjectManifest again = parse_manifest(manifest_text(m), m.base_dir);
    CHECK(manifest_text(again) == manifest_text(m));

    CHECK_THROWS_AS(parse_manifest("[sources]\n", ""), ConsistencyError);
    CHECK_THROWS_AS(parse_manifest("[project]\nname = x\n", ""), ConsistencyError);
}

TEST_CASE("cmd_graph emits DOT and omits uncalled POUs") {
    Sandbox sb("plccov_cli_graph");
    sb.write("a.st", "PROGRAM Main\nVAR\n    x : INT;\nEND_VAR\nx := Helper(v := x);\n"
                     "END_PROGRAM\n"
                     "FUNCTION Helper : INT\nVAR_INPUT\n    v : INT;\nEND_VAR\n"
                     "Helper := v + 1;\nEND_FUNCTION\n"
                     "FUNCTION_BLOCK NeverCalled\nVAR\n    y : INT;\nEND_VAR\ny := 2;\n"
                     "END_FUNCTION_BLOCK\n");
    sb.write("p.manifest", "[sources]\nfile = a.st\n\n[task]\nname = T\ncycle_ms = 10\n"
                           "priority = 1\nprogram = Main\n");
    std::ostringstream out, err;
    int rc = cmd_graph(sb.path("p.manifest"), "-", out, err);
    CHECK(rc == kExitOk);
    CHECK(out.str().find("digraph") != std::string::npos);
    CHECK(out.str().find("Helper") != std::string::npos);
    CHECK(out.str().find("NeverCalled") == std::string::npos);

    // parse errors exit with the usage code
    sb.write("bad.st", "PROGRAM Broken\nx := ;\nEND_PROGRAM\n");
    sb.write("bad.manifest", "[sources]\nfile = bad.st\n\n[task]\nname = T\ncycle_ms = 10\n"
                             "priority = 1\nprogram = Broken\n");
    std::ostringstream out2, err2;
    CHECK(cmd_graph(sb.path("bad.manifest"), "-", out2, err2) == kExitUsage);
    CHECK(err2.str().find("bad.st:2") != std::string::npos);
}

TEST_CASE("cmd_instrument writes sources, database, manifest; rejects reruns") {
    Sandbox sb("plccov_cli_instr");
    std::ostringstream out, err;
    int rc = cmd_instrument(kDemoManifest, sb.path("out"), out, err);
    REQUIRE_MESSAGE(rc == kExitOk, err.str());
    CHECK(out.str().find("instrumented 92 trace points") != std::string::npos);
    CHECK(fs::exists(sb.path("out/tracepoints.xml")));
    CHECK(fs::exists(sb.path("out/instrumented/project.manifest")));
    CHECK(fs::exists(sb.path("out/instrumented/src/main.st")));
    CHECK(sb.read("out/instrumented/src/main.st").find("tpr(i := ") != std::string::npos);

    // Instrumenting the instrumented output is rejected.
    std::ostringstream out2, err2;
    int rc2 = cmd_instrument(sb.path("out/instrumented/project.manifest"), sb.path("twice"),
                             out2, err2);
    CHECK(rc2 == kExitInconsistent);
    CHECK(err2.str().find("already instrumented") != std::string::npos);
}

TEST_CASE("cmd_run executes the demo suite and reports; cmd_cover finds the planted gaps") {
    Sandbox sb("plccov_cli_run");
    std::ostringstream out, err;
    REQUIRE(cmd_instrument(kDemoManifest, sb.path("out"), out, err) == kExitOk);

    std::ostringstream rout, rerr;
    int rc = cmd_run(sb.path("out/instrumented/project.manifest"), sb.path("out/tracepoints.xml"),
                     kDemoSuite, sb.path("run"), rout, rerr);
    REQUIRE_MESSAGE(rc == kExitOk, rerr.str());
    CHECK(rout.str().find("14 tests: 14 passed") != std::string::npos);
    int traces = 0;
    for (const auto& e : fs::directory_iterator(sb.path("run")))
        if (e.path().extension() == ".trace") ++traces;
    CHECK(traces == 14);
    CHECK(fs::exists(sb.path("run/report.txt")));
    CHECK(fs::exists(sb.path("run/report.json")));

    std::ostringstream cout_, cerr_;
    int crc = cmd_cover(kDemoManifest, sb.path("out/tracepoints.xml"), sb.path("run"),
                        {"text", "dot", "html", "json"}, sb.path("cov"), cout_, cerr_);
    REQUIRE_MESSAGE(crc == kExitOk, cerr_.str());
    std::string summary = cout_.str();
    CHECK(summary.find("ConveyorOut.LegacyPurge") != std::string::npos);
    CHECK(summary.find("ConveyorOut.LegacyEject") != std::string::npos);
    CHECK(summary.find("FaultMonitor#") != std::string::npos);
    // Untested findings are listed before the totals.
    CHECK(summary.find("Untested code") < summary.find("Status by kind"));
    for (const char* name : {"coverage.txt", "coverage.dot", "coverage.html", "coverage.json"})
        CHECK(fs::exists(sb.path(std::string("cov/") + name)));

    // Supplementary tests close the gaps.
    std::ostringstream sout, serr;
    REQUIRE(cmd_run(sb.path("out/instrumented/project.manifest"),
                    sb.path("out/tracepoints.xml"), kDemoSupplementary, sb.path("run"), sout,
                    serr) == kExitOk);
    std::ostringstream cout2, cerr2;
    REQUIRE(cmd_cover(kDemoManifest, sb.path("out/tracepoints.xml"), sb.path("run"), {"json"},
                      sb.path("cov2"), cout2, cerr2) == kExitOk);
    CHECK(cout2.str().find("No untested code found") != std::string::npos);
}

TEST_CASE("graph node count equals the dependency model's") {
    Sandbox sb("plccov_cli_nodecount");
    std::ostringstream out, err;
    REQUIRE(cmd_graph(kDemoManifest, "-", out, err) == kExitOk);
    size_t dot_nodes = 0;
    std::istringstream lines(out.str());
    std::string line;
    while (std::getline(lines, line))
        if (line.find("[label=") != std::string::npos && line.find("->") == std::string::npos)
            ++dot_nodes;
    ProjectManifest m = load_manifest(kDemoManifest);
    DependencyModel model = build_model(load_project(m));
    CHECK(dot_nodes == model.nodes.size());
}

TEST_CASE("coverage JSON per-test counts equal a recount of the trace files") {
    Sandbox sb("plccov_cli_recount");
    std::ostringstream out, err;
    REQUIRE(cmd_instrument(kDemoManifest, sb.path("out"), out, err) == kExitOk);
    std::ostringstream rout, rerr;
    REQUIRE(cmd_run(sb.path("out/instrumented/project.manifest"), sb.path("out/tracepoints.xml"),
                    kDemoSuite, sb.path("run"), rout, rerr) == kExitOk);
    std::ostringstream cout_, cerr_;
    REQUIRE(cmd_cover(kDemoManifest, sb.path("out/tracepoints.xml"), sb.path("run"), {"json"},
                      sb.path("cov"), cout_, cerr_) == kExitOk);

    CoverageReport report = report_from_json(sb.read("cov/coverage.json"));
    int recount_total = 0;
    for (const auto& entry : fs::directory_iterator(sb.path("run"))) {
        if (entry.path().extension() != ".trace") continue;
        std::ifstream f(entry.path(), std::ios::binary);
        std::stringstream ss;
        ss << f.rdbuf();
        int visited = 0;
        for (auto& [id, v] : parse_trace_line(ss.str()))
            if (v) ++visited;
        CHECK(report.per_test_counts.at(entry.path().stem().string()) == visited);
        recount_total += visited;
    }
    CHECK(recount_total > 0);
}

TEST_CASE("cmd_run exits 1 on failing expectations") {
    Sandbox sb("plccov_cli_fail");
    std::ostringstream out, err;
    REQUIRE(cmd_instrument(kDemoManifest, sb.path("out"), out, err) == kExitOk);
    sb.write("failing.xml", "<suite><test id=\"bad\">"
                            "<wait cycles=\"1\"/>"
                            "<expect var=\"lamp_running\" value=\"TRUE\"/>"
                            "</test></suite>");
    std::ostringstream rout, rerr;
    int rc = cmd_run(sb.path("out/instrumented/project.manifest"), sb.path("out/tracepoints.xml"),
                     sb.path("failing.xml"), sb.path("run"), rout, rerr);
    CHECK(rc == kExitTestFailures);
    CHECK(rout.str().find("FAIL") != std::string::npos);
}

TEST_CASE("cmd_cover refuses traces from a differently instrumented project") {
    Sandbox sb("plccov_cli_fp");
    std::ostringstream out, err;
    REQUIRE(cmd_instrument(kDemoManifest, sb.path("out"), out, err) == kExitOk);
    std::ostringstream rout, rerr;
    REQUIRE(cmd_run(sb.path("out/instrumented/project.manifest"), sb.path("out/tracepoints.xml"),
                    kDemoSuite, sb.path("run"), rout, rerr) == kExitOk);

    // A db with a tampered fingerprint must abort with the consistency code.
    std::string db = sb.read("out/tracepoints.xml");
    size_t pos = db.find("fingerprint=\"");
    db[pos + 13] = db[pos + 13] == 'a' ? 'b' : 'a';
    sb.write("tampered.xml", db);
    std::ostringstream cout_, cerr_;
    int rc = cmd_cover(kDemoManifest, sb.path("tampered.xml"), sb.path("run"), {"json"},
                       sb.path("cov"), cout_, cerr_);
    CHECK(rc == kExitInconsistent);
    CHECK(cerr_.str().find("fingerprint") != std::string::npos);
}

TEST_CASE("cmd_estimate prints the grid, constants and budget checks") {
    std::ostringstream out, err;
    EstimateArgs table;
    table.table2 = true;
    CHECK(cmd_estimate(table, out, err) == kExitOk);
    CHECK(out.str().find("54.43%") != std::string::npos);
    CHECK(out.str().find("0.5443") != std::string::npos);
    CHECK(out.str().find("0.6582") != std::string::npos); // measured-quote constant

    std::ostringstream csv_out, csv_err;
    EstimateArgs csv = table;
    csv.csv = true;
    CHECK(cmd_estimate(csv, csv_out, csv_err) == kExitOk);
    int lines = 0;
    for (char c : csv_out.str())
        if (c == '\n') ++lines;
    CHECK(lines == 8);

    std::ostringstream eout, eerr;
    EstimateArgs one;
    one.calls = 395;
    one.cycle_ms = 10.0;
    one.cost_us = 0.6582;
    CHECK(cmd_estimate(one, eout, eerr) == kExitOk);
    CHECK(eout.str().find("2.60%") != std::string::npos);

    std::ostringstream bout, berr;
    EstimateArgs bad; // neither --table2 nor --calls
    CHECK(cmd_estimate(bad, bout, berr) == kExitUsage);
}

TEST_CASE("pipeline determinism: byte-identical artifacts across runs") {
    Sandbox a("plccov_cli_det_a");
    Sandbox b("plccov_cli_det_b");
    for (const Sandbox* sb : {&a, &b}) {
        std::ostringstream out, err;
        REQUIRE(cmd_instrument(kDemoManifest, sb->path("out"), out, err) == kExitOk);
        std::ostringstream rout, rerr;
        REQUIRE(cmd_run(sb->path("out/instrumented/project.manifest"),
                        sb->path("out/tracepoints.xml"), kDemoSuite, sb->path("run"), rout,
                        rerr) == kExitOk);
        std::ostringstream cout_, cerr_;
        REQUIRE(cmd_cover(kDemoManifest, sb->path("out/tracepoints.xml"), sb->path("run"),
                          {"text", "dot", "html", "json"}, sb->path("cov"), cout_,
                          cerr_) == kExitOk);
    }
    for (const char* rel :
         {"out/tracepoints.xml", "out/instrumented/src/main.st", "run/T07_auto_full_cycle.trace",
          "run/report.txt", "run/report.json", "cov/coverage.txt", "cov/coverage.dot",
          "cov/coverage.html", "cov/coverage.json"}) {
        CAPTURE(rel);
        CHECK(a.read(rel) == b.read(rel));
    }
}
