#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "plccov/commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Statement-coverage toolchain for IEC 61131-3 ST/SFC projects"};
    app.require_subcommand(1);

    std::string manifest;
    std::string out_path = "-";
    auto* graph = app.add_subcommand("graph", "Export the dependency model as DOT");
    graph->add_option("manifest", manifest, "project manifest")->required();
    graph->add_option("-o,--out", out_path, "output file, '-' for stdout");

    std::string instr_out;
    auto* instrument =
        app.add_subcommand("instrument", "Insert trace points, emit the trace-point database");
    instrument->add_option("manifest", manifest, "project manifest")->required();
    instrument->add_option("-o,--out", instr_out, "output directory (default: manifest [project] out)");

    std::string db_path;
    std::string suite_path;
    std::string run_dir = "run";
    auto* run = app.add_subcommand("run", "Execute a test suite on the scan-cycle interpreter");
    run->add_option("manifest", manifest, "instrumented project manifest")->required();
    run->add_option("--db", db_path, "trace-point database")->required();
    run->add_option("--suite", suite_path, "test suite XML")->required();
    run->add_option("-o,--out", run_dir, "run directory for traces and reports");

    std::string trace_dir;
    std::string cover_out = "coverage";
    std::vector<std::string> formats{"text", "dot", "html", "json"};
    auto* cover = app.add_subcommand("cover", "Compute and render coverage from traces");
    cover->add_option("manifest", manifest, "original project manifest")->required();
    cover->add_option("--db", db_path, "trace-point database")->required();
    cover->add_option("--traces", trace_dir, "directory of .trace files")->required();
    cover->add_option("-o,--out", cover_out, "report output directory");
    cover->add_option("--format", formats, "text|dot|html|json (repeatable)");

    plccov::EstimateArgs est;
    auto* estimate = app.add_subcommand("estimate", "Tracing overhead model");
    estimate->add_flag("--table2", est.table2, "print the extrapolation grid");
    estimate->add_flag("--csv", est.csv, "grid as CSV");
    estimate->add_option("--calls", est.calls, "trace calls per scan cycle");
    estimate->add_option("--cycle-ms", est.cycle_ms, "scan cycle time in ms");
    estimate->add_option("--cost-us", est.cost_us, "per-call cost in microseconds");
    estimate->add_option("--headroom", est.headroom,
                         "application-reserved share of the cycle (default 0.80)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : plccov::kExitUsage;
    }

    if (graph->parsed()) return plccov::cmd_graph(manifest, out_path, std::cout, std::cerr);
    if (instrument->parsed())
        return plccov::cmd_instrument(manifest, instr_out, std::cout, std::cerr);
    if (run->parsed())
        return plccov::cmd_run(manifest, db_path, suite_path, run_dir, std::cout, std::cerr);
    if (cover->parsed())
        return plccov::cmd_cover(manifest, db_path, trace_dir, formats, cover_out, std::cout,
                                 std::cerr);
    if (estimate->parsed()) return plccov::cmd_estimate(est, std::cout, std::cerr);
    return plccov::kExitUsage;
}
