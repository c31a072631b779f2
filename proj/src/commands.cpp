#include "plccov/commands.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>

#include "plccov/coverage.hpp"
#include "plccov/errors.hpp"
#include "plccov/instrument.hpp"
#include "plccov/manifest.hpp"
#include "plccov/overhead.hpp"
#include "plccov/printer.hpp"
#include "plccov/runtime.hpp"
#include "plccov/testkit.hpp"

namespace plccov {

namespace fs = std::filesystem;

namespace {

int report_error(std::ostream& err, const std::exception& e, int code) {
    err << "error: " << e.what() << "\n";
    return code;
}

void write_file(const fs::path& path, const std::string& text) {
    fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConsistencyError("cannot write " + path.string());
    f << text;
}

} // namespace

int cmd_graph(const std::string& manifest_path, const std::string& out_path, std::ostream& out,
              std::ostream& err) {
    try {
        ProjectManifest m = load_manifest(manifest_path);
        SourceProject project = load_project(m);
        DependencyModel model = build_model(project);
        std::string dot = to_dot(model);
        if (out_path == "-") out << dot;
        else write_file(out_path, dot);
        return kExitOk;
    } catch (const ParseError& e) {
        return report_error(err, e, kExitUsage);
    } catch (const ConsistencyError& e) {
        return report_error(err, e, kExitInconsistent);
    }
}

int cmd_instrument(const std::string& manifest_path, const std::string& out_override,
                   std::ostream& out, std::ostream& err) {
    try {
        auto start = std::chrono::steady_clock::now();
        ProjectManifest m = load_manifest(manifest_path);
        SourceProject project = load_project(m);
        DependencyModel model = build_model(project);
        auto [instr, db] = instrument(project, model);

        fs::path out_dir = out_override.empty() ? fs::path(m.base_dir) / m.out_dir
                                                : fs::path(out_override);
        fs::path instr_dir = out_dir / "instrumented";
        for (const auto& [rel, text] : pretty_print(instr.base))
            write_file(instr_dir / rel, text);

        ProjectManifest instr_manifest = m;
        instr_manifest.source_files.clear();
        for (const auto& [rel, text] : pretty_print(instr.base)) {
            (void)text;
            instr_manifest.source_files.push_back(rel);
        }
        write_file(instr_dir / "project.manifest", manifest_text(instr_manifest));
        emit_tp_database(db, (out_dir / "tracepoints.xml").string());

        auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                           std::chrono::steady_clock::now() - start)
                           .count();
        out << "instrumented " << db.point_count() << " trace points in " << elapsed
            << " ms\n";
        out << "sources: " << instr_dir.string() << "\n";
        out << "database: " << (out_dir / "tracepoints.xml").string() << "\n";
        return kExitOk;
    } catch (const ParseError& e) {
        return report_error(err, e, kExitUsage);
    } catch (const ConsistencyError& e) {
        return report_error(err, e, kExitInconsistent);
    }
}

int cmd_run(const std::string& manifest_path, const std::string& db_path,
            const std::string& suite_path, const std::string& run_dir, std::ostream& out,
            std::ostream& err) {
    try {
        ProjectManifest m = load_manifest(manifest_path);
        SourceProject project = load_project(m);
        TracePointDatabase db = load_tp_database(db_path);
        verify_fingerprint(db, project);

        Interpreter interp(project, make_scan_config(project), db.names);
        if (interp.max_tp() != db.max_tp)
            throw ConsistencyError("trace array size does not match the database");

        std::vector<TestCase> suite = load_suite(suite_path, interp);
        RunOptions opts;
        opts.run_dir = run_dir;
        opts.reinit_per_test = !m.no_reinit;
        opts.interactive = m.interactive_manual;
        opts.prompt_in = &std::cin;
        opts.prompt_out = &out;
        SuiteResult result = run_suite(interp, suite, db, opts);

        std::string text = report_text(result);
        write_file(fs::path(run_dir) / "report.txt", text);
        write_file(fs::path(run_dir) / "report.json", report_json(result));
        out << text;

        for (const TestVerdict& v : result.verdicts)
            if (v.outcome != TestVerdict::Outcome::Passed) return kExitTestFailures;
        return kExitOk;
    } catch (const ParseError& e) {
        return report_error(err, e, kExitUsage);
    } catch (const ConsistencyError& e) {
        return report_error(err, e, kExitInconsistent);
    } catch (const RuntimeFault& e) {
        return report_error(err, e, kExitInconsistent);
    }
}

int cmd_cover(const std::string& manifest_path, const std::string& db_path,
              const std::string& trace_dir, const std::vector<std::string>& formats,
              const std::string& out_dir, std::ostream& out, std::ostream& err) {
    try {
        ProjectManifest m = load_manifest(manifest_path);
        SourceProject project = load_project(m);
        DependencyModel model = build_model(project);
        auto [instr, db] = instrument(project, model);

        TracePointDatabase stored = load_tp_database(db_path);
        if (stored.fingerprint != db.fingerprint)
            throw ConsistencyError(
                "trace-point database does not match the project sources (fingerprint " +
                stored.fingerprint + " vs " + db.fingerprint + ")");

        std::vector<std::string> trace_files;
        for (const auto& entry : fs::directory_iterator(trace_dir))
            if (entry.is_regular_file() && entry.path().extension() == ".trace")
                trace_files.push_back(entry.path().string());
        std::sort(trace_files.begin(), trace_files.end());

        std::vector<ExecutionTrace> traces;
        for (const std::string& path : trace_files)
            traces.push_back(read_trace_file(path, fs::path(path).stem().string(), db));

        VisitMatrix matrix = superimpose(traces, db);
        CoverageReport report = rollup(model, matrix, db);

        out << report_to_text(report, model);

        fs::create_directories(out_dir);
        for (const std::string& f : formats) {
            ReportFormat fmt;
            std::string name;
            if (f == "text") {
                fmt = ReportFormat::Text;
                name = "coverage.txt";
            } else if (f == "dot") {
                fmt = ReportFormat::Dot;
                name = "coverage.dot";
            } else if (f == "html") {
                fmt = ReportFormat::Html;
                name = "coverage.html";
            } else if (f == "json") {
                fmt = ReportFormat::Json;
                name = "coverage.json";
            } else {
                err << "error: unknown format '" << f << "'\n";
                return kExitUsage;
            }
            emit_report(report, model, project, db, matrix, fmt,
                        (fs::path(out_dir) / name).string());
        }
        return kExitOk;
    } catch (const ParseError& e) {
        return report_error(err, e, kExitUsage);
    } catch (const ConsistencyError& e) {
        return report_error(err, e, kExitInconsistent);
    } catch (const fs::filesystem_error& e) {
        return report_error(err, e, kExitInconsistent);
    }
}

int cmd_estimate(const EstimateArgs& args, std::ostream& out, std::ostream& err) {
    try {
        double cost = args.cost_us >= 0 ? args.cost_us : kGridCostUs;
        if (args.table2) {
            OverheadTable table = reproduce_table2(cost);
            if (args.csv) {
                out << table_csv(table);
            } else {
                out << table_text(table);
                char line[160];
                std::snprintf(line, sizeof(line),
                              "per-call cost: %.4f us (grid-implied %.4f us; measured %.2f ms / "
                              "%d calls = %.4f us)\n",
                              cost, kGridCostUs, kMeasuredDeltaMs, kMeasuredCallsPerCycle,
                              calibrate(kMeasuredDeltaMs, kMeasuredCallsPerCycle));
                out << line;
            }
            return kExitOk;
        }
        if (args.calls < 0) {
            err << "error: give --calls or --table2\n";
            return kExitUsage;
        }
        double headroom = args.headroom >= 0 ? args.headroom : kDefaultHeadroom;
        OverheadEstimate e = estimate(args.calls, args.cycle_ms, cost, headroom);
        char line[200];
        std::snprintf(line, sizeof(line),
                      "%d calls x %.4f us = %.2f us per cycle = %.2f%% of a %.2f ms scan cycle "
                      "(%s the %.0f%% tracing budget)\n",
                      args.calls, cost, e.absolute_time_us, e.percent(), args.cycle_ms,
                      e.within_headroom ? "within" : "EXCEEDS", (1.0 - headroom) * 100.0);
        out << line;
        long long max_calls = max_trace_calls(args.cycle_ms, cost, 1.0 - headroom);
        out << "max trace calls within budget: " << max_calls << "\n";
        return kExitOk;
    } catch (const std::invalid_argument& e) {
        return report_error(err, e, kExitUsage);
    }
}

} // namespace plccov
