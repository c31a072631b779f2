#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace plccov {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitTestFailures = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitInconsistent = 3;

// DOT dump of the dependency model; out_path "-" writes to `out`.
int cmd_graph(const std::string& manifest_path, const std::string& out_path, std::ostream& out,
              std::ostream& err);

// Instrumented sources + trace-point database + a manifest for the
// instrumented project under <out>/instrumented; prints a summary line.
int cmd_instrument(const std::string& manifest_path, const std::string& out_override,
                   std::ostream& out, std::ostream& err);

// Runs a suite against an instrumented project: per-test .trace files,
// report.txt and report.json in the run directory. Exit 1 when a test fails.
int cmd_run(const std::string& manifest_path, const std::string& db_path,
            const std::string& suite_path, const std::string& run_dir, std::ostream& out,
            std::ostream& err);

// Coverage over recorded traces: re-derives the model from the original
// manifest, checks the database fingerprint, emits the selected formats.
int cmd_cover(const std::string& manifest_path, const std::string& db_path,
              const std::string& trace_dir, const std::vector<std::string>& formats,
              const std::string& out_dir, std::ostream& out, std::ostream& err);

struct EstimateArgs {
    bool table2 = false;
    bool csv = false;
    int calls = -1;
    double cycle_ms = 10.0;
    double cost_us = -1.0; // < 0: use the grid constant
    double headroom = -1.0;
};

int cmd_estimate(const EstimateArgs& args, std::ostream& out, std::ostream& err);

} // namespace plccov
