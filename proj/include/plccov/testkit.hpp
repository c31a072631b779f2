#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "plccov/ast.hpp"
#include "plccov/instrument.hpp"
#include "plccov/runtime.hpp"

namespace plccov {

struct TestStep {
    enum class Kind { SetInputs, WaitCycles, ExpectOutputs, Manual };
    enum class ManualResponse { Ok, Fail };

    Kind kind = Kind::WaitCycles;
    std::map<std::string, Const> values; // SetInputs / ExpectOutputs
    int cycles = 0;                      // WaitCycles
    std::string prompt;                  // Manual
    ManualResponse response = ManualResponse::Ok;
    std::map<std::string, Const> manual_sets; // Manual: inputs applied on ok
};

struct TestCase {
    std::string id;
    std::string name;
    std::vector<TestStep> steps;
};

struct TestVerdict {
    enum class Outcome { Passed, Failed, Error };
    std::string test_id;
    Outcome outcome = Outcome::Passed;
    int failed_step = -1;
    std::string expected;
    std::string actual;
    std::string message;
    std::string trace_file;
    std::vector<std::string> manual_responses; // recorded for replay
};

struct ExecutionTrace {
    std::string test_id;
    std::map<int, bool> visits; // key set equals the database id set
};

struct RunOptions {
    std::string run_dir = ".";
    bool reinit_per_test = true; // false reproduces startup-only initialization
    bool interactive = false;    // prompt for manual steps instead of scripting
    std::istream* prompt_in = nullptr;
    std::ostream* prompt_out = nullptr;
};

struct SuiteResult {
    std::vector<TestVerdict> verdicts;
    std::vector<ExecutionTrace> traces;
};

// Suite XML: <suite><test id= name=><set var= value=/><wait cycles=/>
// <expect var= value=/><manual prompt= response=ok|fail><set .../></manual>
// </test></suite>. Values use source literal syntax; variables are validated
// against the project's I/O image.
std::vector<TestCase> parse_suite(const std::string& text, const Interpreter& interp);
std::vector<TestCase> load_suite(const std::string& path, const Interpreter& interp);
std::string suite_text(const std::vector<TestCase>& suite);

// One test: tp_reset, execute steps cycle-by-cycle, tp_save, wait for done,
// read the trace back. A failing expectation stops further steps but the
// trace is still saved; a runtime fault yields an Error verdict, trace saved.
std::pair<TestVerdict, ExecutionTrace> run_test_case(const Interpreter& interp, PlcState& state,
                                                     const TestCase& test,
                                                     const TracePointDatabase& db,
                                                     const RunOptions& opts);

// Whole suite in listed order, each test isolated (fresh state per test by
// default; with reinit_per_test=false state persists and only the trace array
// is reset, after a one-cycle startup warmup).
SuiteResult run_suite(const Interpreter& interp, const std::vector<TestCase>& suite,
                      const TracePointDatabase& db, const RunOptions& opts);

ExecutionTrace read_trace_file(const std::string& path, const std::string& test_id,
                               const TracePointDatabase& db);

std::string report_text(const SuiteResult& result);
std::string report_json(const SuiteResult& result);

} // namespace plccov
