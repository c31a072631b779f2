#include "plccov/testkit.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "plccov/errors.hpp"
#include "plccov/lexer.hpp"
#include "plccov/printer.hpp"
#include "plccov/xml.hpp"

namespace plccov {

namespace {

Const parse_value_text(const std::string& text, DataType type, const std::string& where) {
    std::vector<Token> toks = lex("<suite>", text);
    size_t i = 0;
    bool neg = false;
    if (toks[i].kind == Tok::Minus) {
        neg = true;
        ++i;
    }
    const Token& t = toks[i];
    auto bad = [&]() -> Const {
        throw ConsistencyError(where + ": cannot parse '" + text + "' as " +
                               data_type_name(type));
    };
    Const c;
    switch (type) {
    case DataType::Bool:
        if (neg || t.kind != Tok::Keyword || (t.text != "TRUE" && t.text != "FALSE")) return bad();
        c = Const::of_bool(t.text == "TRUE");
        break;
    case DataType::Int:
    case DataType::Dint:
        if (t.kind != Tok::IntLit) return bad();
        c = type == DataType::Int ? Const::of_int(neg ? -t.ival : t.ival)
                                  : Const::of_dint(neg ? -t.ival : t.ival);
        break;
    case DataType::Real:
        if (t.kind == Tok::RealLit) c = Const::of_real(neg ? -t.rval : t.rval);
        else if (t.kind == Tok::IntLit) c = Const::of_real(static_cast<double>(neg ? -t.ival : t.ival));
        else return bad();
        break;
    case DataType::Time:
        if (neg || t.kind != Tok::TimeLit) return bad();
        c = Const::of_time(t.ival);
        break;
    case DataType::String:
        if (neg || t.kind != Tok::StringLit) return bad();
        c = Const::of_string(t.text);
        break;
    case DataType::BoolArray:
        return bad();
    }
    if (toks[i + 1].kind != Tok::End) return bad();
    return c;
}

const ImageVar* find_image(const std::vector<ImageVar>& vars, const std::string& name) {
    const ImageVar* found = nullptr;
    for (const ImageVar& v : vars) {
        if (v.name != name) continue;
        if (found) throw ConsistencyError("ambiguous image variable '" + name + "'");
        found = &v;
    }
    return found;
}

std::map<std::string, Const> parse_sets(const XmlNode& parent, const Interpreter& interp,
                                        const std::string& where) {
    std::map<std::string, Const> out;
    for (const XmlNode& child : parent.children) {
        if (child.name != "set")
            throw ConsistencyError(where + ": unexpected element <" + child.name + ">");
        const std::string& var = child.need("var");
        const ImageVar* iv = find_image(interp.image_inputs(), var);
        if (!iv) throw ConsistencyError(where + ": unknown input variable '" + var + "'");
        out[var] = parse_value_text(child.need("value"), iv->type, where);
    }
    return out;
}

} // namespace

std::vector<TestCase> parse_suite(const std::string& text, const Interpreter& interp) {
    XmlNode root = xml_parse(text);
    if (root.name != "suite")
        throw ConsistencyError("not a test suite (root <" + root.name + ">)");
    std::vector<TestCase> suite;
    std::set<std::string> ids;
    for (const XmlNode& tnode : root.children) {
        if (tnode.name != "test")
            throw ConsistencyError("unexpected element <" + tnode.name + "> in suite");
        TestCase tc;
        tc.id = tnode.need("id");
        tc.name = tnode.attr_or("name", tc.id);
        if (!ids.insert(tc.id).second)
            throw ConsistencyError("duplicate test id '" + tc.id + "'");
        std::string where = "test " + tc.id;
        for (const XmlNode& snode : tnode.children) {
            TestStep step;
            if (snode.name == "set") {
                step.kind = TestStep::Kind::SetInputs;
                const std::string& var = snode.need("var");
                const ImageVar* iv = find_image(interp.image_inputs(), var);
                if (!iv)
                    throw ConsistencyError(where + ": unknown input variable '" + var + "'");
                step.values[var] = parse_value_text(snode.need("value"), iv->type, where);
            } else if (snode.name == "wait") {
                step.kind = TestStep::Kind::WaitCycles;
                step.cycles = std::stoi(snode.need("cycles"));
                if (step.cycles < 0) throw ConsistencyError(where + ": negative wait");
            } else if (snode.name == "expect") {
                step.kind = TestStep::Kind::ExpectOutputs;
                const std::string& var = snode.need("var");
                const ImageVar* iv = find_image(interp.image_outputs(), var);
                if (!iv)
                    throw ConsistencyError(where + ": unknown output variable '" + var + "'");
                step.values[var] = parse_value_text(snode.need("value"), iv->type, where);
            } else if (snode.name == "manual") {
                step.kind = TestStep::Kind::Manual;
                step.prompt = snode.need("prompt");
                std::string resp = snode.attr_or("response", "ok");
                if (resp == "ok") step.response = TestStep::ManualResponse::Ok;
                else if (resp == "fail") step.response = TestStep::ManualResponse::Fail;
                else throw ConsistencyError(where + ": bad manual response '" + resp + "'");
                step.manual_sets = parse_sets(snode, interp, where);
            } else {
                throw ConsistencyError(where + ": unexpected element <" + snode.name + ">");
            }
            tc.steps.push_back(std::move(step));
        }
        if (tc.steps.empty()) throw ConsistencyError(where + " has no steps");
        suite.push_back(std::move(tc));
    }
    return suite;
}

std::vector<TestCase> load_suite(const std::string& path, const Interpreter& interp) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ConsistencyError("cannot read test suite: " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_suite(ss.str(), interp);
}

std::string suite_text(const std::vector<TestCase>& suite) {
    std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<suite>\n";
    auto value_attr = [](const Const& c) { return xml_escape(const_text(c)); };
    for (const TestCase& tc : suite) {
        out += "    <test id=\"" + xml_escape(tc.id) + "\" name=\"" + xml_escape(tc.name) +
               "\">\n";
        for (const TestStep& s : tc.steps) {
            switch (s.kind) {
            case TestStep::Kind::SetInputs:
                for (const auto& [var, val] : s.values)
                    out += "        <set var=\"" + xml_escape(var) + "\" value=\"" +
                           value_attr(val) + "\"/>\n";
                break;
            case TestStep::Kind::WaitCycles:
                out += "        <wait cycles=\"" + std::to_string(s.cycles) + "\"/>\n";
                break;
            case TestStep::Kind::ExpectOutputs:
                for (const auto& [var, val] : s.values)
                    out += "        <expect var=\"" + xml_escape(var) + "\" value=\"" +
                           value_attr(val) + "\"/>\n";
                break;
            case TestStep::Kind::Manual: {
                out += "        <manual prompt=\"" + xml_escape(s.prompt) + "\" response=\"" +
                       (s.response == TestStep::ManualResponse::Ok ? "ok" : "fail") + "\"";
                if (s.manual_sets.empty()) {
                    out += "/>\n";
                } else {
                    out += ">\n";
                    for (const auto& [var, val] : s.manual_sets)
                        out += "            <set var=\"" + xml_escape(var) + "\" value=\"" +
                               value_attr(val) + "\"/>\n";
                    out += "        </manual>\n";
                }
                break;
            }
            }
        }
        out += "    </test>\n";
    }
    out += "</suite>\n";
    return out;
}

ExecutionTrace read_trace_file(const std::string& path, const std::string& test_id,
                               const TracePointDatabase& db) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ConsistencyError("cannot read trace file: " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    ExecutionTrace trace;
    trace.test_id = test_id;
    for (const auto& [id, value] : parse_trace_line(ss.str())) {
        if (id < 0 || id > db.max_tp)
            throw ConsistencyError(path + ": unknown trace point id " + std::to_string(id));
        if (!trace.visits.emplace(id, value).second)
            throw ConsistencyError(path + ": duplicate trace point id " + std::to_string(id));
    }
    if (static_cast<int>(trace.visits.size()) != db.point_count())
        throw ConsistencyError(path + ": trace covers " + std::to_string(trace.visits.size()) +
                               " of " + std::to_string(db.point_count()) + " trace points");
    return trace;
}

std::pair<TestVerdict, ExecutionTrace> run_test_case(const Interpreter& interp, PlcState& state,
                                                     const TestCase& test,
                                                     const TracePointDatabase& db,
                                                     const RunOptions& opts) {
    TestVerdict verdict;
    verdict.test_id = test.id;
    std::filesystem::create_directories(opts.run_dir);
    std::string trace_path = (std::filesystem::path(opts.run_dir) / (test.id + ".trace")).string();
    verdict.trace_file = trace_path;

    interp.tp_reset_op(state);
    std::map<std::string, Value> stimulus;
    bool faulted = false;

    for (size_t i = 0; i < test.steps.size() && verdict.outcome == TestVerdict::Outcome::Passed;
         ++i) {
        const TestStep& step = test.steps[i];
        try {
            switch (step.kind) {
            case TestStep::Kind::SetInputs:
                for (const auto& [var, val] : step.values) stimulus[var] = Value::from_const(val);
                break;
            case TestStep::Kind::WaitCycles:
                for (int c = 0; c < step.cycles; ++c) interp.run_cycle(state, stimulus);
                break;
            case TestStep::Kind::ExpectOutputs: {
                for (const auto& [var, val] : step.values) {
                    Value expected = Value::from_const(val);
                    auto it = state.output_image.find(var);
                    Value actual = it != state.output_image.end()
                                       ? it->second
                                       : Value::default_of(expected.type);
                    if (!expected.equals(actual)) {
                        verdict.outcome = TestVerdict::Outcome::Failed;
                        verdict.failed_step = static_cast<int>(i);
                        verdict.expected = var + " = " + expected.str();
                        verdict.actual = var + " = " + actual.str();
                        break;
                    }
                }
                break;
            }
            case TestStep::Kind::Manual: {
                std::string response =
                    step.response == TestStep::ManualResponse::Ok ? "ok" : "fail";
                if (opts.interactive && opts.prompt_in && opts.prompt_out) {
                    *opts.prompt_out << "[manual] " << step.prompt << " (ok/fail): "
                                     << std::flush;
                    std::string line;
                    std::getline(*opts.prompt_in, line);
                    response = line == "fail" ? "fail" : "ok";
                }
                verdict.manual_responses.push_back(response);
                if (response == "fail") {
                    verdict.outcome = TestVerdict::Outcome::Failed;
                    verdict.failed_step = static_cast<int>(i);
                    verdict.message = "manual step reported failure: " + step.prompt;
                } else {
                    for (const auto& [var, val] : step.manual_sets)
                        stimulus[var] = Value::from_const(val);
                }
                break;
            }
            }
        } catch (const RuntimeFault& e) {
            verdict.outcome = TestVerdict::Outcome::Error;
            verdict.failed_step = static_cast<int>(i);
            verdict.message = e.what();
            faulted = true;
        }
    }

    // Save the trace regardless of the verdict; the writer finishes within
    // ten cycles. A faulted PLC stops executing tasks but the save proceeds.
    interp.tp_save_op(state, trace_path);
    int wait = 0;
    while (!interp.save_done(state)) {
        if (++wait > 10) throw ConsistencyError("trace save exceeded 10 cycles");
        if (faulted) {
            interp.advance_save(state);
            continue;
        }
        try {
            interp.run_cycle(state, stimulus);
        } catch (const RuntimeFault& e) {
            faulted = true;
            if (verdict.outcome == TestVerdict::Outcome::Passed) {
                verdict.outcome = TestVerdict::Outcome::Error;
                verdict.message = e.what();
            }
            interp.advance_save(state);
        }
    }

    ExecutionTrace trace = read_trace_file(trace_path, test.id, db);
    return {std::move(verdict), std::move(trace)};
}

SuiteResult run_suite(const Interpreter& interp, const std::vector<TestCase>& suite,
                      const TracePointDatabase& db, const RunOptions& opts) {
    SuiteResult result;
    PlcState persistent;
    if (!opts.reinit_per_test) {
        persistent = interp.init_state();
        // Startup-only initialization happens before the first test is traced.
        interp.run_cycle(persistent, {});
    }
    for (const TestCase& test : suite) {
        if (opts.reinit_per_test) {
            PlcState state = interp.init_state();
            auto [verdict, trace] = run_test_case(interp, state, test, db, opts);
            result.verdicts.push_back(std::move(verdict));
            result.traces.push_back(std::move(trace));
        } else {
            auto [verdict, trace] = run_test_case(interp, persistent, test, db, opts);
            result.verdicts.push_back(std::move(verdict));
            result.traces.push_back(std::move(trace));
        }
    }
    return result;
}

std::string report_text(const SuiteResult& result) {
    std::string out;
    int passed = 0, failed = 0, errors = 0;
    for (const TestVerdict& v : result.verdicts) {
        switch (v.outcome) {
        case TestVerdict::Outcome::Passed:
            ++passed;
            out += "PASS  " + v.test_id + "\n";
            break;
        case TestVerdict::Outcome::Failed:
            ++failed;
            out += "FAIL  " + v.test_id + " at step " + std::to_string(v.failed_step);
            if (!v.expected.empty())
                out += ": expected " + v.expected + ", got " + v.actual;
            if (!v.message.empty()) out += ": " + v.message;
            out += "\n";
            break;
        case TestVerdict::Outcome::Error:
            ++errors;
            out += "ERROR " + v.test_id + ": " + v.message + "\n";
            break;
        }
    }
    out += std::to_string(result.verdicts.size()) + " tests: " + std::to_string(passed) +
           " passed, " + std::to_string(failed) + " failed, " + std::to_string(errors) +
           " errors\n";
    return out;
}

std::string report_json(const SuiteResult& result) {
    nlohmann::json j;
    j["tests"] = nlohmann::json::array();
    int passed = 0, failed = 0, errors = 0;
    for (const TestVerdict& v : result.verdicts) {
        nlohmann::json t;
        t["id"] = v.test_id;
        switch (v.outcome) {
        case TestVerdict::Outcome::Passed:
            t["outcome"] = "passed";
            ++passed;
            break;
        case TestVerdict::Outcome::Failed:
            t["outcome"] = "failed";
            ++failed;
            break;
        case TestVerdict::Outcome::Error:
            t["outcome"] = "error";
            ++errors;
            break;
        }
        if (v.failed_step >= 0) t["failed_step"] = v.failed_step;
        if (!v.expected.empty()) {
            t["expected"] = v.expected;
            t["actual"] = v.actual;
        }
        if (!v.message.empty()) t["message"] = v.message;
        if (!v.manual_responses.empty()) t["manual_responses"] = v.manual_responses;
        t["trace_file"] = std::filesystem::path(v.trace_file).filename().string();
        j["tests"].push_back(std::move(t));
    }
    j["passed"] = passed;
    j["failed"] = failed;
    j["errors"] = errors;
    return j.dump(2) + "\n";
}

} // namespace plccov
