#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "plccov/ast.hpp"
#include "plccov/instrument.hpp"

namespace plccov {

struct Value {
    DataType type = DataType::Bool;
    bool b = false;
    int64_t i = 0; // Int / Dint / Time (ms)
    double r = 0.0;
    std::string s;

    static Value of_bool(bool v);
    static Value of_int(int64_t v);
    static Value of_dint(int64_t v);
    static Value of_real(double v);
    static Value of_time(int64_t ms);
    static Value of_string(std::string v);
    static Value from_const(const Const& c);
    static Value default_of(DataType t);

    // Exact equality; REALs compare bitwise so deterministic NaNs stay equal.
    bool equals(const Value& other) const;
    std::string str() const;
};

struct SaveOp {
    std::string filename;
    int progress = 0;
    int duration = 1; // cycles until the file is written, 1..10
    bool done = false;
    std::vector<bool> snapshot; // tpa copied at initiation
};

struct SfcChartState {
    std::string active_step;
    bool p1_pending = false;
};

struct PlcState {
    std::map<std::string, Value> globals;
    std::map<std::string, std::map<std::string, Value>> statics; // program/FB frames
    std::map<std::string, SfcChartState> sfc;
    std::map<std::string, Value> input_image;
    std::map<std::string, Value> output_image;
    std::vector<bool> tpa;
    std::optional<SaveOp> pending_save;
    int64_t cycle_counter = 0;
    std::set<uint32_t> stmt_log; // debug channel: executed statement uids
};

struct ScanConfig {
    std::vector<TaskDecl> tasks;
    int64_t base_tick = 10;          // gcd of task cycle times
    int64_t loop_guard = 1'000'000;  // iteration cap per loop statement
    bool debug_stmt_log = false;
};

// Derives base_tick from the project's task cycle times.
ScanConfig make_scan_config(const SourceProject& project, bool debug_stmt_log = false);

struct ImageVar {
    std::string name;
    DataType type = DataType::Bool;
    bool global = true;
    std::string pou; // owning program when not global
};

// Deterministic scan-cycle interpreter over a parsed (optionally instrumented)
// project. The tracing runtime intercepts calls to the record function by
// name; reset/save are harness-side operations on the state.
class Interpreter {
  public:
    Interpreter(const SourceProject& project, ScanConfig config, TraceNames names = {});

    PlcState init_state() const;

    // One base tick: latch inputs, execute due tasks (priority order), publish
    // outputs, advance a pending save. Returns the output image.
    std::map<std::string, Value> run_cycle(PlcState& state,
                                           const std::map<std::string, Value>& inputs) const;

    void tpr_op(PlcState& state, int id) const;
    void tp_reset_op(PlcState& state) const;
    void tp_save_op(PlcState& state, const std::string& filename) const;
    bool save_done(const PlcState& state) const;

    // One cycle of save progress without task execution. The asynchronous
    // writer keeps running even when a runtime fault has halted the tasks.
    void advance_save(PlcState& state) const;

    const std::vector<ImageVar>& image_inputs() const { return image_inputs_; }
    const std::vector<ImageVar>& image_outputs() const { return image_outputs_; }
    int max_tp() const { return max_tp_; }
    const ScanConfig& config() const { return config_; }
    const SourceProject& project() const { return project_; }

  private:
    friend class Execution;
    const SourceProject& project_;
    ScanConfig config_;
    TraceNames names_;
    int max_tp_ = -1; // from the trace-array declaration, -1 when absent
    std::vector<ImageVar> image_inputs_;
    std::vector<ImageVar> image_outputs_;
};

// Trace file format: one line of "id:true"/"id:false" pairs, ascending ids,
// separated by ", ".
std::string trace_line(const std::vector<std::pair<int, bool>>& pairs);
std::vector<std::pair<int, bool>> parse_trace_line(const std::string& text);

} // namespace plccov
