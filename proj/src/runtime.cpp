#include "plccov/runtime.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>

#include "plccov/errors.hpp"
#include "plccov/printer.hpp"

namespace plccov {

Value Value::of_bool(bool v) { return {DataType::Bool, v, 0, 0.0, {}}; }
Value Value::of_int(int64_t v) { return {DataType::Int, false, static_cast<int16_t>(v), 0.0, {}}; }
Value Value::of_dint(int64_t v) { return {DataType::Dint, false, static_cast<int32_t>(v), 0.0, {}}; }
Value Value::of_real(double v) { return {DataType::Real, false, 0, v, {}}; }
Value Value::of_time(int64_t ms) { return {DataType::Time, false, ms, 0.0, {}}; }
Value Value::of_string(std::string v) { return {DataType::String, false, 0, 0.0, std::move(v)}; }

Value Value::from_const(const Const& c) {
    switch (c.type) {
    case DataType::Bool: return of_bool(c.bval);
    case DataType::Int: return of_int(c.ival);
    case DataType::Dint: return of_dint(c.ival);
    case DataType::Real: return of_real(c.rval);
    case DataType::Time: return of_time(c.ival);
    case DataType::String: return of_string(c.sval);
    case DataType::BoolArray: break;
    }
    throw RuntimeFault("bad literal type");
}

Value Value::default_of(DataType t) {
    switch (t) {
    case DataType::Bool: return of_bool(false);
    case DataType::Int: return of_int(0);
    case DataType::Dint: return of_dint(0);
    case DataType::Real: return of_real(0.0);
    case DataType::Time: return of_time(0);
    case DataType::String: return of_string("");
    case DataType::BoolArray: break;
    }
    throw RuntimeFault("bad variable type");
}

bool Value::equals(const Value& other) const {
    if (type != other.type) return false;
    switch (type) {
    case DataType::Bool: return b == other.b;
    case DataType::Int:
    case DataType::Dint:
    case DataType::Time: return i == other.i;
    case DataType::Real: return std::memcmp(&r, &other.r, sizeof(double)) == 0;
    case DataType::String: return s == other.s;
    case DataType::BoolArray: return false;
    }
    return false;
}

std::string Value::str() const {
    Const c;
    c.type = type;
    c.bval = b;
    c.ival = i;
    c.rval = r;
    c.sval = s;
    return const_text(c);
}

ScanConfig make_scan_config(const SourceProject& project, bool debug_stmt_log) {
    ScanConfig cfg;
    cfg.tasks = project.tasks;
    cfg.debug_stmt_log = debug_stmt_log;
    int64_t g = 0;
    for (const TaskDecl& t : cfg.tasks) g = std::gcd(g, t.cycle_ms);
    cfg.base_tick = g > 0 ? g : 10;
    return cfg;
}

namespace {

[[noreturn]] void fault(const SourceLoc& loc, const std::string& msg) {
    throw RuntimeFault(loc.valid() ? loc.str() + ": " + msg : msg);
}

bool is_numeric(DataType t) {
    return t == DataType::Int || t == DataType::Dint || t == DataType::Real;
}

// Widening conversions allowed on assignment and parameter binding.
Value convert_for_assign(DataType target, const Value& v, const SourceLoc& loc) {
    if (v.type == target) return v;
    if (target == DataType::Dint && v.type == DataType::Int) return Value::of_dint(v.i);
    if (target == DataType::Real && (v.type == DataType::Int || v.type == DataType::Dint))
        return Value::of_real(static_cast<double>(v.i));
    fault(loc, std::string("cannot assign ") + data_type_name(v.type) + " to " +
                   data_type_name(target));
}

enum class Flow { Normal, Exit, Return };

} // namespace

// One task execution: owns variable addressing and statement evaluation.
class Execution {
  public:
    Execution(const Interpreter& interp, PlcState& state)
        : in_(interp), p_(interp.project_), st_(state) {}

    void run_program(const std::string& name) {
        const PouDecl* pou = p_.find_pou(name);
        if (!pou) fault({}, "task entry POU '" + name + "' not found");
        run_pou_cycle(*pou);
    }

  private:
    const Interpreter& in_;
    const SourceProject& p_;
    PlcState& st_;

    struct Frame {
        const PouDecl* pou;
        std::map<std::string, Value>* statics;   // programs/FBs
        std::map<std::string, Value> transients; // function frames
        bool is_function;
    };

    // ---- variable access ---------------------------------------------------

    Value* find_var(Frame& f, const std::string& name) {
        if (f.is_function) {
            auto it = f.transients.find(name);
            if (it != f.transients.end()) return &it->second;
        } else {
            auto it = f.statics->find(name);
            if (it != f.statics->end()) return &it->second;
        }
        auto git = st_.globals.find(name);
        if (git != st_.globals.end()) return &git->second;
        return nullptr;
    }

    Value read_var(Frame& f, const std::string& name, const SourceLoc& loc) {
        Value* v = find_var(f, name);
        if (!v) fault(loc, "unknown variable '" + name + "'");
        return *v;
    }

    void write_var(Frame& f, const std::string& name, const Value& val, const SourceLoc& loc) {
        Value* v = find_var(f, name);
        if (!v) fault(loc, "unknown variable '" + name + "'");
        *v = convert_for_assign(v->type, val, loc);
    }

    // ---- expressions ---------------------------------------------------------

    Value eval(Frame& f, const Expr& e) {
        switch (e.kind) {
        case ExprKind::Const:
            return Value::from_const(e.value);
        case ExprKind::VarRef:
            return read_var(f, e.name, e.loc);
        case ExprKind::Unary: {
            Value v = eval(f, e.args[0]);
            if (e.un == UnOp::Not) {
                if (v.type != DataType::Bool) fault(e.loc, "NOT requires BOOL");
                return Value::of_bool(!v.b);
            }
            switch (v.type) {
            case DataType::Int: return Value::of_int(-v.i);
            case DataType::Dint: return Value::of_dint(-v.i);
            case DataType::Real: return Value::of_real(-v.r);
            default: fault(e.loc, "unary '-' requires a numeric operand");
            }
        }
        case ExprKind::Binary:
            return eval_binary(f, e);
        case ExprKind::Call:
            return call_function(f, e.name, e.args, e.arg_names, e.loc);
        }
        fault(e.loc, "bad expression");
    }

    Value eval_binary(Frame& f, const Expr& e) {
        Value a = eval(f, e.args[0]);
        Value b = eval(f, e.args[1]);
        switch (e.bin) {
        case BinOp::And:
        case BinOp::Or:
        case BinOp::Xor: {
            if (a.type != DataType::Bool || b.type != DataType::Bool)
                fault(e.loc, "boolean operator requires BOOL operands");
            bool r = e.bin == BinOp::And ? (a.b && b.b)
                     : e.bin == BinOp::Or ? (a.b || b.b)
                                          : (a.b != b.b);
            return Value::of_bool(r);
        }
        case BinOp::Add:
        case BinOp::Sub:
        case BinOp::Mul:
        case BinOp::Div:
        case BinOp::Mod:
            return arith(a, b, e.bin, e.loc);
        case BinOp::Eq:
        case BinOp::Ne: {
            bool eq = compare_eq(a, b, e.loc);
            return Value::of_bool(e.bin == BinOp::Eq ? eq : !eq);
        }
        case BinOp::Lt:
        case BinOp::Gt:
        case BinOp::Le:
        case BinOp::Ge:
            return Value::of_bool(compare_order(a, b, e.bin, e.loc));
        }
        fault(e.loc, "bad operator");
    }

    Value arith(const Value& a, const Value& b, BinOp op, const SourceLoc& loc) {
        if (a.type == DataType::Time && b.type == DataType::Time) {
            if (op == BinOp::Add) return Value::of_time(a.i + b.i);
            if (op == BinOp::Sub) return Value::of_time(a.i - b.i);
            fault(loc, "TIME supports only + and -");
        }
        if (!is_numeric(a.type) || !is_numeric(b.type))
            fault(loc, std::string("arithmetic on ") + data_type_name(a.type) + " and " +
                           data_type_name(b.type));
        if (a.type == DataType::Real || b.type == DataType::Real) {
            double x = a.type == DataType::Real ? a.r : static_cast<double>(a.i);
            double y = b.type == DataType::Real ? b.r : static_cast<double>(b.i);
            switch (op) {
            case BinOp::Add: return Value::of_real(x + y);
            case BinOp::Sub: return Value::of_real(x - y);
            case BinOp::Mul: return Value::of_real(x * y);
            case BinOp::Div:
                if (y == 0.0) fault(loc, "division by zero");
                return Value::of_real(x / y);
            default: fault(loc, "MOD requires integer operands");
            }
        }
        bool dint = a.type == DataType::Dint || b.type == DataType::Dint;
        int64_t x = a.i;
        int64_t y = b.i;
        int64_t r = 0;
        switch (op) {
        case BinOp::Add: r = x + y; break;
        case BinOp::Sub: r = x - y; break;
        case BinOp::Mul: r = x * y; break;
        case BinOp::Div:
            if (y == 0) fault(loc, "division by zero");
            r = x / y;
            break;
        case BinOp::Mod:
            if (y == 0) fault(loc, "division by zero");
            r = x % y;
            break;
        default: break;
        }
        return dint ? Value::of_dint(r) : Value::of_int(r);
    }

    bool compare_eq(const Value& a, const Value& b, const SourceLoc& loc) {
        if (is_numeric(a.type) && is_numeric(b.type)) {
            if (a.type == DataType::Real || b.type == DataType::Real) {
                double x = a.type == DataType::Real ? a.r : static_cast<double>(a.i);
                double y = b.type == DataType::Real ? b.r : static_cast<double>(b.i);
                return x == y;
            }
            return a.i == b.i;
        }
        if (a.type != b.type) fault(loc, "comparison of incompatible types");
        switch (a.type) {
        case DataType::Bool: return a.b == b.b;
        case DataType::Time: return a.i == b.i;
        case DataType::String: return a.s == b.s;
        default: fault(loc, "bad comparison");
        }
    }

    bool compare_order(const Value& a, const Value& b, BinOp op, const SourceLoc& loc) {
        double x, y;
        if (is_numeric(a.type) && is_numeric(b.type)) {
            if (a.type == DataType::Real || b.type == DataType::Real) {
                x = a.type == DataType::Real ? a.r : static_cast<double>(a.i);
                y = b.type == DataType::Real ? b.r : static_cast<double>(b.i);
            } else {
                int64_t xi = a.i;
                int64_t yi = b.i;
                switch (op) {
                case BinOp::Lt: return xi < yi;
                case BinOp::Gt: return xi > yi;
                case BinOp::Le: return xi <= yi;
                default: return xi >= yi;
                }
            }
        } else if (a.type == DataType::Time && b.type == DataType::Time) {
            x = static_cast<double>(a.i);
            y = static_cast<double>(b.i);
        } else {
            fault(loc, "ordering comparison of incompatible types");
        }
        switch (op) {
        case BinOp::Lt: return x < y;
        case BinOp::Gt: return x > y;
        case BinOp::Le: return x <= y;
        default: return x >= y;
        }
    }

    // ---- calls ---------------------------------------------------------------

    void bind_inputs(Frame& caller, Frame& callee, const std::vector<Expr>& args,
                     const std::vector<std::string>& arg_names, const SourceLoc& loc) {
        std::vector<const VarDecl*> inputs;
        for (const VarDecl& v : callee.pou->vars)
            if (v.storage == Storage::Input) inputs.push_back(&v);
        size_t positional = 0;
        for (size_t i = 0; i < args.size(); ++i) {
            Value v = eval(caller, args[i]);
            const VarDecl* target = nullptr;
            if (arg_names[i].empty()) {
                if (positional >= inputs.size()) fault(loc, "too many arguments");
                target = inputs[positional++];
            } else {
                for (const VarDecl* in : inputs)
                    if (in->name == arg_names[i]) target = in;
                if (!target) fault(loc, "no input '" + arg_names[i] + "'");
            }
            Value conv = convert_for_assign(target->type, v, loc);
            if (callee.is_function) callee.transients[target->name] = conv;
            else (*callee.statics)[target->name] = conv;
        }
    }

    Value call_function(Frame& caller, const std::string& name, const std::vector<Expr>& args,
                        const std::vector<std::string>& arg_names, const SourceLoc& loc) {
        // Tracing record function: sets the trace array entry, returns TRUE.
        // Only intercepted when the project carries a trace array.
        if (name == in_.names_.record && in_.max_tp_ >= 0) {
            record_trace(caller, args, arg_names, loc);
            return Value::of_bool(true);
        }
        const PouDecl* pou = p_.find_pou(name);
        if (!pou || pou->kind != PouKind::Function) fault(loc, "call to unknown function " + name);
        Frame f;
        f.pou = pou;
        f.statics = nullptr;
        f.is_function = true;
        for (const VarDecl& v : pou->vars)
            f.transients[v.name] = v.has_init ? Value::from_const(v.init) : Value::default_of(v.type);
        f.transients[pou->name] = Value::default_of(pou->ret_type);
        bind_inputs(caller, f, args, arg_names, loc);
        exec_list(f, pou->body.stmts);
        return f.transients[pou->name];
    }

    void record_trace(Frame& caller, const std::vector<Expr>& args,
                      const std::vector<std::string>& arg_names, const SourceLoc& loc) {
        if (args.size() != 1) fault(loc, in_.names_.record + " takes exactly one argument");
        (void)arg_names;
        Value v = eval(caller, args[0]);
        if (v.type != DataType::Int && v.type != DataType::Dint)
            fault(loc, "trace point id must be an integer");
        if (v.i < 0 || v.i >= static_cast<int64_t>(st_.tpa.size()))
            fault(loc, "trace point id " + std::to_string(v.i) + " out of range 0.." +
                           std::to_string(static_cast<int64_t>(st_.tpa.size()) - 1));
        st_.tpa[static_cast<size_t>(v.i)] = true;
    }

    void call_stmt(Frame& caller, const Stmt& s) {
        if (s.callee == in_.names_.record && in_.max_tp_ >= 0) {
            record_trace(caller, s.args, s.arg_names, s.loc);
            return;
        }
        const PouDecl* pou = p_.find_pou(s.callee);
        if (!pou) fault(s.loc, "call to unknown POU " + s.callee);
        if (pou->kind == PouKind::Function) {
            Value ret = call_function(caller, s.callee, s.args, s.arg_names, s.loc);
            (void)ret;
            return;
        }
        // Function block: single implicit instance keyed by the POU name.
        // Generated reset/save declarations have empty bodies and are inert here.
        Frame f;
        f.pou = pou;
        f.statics = &st_.statics[pou->name];
        f.is_function = false;
        bind_inputs(caller, f, s.args, s.arg_names, s.loc);
        run_pou_body(f);
        for (const CallOut& o : s.outs) {
            auto it = f.statics->find(o.param);
            if (it == f.statics->end()) fault(s.loc, "no output '" + o.param + "'");
            write_var(caller, o.target_var, it->second, s.loc);
        }
    }

    // ---- statements ------------------------------------------------------------

    void log_stmt(const Stmt& s) {
        if (in_.config_.debug_stmt_log) st_.stmt_log.insert(s.uid);
    }

    Flow exec_list(Frame& f, const std::vector<Stmt>& stmts) {
        for (const Stmt& s : stmts) {
            Flow flow = exec_stmt(f, s);
            if (flow != Flow::Normal) return flow;
        }
        return Flow::Normal;
    }

    Flow exec_stmt(Frame& f, const Stmt& s) {
        log_stmt(s);
        switch (s.kind) {
        case StmtKind::Assign:
            write_var(f, s.lhs, eval(f, s.rhs), s.loc);
            return Flow::Normal;
        case StmtKind::Call:
            call_stmt(f, s);
            return Flow::Normal;
        case StmtKind::Return:
            return Flow::Return;
        case StmtKind::Exit:
            return Flow::Exit;
        case StmtKind::If: {
            for (const IfBranch& b : s.branches) {
                Value c = eval(f, b.cond);
                if (c.type != DataType::Bool) fault(s.loc, "IF condition must be BOOL");
                if (c.b) return exec_list(f, b.body);
            }
            if (s.has_else) return exec_list(f, s.else_body);
            return Flow::Normal;
        }
        case StmtKind::Case: {
            Value sel = eval(f, s.selector);
            if (sel.type != DataType::Int && sel.type != DataType::Dint)
                fault(s.loc, "CASE selector must be INT or DINT");
            for (const CaseArm& arm : s.arms)
                for (int64_t l : arm.labels)
                    if (l == sel.i) return exec_list(f, arm.body);
            if (s.has_case_else) return exec_list(f, s.case_else);
            return Flow::Normal; // fallthrough without ELSE is a no-op arm
        }
        case StmtKind::For: {
            Value from = eval(f, s.from);
            Value to = eval(f, s.to);
            Value by = s.has_by ? eval(f, s.by) : Value::of_int(1);
            if (!is_numeric(from.type) || from.type == DataType::Real || !is_numeric(to.type) ||
                to.type == DataType::Real || by.type == DataType::Real)
                fault(s.loc, "FOR bounds must be integers");
            if (by.i == 0) fault(s.loc, "FOR step of zero");
            Value* var = find_var(f, s.for_var);
            if (!var) fault(s.loc, "unknown loop variable " + s.for_var);
            *var = convert_for_assign(var->type, from, s.loc);
            int64_t guard = 0;
            while (by.i > 0 ? var->i <= to.i : var->i >= to.i) {
                if (++guard > in_.config_.loop_guard) fault(s.loc, "loop guard tripped");
                Flow flow = exec_list(f, s.body);
                if (flow == Flow::Exit) break;
                if (flow == Flow::Return) return Flow::Return;
                *var = convert_for_assign(var->type, arith(*var, by, BinOp::Add, s.loc), s.loc);
            }
            return Flow::Normal;
        }
        case StmtKind::While: {
            int64_t guard = 0;
            for (;;) {
                Value c = eval(f, s.cond);
                if (c.type != DataType::Bool) fault(s.loc, "WHILE condition must be BOOL");
                if (!c.b) break;
                if (++guard > in_.config_.loop_guard) fault(s.loc, "loop guard tripped");
                Flow flow = exec_list(f, s.body);
                if (flow == Flow::Exit) break;
                if (flow == Flow::Return) return Flow::Return;
            }
            return Flow::Normal;
        }
        case StmtKind::Repeat: {
            int64_t guard = 0;
            for (;;) {
                if (++guard > in_.config_.loop_guard) fault(s.loc, "loop guard tripped");
                Flow flow = exec_list(f, s.body);
                if (flow == Flow::Exit) break;
                if (flow == Flow::Return) return Flow::Return;
                Value c = eval(f, s.until_cond);
                if (c.type != DataType::Bool) fault(s.loc, "UNTIL condition must be BOOL");
                if (c.b) break;
            }
            return Flow::Normal;
        }
        }
        return Flow::Normal;
    }

    // ---- POU / SFC execution ------------------------------------------------------

    void run_pou_cycle(const PouDecl& pou) {
        Frame f;
        f.pou = &pou;
        f.statics = &st_.statics[pou.name];
        f.is_function = false;
        run_pou_body(f);
    }

    void run_pou_body(Frame& f) {
        if (!f.pou->body.is_sfc) {
            exec_list(f, f.pou->body.stmts);
            return;
        }
        run_chart(f);
    }

    const ActionDecl* find_action(const PouDecl& pou, const std::string& name) {
        for (const ActionDecl& a : pou.actions)
            if (a.name == name) return &a;
        return nullptr;
    }

    void run_step_actions(Frame& f, const Step& step, ActionQualifier qual) {
        for (const StepActionRef& ref : step.actions) {
            if (ref.qual != qual) continue;
            const ActionDecl* a = find_action(*f.pou, ref.action);
            if (!a) fault(ref.loc, "unknown action " + ref.action);
            exec_list(f, a->body);
        }
    }

    // One evolution: pending P1 actions, N actions, then the first true
    // transition fires (P0 actions of the leaving step, P1 armed on the target).
    void run_chart(Frame& f) {
        SfcChartState& cs = st_.sfc[f.pou->name];
        const SfcChart& chart = f.pou->body.chart;
        const Step* active = nullptr;
        for (const Step& s : chart.steps)
            if (s.name == cs.active_step) active = &s;
        if (!active) fault(f.pou->loc, "no active SFC step in " + f.pou->name);

        if (cs.p1_pending) {
            run_step_actions(f, *active, ActionQualifier::P1);
            cs.p1_pending = false;
        }
        run_step_actions(f, *active, ActionQualifier::N);

        for (const Transition& t : chart.transitions) {
            if (t.from != cs.active_step) continue;
            Value c = eval(f, t.cond);
            if (c.type != DataType::Bool) fault(t.loc, "transition condition must be BOOL");
            if (!c.b) continue;
            run_step_actions(f, *active, ActionQualifier::P0);
            cs.active_step = t.to;
            cs.p1_pending = true;
            break;
        }
    }
};

// ---- Interpreter ------------------------------------------------------------

Interpreter::Interpreter(const SourceProject& project, ScanConfig config, TraceNames names)
    : project_(project), config_(std::move(config)), names_(std::move(names)) {
    for (const VarDecl& g : project.global_vars) {
        if (g.type == DataType::BoolArray && g.name == names_.array) {
            max_tp_ = g.array_size - 1;
            continue;
        }
        if (g.storage == Storage::Input)
            image_inputs_.push_back({g.name, g.type, true, ""});
        else if (g.storage == Storage::Output)
            image_outputs_.push_back({g.name, g.type, true, ""});
    }
    for (const PouDecl& pou : project.pous) {
        if (pou.kind != PouKind::Program) continue;
        for (const VarDecl& v : pou.vars) {
            if (v.storage == Storage::Input)
                image_inputs_.push_back({v.name, v.type, false, pou.name});
            else if (v.storage == Storage::Output)
                image_outputs_.push_back({v.name, v.type, false, pou.name});
        }
    }
}

PlcState Interpreter::init_state() const {
    PlcState st;
    for (const VarDecl& g : project_.global_vars) {
        if (g.type == DataType::BoolArray) continue;
        st.globals[g.name] = g.has_init ? Value::from_const(g.init) : Value::default_of(g.type);
    }
    for (const PouDecl& pou : project_.pous) {
        if (pou.kind == PouKind::Function) continue;
        auto& frame = st.statics[pou.name];
        for (const VarDecl& v : pou.vars)
            frame[v.name] = v.has_init ? Value::from_const(v.init) : Value::default_of(v.type);
        if (pou.body.is_sfc) {
            for (const Step& s : pou.body.chart.steps)
                if (s.is_initial) st.sfc[pou.name] = {s.name, true};
        }
    }
    st.tpa.assign(static_cast<size_t>(max_tp_ + 1), false);
    for (const ImageVar& v : image_inputs_) {
        // The latch starts from the declared initial values.
        st.input_image[v.name] =
            v.global ? st.globals[v.name] : st.statics[v.pou][v.name];
    }
    return st;
}

std::map<std::string, Value> Interpreter::run_cycle(PlcState& state,
                                                    const std::map<std::string, Value>& inputs) const {
    // Latch the stimulus into the input image, then the image into storage.
    for (const auto& [name, val] : inputs) {
        const ImageVar* target = nullptr;
        for (const ImageVar& v : image_inputs_)
            if (v.name == name) target = &v;
        if (!target) throw RuntimeFault("'" + name + "' is not an input variable");
        state.input_image[name] = convert_for_assign(target->type, val, {});
    }
    for (const ImageVar& v : image_inputs_) {
        auto it = state.input_image.find(v.name);
        if (it == state.input_image.end()) continue;
        if (v.global) state.globals[v.name] = it->second;
        else state.statics[v.pou][v.name] = it->second;
    }

    // Tasks due this tick run to completion in priority order.
    std::vector<const TaskDecl*> due;
    int64_t now = state.cycle_counter * config_.base_tick;
    for (const TaskDecl& t : config_.tasks)
        if (now % t.cycle_ms == 0) due.push_back(&t);
    std::sort(due.begin(), due.end(),
              [](const TaskDecl* a, const TaskDecl* b) { return a->priority < b->priority; });
    for (const TaskDecl* t : due) {
        Execution exec(*this, state);
        exec.run_program(t->entry_pou);
    }

    state.output_image.clear();
    for (const ImageVar& v : image_outputs_)
        state.output_image[v.name] = v.global ? state.globals[v.name] : state.statics[v.pou][v.name];

    advance_save(state);

    ++state.cycle_counter;
    return state.output_image;
}

void Interpreter::advance_save(PlcState& state) const {
    if (!state.pending_save || state.pending_save->done) return;
    SaveOp& op = *state.pending_save;
    if (++op.progress >= op.duration) {
        std::vector<std::pair<int, bool>> pairs;
        pairs.reserve(op.snapshot.size());
        for (size_t i = 0; i < op.snapshot.size(); ++i)
            pairs.emplace_back(static_cast<int>(i), static_cast<bool>(op.snapshot[i]));
        std::ofstream f(op.filename, std::ios::binary);
        if (!f) throw RuntimeFault("cannot write trace file: " + op.filename);
        f << trace_line(pairs) << "\n";
        op.done = true;
    }
}

void Interpreter::tpr_op(PlcState& state, int id) const {
    if (id < 0 || id >= static_cast<int>(state.tpa.size()))
        throw RuntimeFault("trace point id " + std::to_string(id) + " out of range");
    state.tpa[static_cast<size_t>(id)] = true;
}

void Interpreter::tp_reset_op(PlcState& state) const {
    if (state.pending_save && !state.pending_save->done)
        throw RuntimeFault("tp_reset while a save is pending");
    state.tpa.assign(state.tpa.size(), false);
}

void Interpreter::tp_save_op(PlcState& state, const std::string& filename) const {
    if (state.pending_save && !state.pending_save->done)
        throw RuntimeFault("tp_save while another save is pending");
    SaveOp op;
    op.filename = filename;
    op.snapshot.assign(state.tpa.begin(), state.tpa.end());
    int points = static_cast<int>(state.tpa.size());
    op.duration = std::min(10, std::max(1, (points + 255) / 256));
    state.pending_save = std::move(op);
}

bool Interpreter::save_done(const PlcState& state) const {
    return !state.pending_save || state.pending_save->done;
}

// ---- trace file format --------------------------------------------------------

std::string trace_line(const std::vector<std::pair<int, bool>>& pairs) {
    std::string out;
    for (size_t i = 0; i < pairs.size(); ++i) {
        if (i) out += ", ";
        out += std::to_string(pairs[i].first);
        out += ':';
        out += pairs[i].second ? "true" : "false";
    }
    return out;
}

std::vector<std::pair<int, bool>> parse_trace_line(const std::string& text) {
    std::vector<std::pair<int, bool>> out;
    size_t pos = 0;
    // Tolerate a trailing newline from the file writer.
    std::string line = text;
    while (!line.empty() && (line.back() == '\n' || line.back() == '\r')) line.pop_back();
    if (line.empty()) return out;
    while (pos <= line.size()) {
        size_t colon = line.find(':', pos);
        if (colon == std::string::npos)
            throw ConsistencyError("malformed trace pair near offset " + std::to_string(pos));
        int id = 0;
        auto res = std::from_chars(line.data() + pos, line.data() + colon, id);
        if (res.ec != std::errc() || res.ptr != line.data() + colon)
            throw ConsistencyError("malformed trace id near offset " + std::to_string(pos));
        size_t end = line.find(", ", colon);
        std::string word = line.substr(colon + 1, end == std::string::npos ? std::string::npos
                                                                           : end - colon - 1);
        bool value;
        if (word == "true") value = true;
        else if (word == "false") value = false;
        else throw ConsistencyError("malformed trace value '" + word + "'");
        out.emplace_back(id, value);
        if (end == std::string::npos) break;
        pos = end + 2;
    }
    return out;
}

} // namespace plccov
