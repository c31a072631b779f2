#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "plccov/source_loc.hpp"

namespace plccov {

// BoolArray is the runtime-internal trace array type; the parser accepts it
// only inside VAR_GLOBAL blocks.
enum class DataType { Bool, Int, Dint, Real, Time, String, BoolArray };

enum class Storage { Input, Output, Local, Global };

const char* data_type_name(DataType t);
const char* storage_name(Storage s);

// Tagged literal constant. Time values are milliseconds.
struct Const {
    DataType type = DataType::Int;
    bool bval = false;
    int64_t ival = 0; // Int / Dint / Time
    double rval = 0.0;
    std::string sval;

    static Const of_bool(bool v) { return {DataType::Bool, v, 0, 0.0, {}}; }
    static Const of_int(int64_t v) { return {DataType::Int, false, v, 0.0, {}}; }
    static Const of_dint(int64_t v) { return {DataType::Dint, false, v, 0.0, {}}; }
    static Const of_real(double v) { return {DataType::Real, false, 0, v, {}}; }
    static Const of_time(int64_t ms) { return {DataType::Time, false, ms, 0.0, {}}; }
    static Const of_string(std::string v) { return {DataType::String, false, 0, 0.0, std::move(v)}; }
};

enum class UnOp { Neg, Not };
enum class BinOp { Add, Sub, Mul, Div, Mod, And, Or, Xor, Eq, Ne, Lt, Gt, Le, Ge };

enum class ExprKind { Const, VarRef, Unary, Binary, Call };

struct Expr {
    ExprKind kind = ExprKind::Const;
    Const value;                        // Const
    std::string name;                   // VarRef: variable; Call: function
    UnOp un = UnOp::Neg;                // Unary
    BinOp bin = BinOp::Add;             // Binary
    std::vector<Expr> args;             // Unary: [operand]; Binary: [lhs, rhs]; Call: arguments
    std::vector<std::string> arg_names; // Call only; "" = positional
    SourceLoc loc;
};

enum class StmtKind { Assign, If, Case, For, While, Repeat, Call, Return, Exit };

struct Stmt;

struct IfBranch {
    Expr cond;
    std::vector<Stmt> body;
};

struct CaseArm {
    std::vector<int64_t> labels;
    std::vector<Stmt> body;
};

// FB output binding in a call statement: param => target_var.
struct CallOut {
    std::string param;
    std::string target_var;
};

struct Stmt {
    StmtKind kind = StmtKind::Return;
    uint32_t uid = 0; // unique within a parsed project; preserved by copies
    SourceLoc loc;

    // Assign
    std::string lhs;
    Expr rhs;

    // If
    std::vector<IfBranch> branches;
    std::vector<Stmt> else_body;
    bool has_else = false;

    // Case
    Expr selector;
    std::vector<CaseArm> arms;
    std::vector<Stmt> case_else;
    bool has_case_else = false;

    // For / While / Repeat share `body`; While uses `cond`, Repeat uses `until_cond`
    std::string for_var;
    Expr from, to, by;
    bool has_by = false;
    std::vector<Stmt> body;
    Expr cond;
    Expr until_cond;

    // Call
    std::string callee;
    std::vector<Expr> args;
    std::vector<std::string> arg_names;
    std::vector<CallOut> outs;
};

enum class ActionQualifier { N, P1, P0 };

const char* qualifier_name(ActionQualifier q);

struct StepActionRef {
    std::string action;
    ActionQualifier qual = ActionQualifier::N;
    SourceLoc loc;
};

struct Step {
    std::string name;
    bool is_initial = false;
    std::vector<StepActionRef> actions;
    SourceLoc loc;
};

struct Transition {
    std::string from;
    std::string to;
    Expr cond;
    SourceLoc loc;
};

struct SfcChart {
    std::vector<Step> steps;
    std::vector<Transition> transitions;
};

struct Body {
    bool is_sfc = false;
    std::vector<Stmt> stmts; // ST form
    SfcChart chart;          // SFC form
};

struct ActionDecl {
    std::string name;
    std::vector<Stmt> body; // ST only
    SourceLoc loc;
};

struct VarDecl {
    std::string name;
    DataType type = DataType::Bool;
    Storage storage = Storage::Local;
    bool has_init = false;
    Const init;
    int array_size = 0; // BoolArray only: number of elements (MAXTP + 1)
    SourceLoc loc;
};

enum class PouKind { Program, FunctionBlock, Function };

const char* pou_kind_name(PouKind k);

struct PouDecl {
    std::string name;
    PouKind kind = PouKind::Program;
    bool has_ret = false;
    DataType ret_type = DataType::Bool; // Function only
    std::vector<VarDecl> vars;
    Body body;
    std::vector<ActionDecl> actions;
    SourceLoc loc;
};

struct TaskDecl {
    std::string name;
    int64_t cycle_ms = 0;
    int priority = 0;
    std::string entry_pou;
};

struct SourceProject {
    std::vector<PouDecl> pous;
    std::vector<TaskDecl> tasks;
    std::vector<VarDecl> global_vars;
    std::vector<std::pair<std::string, std::string>> files; // (path, text)

    const PouDecl* find_pou(const std::string& name) const;
    PouDecl* find_pou(const std::string& name);
    const VarDecl* find_global(const std::string& name) const;
};

// Structural equality, ignoring source locations and statement uids.
bool ast_equal(const Expr& a, const Expr& b);
bool ast_equal(const Stmt& a, const Stmt& b);
bool ast_equal(const std::vector<Stmt>& a, const std::vector<Stmt>& b);
bool ast_equal(const Body& a, const Body& b);
bool ast_equal(const VarDecl& a, const VarDecl& b);
bool ast_equal(const PouDecl& a, const PouDecl& b);
bool ast_equal(const SourceProject& a, const SourceProject& b);

} // namespace plccov
