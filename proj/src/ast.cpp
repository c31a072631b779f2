#include "plccov/ast.hpp"

namespace plccov {

const char* data_type_name(DataType t) {
    switch (t) {
    case DataType::Bool: return "BOOL";
    case DataType::Int: return "INT";
    case DataType::Dint: return "DINT";
    case DataType::Real: return "REAL";
    case DataType::Time: return "TIME";
    case DataType::String: return "STRING";
    case DataType::BoolArray: return "ARRAY OF BOOL";
    }
    return "?";
}

const char* storage_name(Storage s) {
    switch (s) {
    case Storage::Input: return "Input";
    case Storage::Output: return "Output";
    case Storage::Local: return "Local";
    case Storage::Global: return "Global";
    }
    return "?";
}

const char* qualifier_name(ActionQualifier q) {
    switch (q) {
    case ActionQualifier::N: return "N";
    case ActionQualifier::P1: return "P1";
    case ActionQualifier::P0: return "P0";
    }
    return "?";
}

const char* pou_kind_name(PouKind k) {
    switch (k) {
    case PouKind::Program: return "PROGRAM";
    case PouKind::FunctionBlock: return "FUNCTION_BLOCK";
    case PouKind::Function: return "FUNCTION";
    }
    return "?";
}

const PouDecl* SourceProject::find_pou(const std::string& name) const {
    for (const auto& p : pous)
        if (p.name == name) return &p;
    return nullptr;
}

PouDecl* SourceProject::find_pou(const std::string& name) {
    for (auto& p : pous)
        if (p.name == name) return &p;
    return nullptr;
}

const VarDecl* SourceProject::find_global(const std::string& name) const {
    for (const auto& v : global_vars)
        if (v.name == name) return &v;
    return nullptr;
}

static bool const_equal(const Const& a, const Const& b) {
    if (a.type != b.type) return false;
    switch (a.type) {
    case DataType::Bool: return a.bval == b.bval;
    case DataType::Int:
    case DataType::Dint:
    case DataType::Time: return a.ival == b.ival;
    case DataType::Real: return a.rval == b.rval;
    case DataType::String: return a.sval == b.sval;
    case DataType::BoolArray: return false;
    }
    return false;
}

bool ast_equal(const Expr& a, const Expr& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
    case ExprKind::Const:
        return const_equal(a.value, b.value);
    case ExprKind::VarRef:
        return a.name == b.name;
    case ExprKind::Unary:
        return a.un == b.un && ast_equal(a.args[0], b.args[0]);
    case ExprKind::Binary:
        return a.bin == b.bin && ast_equal(a.args[0], b.args[0]) && ast_equal(a.args[1], b.args[1]);
    case ExprKind::Call: {
        if (a.name != b.name || a.args.size() != b.args.size() || a.arg_names != b.arg_names)
            return false;
        for (size_t i = 0; i < a.args.size(); ++i)
            if (!ast_equal(a.args[i], b.args[i])) return false;
        return true;
    }
    }
    return false;
}

bool ast_equal(const std::vector<Stmt>& a, const std::vector<Stmt>& b) {
    if (a.size() != b.size()) return false;
    for (size_t i = 0; i < a.size(); ++i)
        if (!ast_equal(a[i], b[i])) return false;
    return true;
}

bool ast_equal(const Stmt& a, const Stmt& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
    case StmtKind::Assign:
        return a.lhs == b.lhs && ast_equal(a.rhs, b.rhs);
    case StmtKind::If: {
        if (a.branches.size() != b.branches.size() || a.has_else != b.has_else) return false;
        for (size_t i = 0; i < a.branches.size(); ++i) {
            if (!ast_equal(a.branches[i].cond, b.branches[i].cond)) return false;
            if (!ast_equal(a.branches[i].body, b.branches[i].body)) return false;
        }
        return !a.has_else || ast_equal(a.else_body, b.else_body);
    }
    case StmtKind::Case: {
        if (!ast_equal(a.selector, b.selector)) return false;
        if (a.arms.size() != b.arms.size() || a.has_case_else != b.has_case_else) return false;
        for (size_t i = 0; i < a.arms.size(); ++i) {
            if (a.arms[i].labels != b.arms[i].labels) return false;
            if (!ast_equal(a.arms[i].body, b.arms[i].body)) return false;
        }
        return !a.has_case_else || ast_equal(a.case_else, b.case_else);
    }
    case StmtKind::For:
        return a.for_var == b.for_var && ast_equal(a.from, b.from) && ast_equal(a.to, b.to) &&
               a.has_by == b.has_by && (!a.has_by || ast_equal(a.by, b.by)) &&
               ast_equal(a.body, b.body);
    case StmtKind::While:
        return ast_equal(a.cond, b.cond) && ast_equal(a.body, b.body);
    case StmtKind::Repeat:
        return ast_equal(a.until_cond, b.until_cond) && ast_equal(a.body, b.body);
    case StmtKind::Call: {
        if (a.callee != b.callee || a.args.size() != b.args.size() || a.arg_names != b.arg_names)
            return false;
        for (size_t i = 0; i < a.args.size(); ++i)
            if (!ast_equal(a.args[i], b.args[i])) return false;
        if (a.outs.size() != b.outs.size()) return false;
        for (size_t i = 0; i < a.outs.size(); ++i)
            if (a.outs[i].param != b.outs[i].param || a.outs[i].target_var != b.outs[i].target_var)
                return false;
        return true;
    }
    case StmtKind::Return:
    case StmtKind::Exit:
        return true;
    }
    return false;
}

static bool chart_equal(const SfcChart& a, const SfcChart& b) {
    if (a.steps.size() != b.steps.size() || a.transitions.size() != b.transitions.size())
        return false;
    for (size_t i = 0; i < a.steps.size(); ++i) {
        const Step& x = a.steps[i];
        const Step& y = b.steps[i];
        if (x.name != y.name || x.is_initial != y.is_initial || x.actions.size() != y.actions.size())
            return false;
        for (size_t j = 0; j < x.actions.size(); ++j)
            if (x.actions[j].action != y.actions[j].action || x.actions[j].qual != y.actions[j].qual)
                return false;
    }
    for (size_t i = 0; i < a.transitions.size(); ++i) {
        const Transition& x = a.transitions[i];
        const Transition& y = b.transitions[i];
        if (x.from != y.from || x.to != y.to || !ast_equal(x.cond, y.cond)) return false;
    }
    return true;
}

bool ast_equal(const Body& a, const Body& b) {
    if (a.is_sfc != b.is_sfc) return false;
    return a.is_sfc ? chart_equal(a.chart, b.chart) : ast_equal(a.stmts, b.stmts);
}

bool ast_equal(const VarDecl& a, const VarDecl& b) {
    return a.name == b.name && a.type == b.type && a.storage == b.storage &&
           a.has_init == b.has_init && (!a.has_init || const_equal(a.init, b.init)) &&
           a.array_size == b.array_size;
}

bool ast_equal(const PouDecl& a, const PouDecl& b) {
    if (a.name != b.name || a.kind != b.kind || a.has_ret != b.has_ret) return false;
    if (a.has_ret && a.ret_type != b.ret_type) return false;
    if (a.vars.size() != b.vars.size()) return false;
    for (size_t i = 0; i < a.vars.size(); ++i)
        if (!ast_equal(a.vars[i], b.vars[i])) return false;
    if (!ast_equal(a.body, b.body)) return false;
    if (a.actions.size() != b.actions.size()) return false;
    for (size_t i = 0; i < a.actions.size(); ++i) {
        if (a.actions[i].name != b.actions[i].name) return false;
        if (!ast_equal(a.actions[i].body, b.actions[i].body)) return false;
    }
    return true;
}

bool ast_equal(const SourceProject& a, const SourceProject& b) {
    if (a.pous.size() != b.pous.size() || a.global_vars.size() != b.global_vars.size())
        return false;
    for (size_t i = 0; i < a.pous.size(); ++i)
        if (!ast_equal(a.pous[i], b.pous[i])) return false;
    for (size_t i = 0; i < a.global_vars.size(); ++i)
        if (!ast_equal(a.global_vars[i], b.global_vars[i])) return false;
    return true;
}

} // namespace plccov
