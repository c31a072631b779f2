#include "plccov/printer.hpp"

#include <algorithm>
#include <charconv>
#include <map>

namespace plccov {

namespace {

std::string real_text(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    std::string s(buf, res.ptr);
    if (s.find('.') == std::string::npos && s.find('e') == std::string::npos &&
        s.find("inf") == std::string::npos && s.find("nan") == std::string::npos)
        s += ".0";
    return s;
}

int prec_of(const Expr& e) {
    switch (e.kind) {
    case ExprKind::Binary:
        switch (e.bin) {
        case BinOp::Or: return 1;
        case BinOp::Xor: return 2;
        case BinOp::And: return 3;
        case BinOp::Eq:
        case BinOp::Ne: return 4;
        case BinOp::Lt:
        case BinOp::Gt:
        case BinOp::Le:
        case BinOp::Ge: return 5;
        case BinOp::Add:
        case BinOp::Sub: return 6;
        case BinOp::Mul:
        case BinOp::Div:
        case BinOp::Mod: return 7;
        }
        return 0;
    case ExprKind::Unary:
        return 8;
    default:
        return 9;
    }
}

const char* bin_op_text(BinOp op) {
    switch (op) {
    case BinOp::Add: return "+";
    case BinOp::Sub: return "-";
    case BinOp::Mul: return "*";
    case BinOp::Div: return "/";
    case BinOp::Mod: return "MOD";
    case BinOp::And: return "AND";
    case BinOp::Or: return "OR";
    case BinOp::Xor: return "XOR";
    case BinOp::Eq: return "=";
    case BinOp::Ne: return "<>";
    case BinOp::Lt: return "<";
    case BinOp::Gt: return ">";
    case BinOp::Le: return "<=";
    case BinOp::Ge: return ">=";
    }
    return "?";
}

std::string child_text(const Expr& parent, const Expr& child, bool needs_paren) {
    std::string t = expr_text(child);
    (void)parent;
    return needs_paren ? "(" + t + ")" : std::move(t);
}

std::string indent_str(int n) { return std::string(static_cast<size_t>(n) * 4, ' '); }

void print_stmts(std::string& out, const std::vector<Stmt>& stmts, int indent);

std::string call_args_text(const std::vector<Expr>& args,
                           const std::vector<std::string>& arg_names,
                           const std::vector<CallOut>& outs) {
    std::string s;
    bool first = true;
    for (size_t i = 0; i < args.size(); ++i) {
        if (!first) s += ", ";
        first = false;
        if (!arg_names[i].empty()) s += arg_names[i] + " := ";
        s += expr_text(args[i]);
    }
    for (const CallOut& o : outs) {
        if (!first) s += ", ";
        first = false;
        s += o.param + " => " + o.target_var;
    }
    return s;
}

} // namespace

std::string const_text(const Const& c) {
    switch (c.type) {
    case DataType::Bool: return c.bval ? "TRUE" : "FALSE";
    case DataType::Int:
    case DataType::Dint: return std::to_string(c.ival);
    case DataType::Real: return real_text(c.rval);
    case DataType::Time: return "T#" + std::to_string(c.ival) + "ms";
    case DataType::String: return "'" + c.sval + "'";
    case DataType::BoolArray: return "";
    }
    return "";
}

std::string expr_text(const Expr& e) {
    switch (e.kind) {
    case ExprKind::Const:
        return const_text(e.value);
    case ExprKind::VarRef:
        return e.name;
    case ExprKind::Unary: {
        const Expr& operand = e.args[0];
        bool paren = prec_of(operand) < 8;
        std::string inner = child_text(e, operand, paren);
        if (e.un == UnOp::Not) return "NOT " + inner;
        // Avoid "--x".
        if (!paren && operand.kind == ExprKind::Unary && operand.un == UnOp::Neg)
            return "-(" + expr_text(operand) + ")";
        return "-" + inner;
    }
    case ExprKind::Binary: {
        int p = prec_of(e);
        const Expr& lhs = e.args[0];
        const Expr& rhs = e.args[1];
        std::string l = child_text(e, lhs, prec_of(lhs) < p);
        std::string r = child_text(e, rhs, prec_of(rhs) <= p); // left-associative
        return l + " " + bin_op_text(e.bin) + " " + r;
    }
    case ExprKind::Call: {
        std::string s = e.name + "(";
        for (size_t i = 0; i < e.args.size(); ++i) {
            if (i) s += ", ";
            if (!e.arg_names[i].empty()) s += e.arg_names[i] + " := ";
            s += expr_text(e.args[i]);
        }
        return s + ")";
    }
    }
    return "";
}

std::string stmt_text(const Stmt& s, int indent) {
    std::string out;
    const std::string ind = indent_str(indent);
    switch (s.kind) {
    case StmtKind::Assign:
        out = ind + s.lhs + " := " + expr_text(s.rhs) + ";\n";
        break;
    case StmtKind::Call:
        out = ind + s.callee + "(" + call_args_text(s.args, s.arg_names, s.outs) + ");\n";
        break;
    case StmtKind::Return:
        out = ind + "RETURN;\n";
        break;
    case StmtKind::Exit:
        out = ind + "EXIT;\n";
        break;
    case StmtKind::If: {
        for (size_t i = 0; i < s.branches.size(); ++i) {
            out += ind + (i == 0 ? "IF " : "ELSIF ") + expr_text(s.branches[i].cond) + " THEN\n";
            print_stmts(out, s.branches[i].body, indent + 1);
        }
        if (s.has_else) {
            out += ind + "ELSE\n";
            print_stmts(out, s.else_body, indent + 1);
        }
        out += ind + "END_IF;\n";
        break;
    }
    case StmtKind::Case: {
        out = ind + "CASE " + expr_text(s.selector) + " OF\n";
        for (const CaseArm& arm : s.arms) {
            std::string labels;
            for (size_t i = 0; i < arm.labels.size(); ++i) {
                if (i) labels += ", ";
                labels += std::to_string(arm.labels[i]);
            }
            out += indent_str(indent + 1) + labels + " :\n";
            print_stmts(out, arm.body, indent + 2);
        }
        if (s.has_case_else) {
            out += indent_str(indent + 1) + "ELSE\n";
            print_stmts(out, s.case_else, indent + 2);
        }
        out += ind + "END_CASE;\n";
        break;
    }
    case StmtKind::For: {
        out = ind + "FOR " + s.for_var + " := " + expr_text(s.from) + " TO " + expr_text(s.to);
        if (s.has_by) out += " BY " + expr_text(s.by);
        out += " DO\n";
        print_stmts(out, s.body, indent + 1);
        out += ind + "END_FOR;\n";
        break;
    }
    case StmtKind::While: {
        out = ind + "WHILE " + expr_text(s.cond) + " DO\n";
        print_stmts(out, s.body, indent + 1);
        out += ind + "END_WHILE;\n";
        break;
    }
    case StmtKind::Repeat: {
        out = ind + "REPEAT\n";
        print_stmts(out, s.body, indent + 1);
        out += ind + "UNTIL " + expr_text(s.until_cond) + " END_REPEAT;\n";
        break;
    }
    }
    return out;
}

namespace {

void print_stmts(std::string& out, const std::vector<Stmt>& stmts, int indent) {
    for (const Stmt& s : stmts) out += stmt_text(s, indent);
}

void print_var_group(std::string& out, const std::vector<VarDecl>& vars, Storage storage,
                     const char* block_kw) {
    bool any = false;
    for (const VarDecl& v : vars)
        if (v.storage == storage) any = true;
    if (!any) return;
    out += std::string(block_kw) + "\n";
    for (const VarDecl& v : vars) {
        if (v.storage != storage) continue;
        out += indent_str(1) + v.name + " : ";
        if (v.type == DataType::BoolArray) {
            out += "ARRAY[0.." + std::to_string(v.array_size - 1) + "] OF BOOL";
        } else {
            out += data_type_name(v.type);
            if (v.has_init) out += " := " + const_text(v.init);
        }
        out += ";\n";
    }
    out += "END_VAR\n";
}

} // namespace

std::string pou_text(const PouDecl& pou) {
    std::string out = std::string(pou_kind_name(pou.kind)) + " " + pou.name;
    if (pou.kind == PouKind::Function) out += " : " + std::string(data_type_name(pou.ret_type));
    out += "\n";
    print_var_group(out, pou.vars, Storage::Input, "VAR_INPUT");
    print_var_group(out, pou.vars, Storage::Output, "VAR_OUTPUT");
    print_var_group(out, pou.vars, Storage::Local, "VAR");
    if (pou.body.is_sfc) {
        for (const Step& st : pou.body.chart.steps) {
            out += "STEP " + st.name + (st.is_initial ? " INITIAL" : "") + "\n";
            for (const StepActionRef& ref : st.actions)
                out += indent_str(1) + "ACTION " + ref.action + " QUALIFIER " +
                       qualifier_name(ref.qual) + "\n";
            out += "END_STEP\n";
        }
        for (const Transition& t : pou.body.chart.transitions)
            out += "TRANSITION FROM " + t.from + " TO " + t.to + " WHEN " + expr_text(t.cond) +
                   " END_TRANSITION\n";
    } else {
        print_stmts(out, pou.body.stmts, 0);
    }
    for (const ActionDecl& a : pou.actions) {
        out += "ACTION " + a.name + "\n";
        print_stmts(out, a.body, 1);
        out += "END_ACTION\n";
    }
    switch (pou.kind) {
    case PouKind::Program: out += "END_PROGRAM\n"; break;
    case PouKind::FunctionBlock: out += "END_FUNCTION_BLOCK\n"; break;
    case PouKind::Function: out += "END_FUNCTION\n"; break;
    }
    return out;
}

std::vector<std::pair<std::string, std::string>> pretty_print(const SourceProject& project) {
    // Emit declarations grouped by their originating file, in declared order.
    struct Item {
        int line;
        int seq;
        std::string text;
    };
    std::map<std::string, std::vector<Item>> per_file;
    std::vector<std::string> file_order;
    for (const auto& [path, text] : project.files) {
        (void)text;
        if (!per_file.count(path)) {
            per_file[path];
            file_order.push_back(path);
        }
    }
    int seq = 0;
    auto add = [&](const std::string& file, int line, std::string text) {
        if (!per_file.count(file)) {
            per_file[file];
            file_order.push_back(file);
        }
        per_file[file].push_back({line, seq++, std::move(text)});
    };

    // Global variables print as one VAR_GLOBAL block per contiguous run.
    for (const VarDecl& g : project.global_vars) {
        std::string text = "VAR_GLOBAL\n";
        text += indent_str(1) + g.name;
        if (g.storage == Storage::Input) text += " AT %I";
        else if (g.storage == Storage::Output) text += " AT %Q";
        text += " : ";
        if (g.type == DataType::BoolArray) {
            text += "ARRAY[0.." + std::to_string(g.array_size - 1) + "] OF BOOL";
        } else {
            text += data_type_name(g.type);
            if (g.has_init) text += " := " + const_text(g.init);
        }
        text += ";\nEND_VAR\n";
        add(g.loc.file, g.loc.line, std::move(text));
    }
    for (const PouDecl& pou : project.pous) add(pou.loc.file, pou.loc.line, pou_text(pou));

    std::vector<std::pair<std::string, std::string>> out;
    for (const std::string& path : file_order) {
        auto& items = per_file[path];
        std::stable_sort(items.begin(), items.end(), [](const Item& a, const Item& b) {
            return a.line != b.line ? a.line < b.line : a.seq < b.seq;
        });
        std::string text;
        for (size_t i = 0; i < items.size(); ++i) {
            if (i) text += "\n";
            text += items[i].text;
        }
        out.emplace_back(path, std::move(text));
    }
    return out;
}

} // namespace plccov
