#include "plccov/parser.hpp"

#include <cctype>
#include <map>
#include <set>

#include "plccov/errors.hpp"
#include "plccov/lexer.hpp"

namespace plccov {

namespace {

class Parser {
  public:
    Parser(std::vector<Token> toks, uint32_t& uid_counter)
        : toks_(std::move(toks)), uid_(uid_counter) {}

    void parse_file(SourceProject& project) {
        while (!at_end()) {
            if (at_kw("PROGRAM")) {
                project.pous.push_back(parse_pou(PouKind::Program, "END_PROGRAM"));
            } else if (at_kw("FUNCTION_BLOCK")) {
                project.pous.push_back(parse_pou(PouKind::FunctionBlock, "END_FUNCTION_BLOCK"));
            } else if (at_kw("FUNCTION")) {
                project.pous.push_back(parse_pou(PouKind::Function, "END_FUNCTION"));
            } else if (at_kw("VAR_GLOBAL")) {
                parse_global_block(project);
            } else {
                throw ParseError(peek().loc, "expected POU or VAR_GLOBAL declaration");
            }
        }
    }

  private:
    std::vector<Token> toks_;
    size_t pos_ = 0;
    uint32_t& uid_;

    const Token& peek(size_t ahead = 0) const {
        size_t i = pos_ + ahead;
        return i < toks_.size() ? toks_[i] : toks_.back();
    }
    const Token& take() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
    bool at_end() const { return peek().kind == Tok::End; }
    bool at(Tok k) const { return peek().kind == k; }
    bool at_kw(const char* kw) const {
        return peek().kind == Tok::Keyword && peek().text == kw;
    }
    bool eat(Tok k) {
        if (!at(k)) return false;
        take();
        return true;
    }
    bool eat_kw(const char* kw) {
        if (!at_kw(kw)) return false;
        take();
        return true;
    }
    const Token& expect(Tok k, const char* what) {
        if (!at(k)) throw ParseError(peek().loc, std::string("expected ") + what);
        return take();
    }
    void expect_kw(const char* kw) {
        if (!at_kw(kw)) throw ParseError(peek().loc, std::string("expected ") + kw);
        take();
    }
    std::string expect_ident() {
        if (!at(Tok::Ident)) throw ParseError(peek().loc, "expected identifier");
        return take().text;
    }

    // ---- declarations ----------------------------------------------------

    PouDecl parse_pou(PouKind kind, const char* end_kw) {
        PouDecl pou;
        pou.kind = kind;
        pou.loc = peek().loc;
        take(); // POU keyword
        pou.name = expect_ident();
        if (kind == PouKind::Function) {
            expect(Tok::Colon, "':' and return type");
            pou.has_ret = true;
            pou.ret_type = parse_data_type();
        }
        while (at_kw("VAR") || at_kw("VAR_INPUT") || at_kw("VAR_OUTPUT"))
            parse_var_block(pou.vars);

        if (at_kw("STEP") || at_kw("TRANSITION")) {
            pou.body.is_sfc = true;
            while (at_kw("STEP") || at_kw("TRANSITION")) {
                if (at_kw("STEP"))
                    pou.body.chart.steps.push_back(parse_step());
                else
                    pou.body.chart.transitions.push_back(parse_transition());
            }
        } else {
            pou.body.stmts = parse_stmts_until({end_kw, "ACTION"});
        }
        while (at_kw("ACTION")) pou.actions.push_back(parse_action());
        expect_kw(end_kw);
        return pou;
    }

    void parse_global_block(SourceProject& project) {
        take(); // VAR_GLOBAL
        while (!at_kw("END_VAR")) parse_var_decl(project.global_vars, Storage::Global, true);
        take();
    }

    void parse_var_block(std::vector<VarDecl>& out) {
        Storage storage = Storage::Local;
        if (at_kw("VAR_INPUT")) storage = Storage::Input;
        else if (at_kw("VAR_OUTPUT")) storage = Storage::Output;
        take();
        while (!at_kw("END_VAR")) parse_var_decl(out, storage, false);
        take();
    }

    void parse_var_decl(std::vector<VarDecl>& out, Storage storage, bool global) {
        VarDecl v;
        v.loc = peek().loc;
        v.storage = storage;
        v.name = expect_ident();
        // Hardware image binding for globals: `name AT %I : BOOL;` / `AT %Q`.
        if (at_kw("AT")) {
            if (!global) throw ParseError(peek().loc, "AT binding is only allowed in VAR_GLOBAL");
            take();
            expect(Tok::Percent, "'%'");
            std::string addr = expect_ident();
            char c = static_cast<char>(std::toupper(static_cast<unsigned char>(addr[0])));
            if (c == 'I') v.storage = Storage::Input;
            else if (c == 'Q') v.storage = Storage::Output;
            else throw ParseError(v.loc, "address must start with %I or %Q");
        }
        expect(Tok::Colon, "':'");
        if (at_kw("ARRAY")) {
            if (!global)
                throw ParseError(peek().loc, "ARRAY type is only allowed in VAR_GLOBAL");
            take();
            expect(Tok::LBracket, "'['");
            const Token& lo = expect(Tok::IntLit, "array lower bound");
            if (lo.ival != 0) throw ParseError(lo.loc, "array lower bound must be 0");
            expect(Tok::DotDot, "'..'");
            const Token& hi = expect(Tok::IntLit, "array upper bound");
            expect(Tok::RBracket, "']'");
            expect_kw("OF");
            expect_kw("BOOL");
            v.type = DataType::BoolArray;
            v.array_size = static_cast<int>(hi.ival) + 1;
        } else {
            v.type = parse_data_type();
            if (eat(Tok::Assign)) {
                v.has_init = true;
                v.init = parse_const_literal(v.type);
            }
        }
        expect(Tok::Semi, "';'");
        out.push_back(std::move(v));
    }

    DataType parse_data_type() {
        if (!at(Tok::Keyword)) throw ParseError(peek().loc, "expected data type");
        const std::string& t = peek().text;
        DataType dt;
        if (t == "BOOL") dt = DataType::Bool;
        else if (t == "INT") dt = DataType::Int;
        else if (t == "DINT") dt = DataType::Dint;
        else if (t == "REAL") dt = DataType::Real;
        else if (t == "TIME") dt = DataType::Time;
        else if (t == "STRING") dt = DataType::String;
        else throw ParseError(peek().loc, "expected data type, got " + t);
        take();
        return dt;
    }

    Const parse_const_literal(DataType expected) {
        bool neg = eat(Tok::Minus);
        const Token& t = peek();
        Const c;
        switch (t.kind) {
        case Tok::IntLit:
            c = expected == DataType::Dint ? Const::of_dint(t.ival) : Const::of_int(t.ival);
            if (neg) c.ival = -c.ival;
            break;
        case Tok::RealLit:
            c = Const::of_real(neg ? -t.rval : t.rval);
            break;
        case Tok::TimeLit:
            if (neg) throw ParseError(t.loc, "negative TIME literal");
            c = Const::of_time(t.ival);
            break;
        case Tok::StringLit:
            if (neg) throw ParseError(t.loc, "negative string literal");
            c = Const::of_string(t.text);
            break;
        case Tok::Keyword:
            if (t.text == "TRUE") c = Const::of_bool(true);
            else if (t.text == "FALSE") c = Const::of_bool(false);
            else throw ParseError(t.loc, "expected literal initializer");
            if (neg) throw ParseError(t.loc, "negative BOOL literal");
            break;
        default:
            throw ParseError(t.loc, "expected literal initializer");
        }
        take();
        return c;
    }

    ActionDecl parse_action() {
        ActionDecl a;
        a.loc = peek().loc;
        take(); // ACTION
        a.name = expect_ident();
        a.body = parse_stmts_until({"END_ACTION"});
        expect_kw("END_ACTION");
        return a;
    }

    Step parse_step() {
        Step s;
        s.loc = peek().loc;
        take(); // STEP
        s.name = expect_ident();
        if (eat_kw("INITIAL")) s.is_initial = true;
        while (at_kw("ACTION")) {
            StepActionRef ref;
            ref.loc = peek().loc;
            take();
            ref.action = expect_ident();
            expect_kw("QUALIFIER");
            if (eat_kw("INITIAL")) throw ParseError(peek().loc, "bad qualifier");
            if (!at(Tok::Ident) && !at(Tok::Keyword))
                throw ParseError(peek().loc, "expected qualifier N, P1 or P0");
            std::string q = take().text;
            if (q == "N") ref.qual = ActionQualifier::N;
            else if (q == "P1") ref.qual = ActionQualifier::P1;
            else if (q == "P0") ref.qual = ActionQualifier::P0;
            else throw ParseError(ref.loc, "unsupported qualifier '" + q + "'");
            s.actions.push_back(std::move(ref));
        }
        expect_kw("END_STEP");
        return s;
    }

    Transition parse_transition() {
        Transition t;
        t.loc = peek().loc;
        take(); // TRANSITION
        expect_kw("FROM");
        t.from = expect_ident();
        expect_kw("TO");
        t.to = expect_ident();
        expect_kw("WHEN");
        t.cond = parse_expr();
        expect_kw("END_TRANSITION");
        return t;
    }

    // ---- statements ------------------------------------------------------

    bool at_any_kw(const std::vector<const char*>& kws) const {
        for (const char* k : kws)
            if (at_kw(k)) return true;
        return false;
    }

    std::vector<Stmt> parse_stmts_until(const std::vector<const char*>& terminators) {
        std::vector<Stmt> out;
        while (!at_any_kw(terminators)) {
            if (at_end()) throw ParseError(peek().loc, "unexpected end of file");
            out.push_back(parse_stmt());
        }
        return out;
    }

    Stmt make_stmt(StmtKind kind) {
        Stmt s;
        s.kind = kind;
        s.uid = ++uid_;
        s.loc = peek().loc;
        return s;
    }

    Stmt parse_stmt() {
        if (at_kw("IF")) return parse_if();
        if (at_kw("CASE")) return parse_case();
        if (at_kw("FOR")) return parse_for();
        if (at_kw("WHILE")) return parse_while();
        if (at_kw("REPEAT")) return parse_repeat();
        if (at_kw("RETURN")) {
            Stmt s = make_stmt(StmtKind::Return);
            take();
            expect(Tok::Semi, "';'");
            return s;
        }
        if (at_kw("EXIT")) {
            Stmt s = make_stmt(StmtKind::Exit);
            take();
            expect(Tok::Semi, "';'");
            return s;
        }
        if (at(Tok::Ident)) {
            if (peek(1).kind == Tok::Assign) return parse_assign();
            if (peek(1).kind == Tok::LParen) return parse_call_stmt();
            throw ParseError(peek(1).loc, "expected ':=' or '(' after identifier");
        }
        throw ParseError(peek().loc, "expected statement");
    }

    Stmt parse_assign() {
        Stmt s = make_stmt(StmtKind::Assign);
        s.lhs = take().text;
        take(); // :=
        s.rhs = parse_expr();
        expect(Tok::Semi, "';'");
        return s;
    }

    Stmt parse_call_stmt() {
        Stmt s = make_stmt(StmtKind::Call);
        s.callee = take().text;
        take(); // (
        if (!at(Tok::RParen)) {
            do {
                if (at(Tok::Ident) && peek(1).kind == Tok::Assign) {
                    s.arg_names.push_back(take().text);
                    take(); // :=
                    s.args.push_back(parse_expr());
                } else if (at(Tok::Ident) && peek(1).kind == Tok::OutArrow) {
                    CallOut o;
                    o.param = take().text;
                    take(); // =>
                    o.target_var = expect_ident();
                    s.outs.push_back(std::move(o));
                } else {
                    s.arg_names.emplace_back();
                    s.args.push_back(parse_expr());
                }
            } while (eat(Tok::Comma));
        }
        expect(Tok::RParen, "')'");
        expect(Tok::Semi, "';'");
        return s;
    }

    Stmt parse_if() {
        Stmt s = make_stmt(StmtKind::If);
        take(); // IF
        IfBranch first;
        first.cond = parse_expr();
        expect_kw("THEN");
        first.body = parse_stmts_until({"ELSIF", "ELSE", "END_IF"});
        s.branches.push_back(std::move(first));
        while (at_kw("ELSIF")) {
            take();
            IfBranch br;
            br.cond = parse_expr();
            expect_kw("THEN");
            br.body = parse_stmts_until({"ELSIF", "ELSE", "END_IF"});
            s.branches.push_back(std::move(br));
        }
        if (eat_kw("ELSE")) {
            s.has_else = true;
            s.else_body = parse_stmts_until({"END_IF"});
        }
        expect_kw("END_IF");
        eat(Tok::Semi);
        return s;
    }

    Stmt parse_case() {
        Stmt s = make_stmt(StmtKind::Case);
        take(); // CASE
        s.selector = parse_expr();
        expect_kw("OF");
        while (!at_kw("ELSE") && !at_kw("END_CASE")) {
            CaseArm arm;
            do {
                bool neg = eat(Tok::Minus);
                const Token& lab = expect(Tok::IntLit, "case label");
                arm.labels.push_back(neg ? -lab.ival : lab.ival);
            } while (eat(Tok::Comma));
            expect(Tok::Colon, "':'");
            // The arm body ends at ELSE, END_CASE or the next arm's label list.
            while (!at_kw("ELSE") && !at_kw("END_CASE") && !at(Tok::IntLit) && !at(Tok::Minus)) {
                if (at_end()) throw ParseError(peek().loc, "unexpected end of file in CASE");
                arm.body.push_back(parse_stmt());
            }
            s.arms.push_back(std::move(arm));
        }
        if (eat_kw("ELSE")) {
            s.has_case_else = true;
            s.case_else = parse_stmts_until({"END_CASE"});
        }
        expect_kw("END_CASE");
        eat(Tok::Semi);
        return s;
    }

    Stmt parse_for() {
        Stmt s = make_stmt(StmtKind::For);
        take(); // FOR
        s.for_var = expect_ident();
        expect(Tok::Assign, "':='");
        s.from = parse_expr();
        expect_kw("TO");
        s.to = parse_expr();
        if (eat_kw("BY")) {
            s.has_by = true;
            s.by = parse_expr();
        }
        expect_kw("DO");
        s.body = parse_stmts_until({"END_FOR"});
        take();
        eat(Tok::Semi);
        return s;
    }

    Stmt parse_while() {
        Stmt s = make_stmt(StmtKind::While);
        take(); // WHILE
        s.cond = parse_expr();
        expect_kw("DO");
        s.body = parse_stmts_until({"END_WHILE"});
        take();
        eat(Tok::Semi);
        return s;
    }

    Stmt parse_repeat() {
        Stmt s = make_stmt(StmtKind::Repeat);
        take(); // REPEAT
        s.body = parse_stmts_until({"UNTIL"});
        take(); // UNTIL
        s.until_cond = parse_expr();
        expect_kw("END_REPEAT");
        eat(Tok::Semi);
        return s;
    }

    // ---- expressions -----------------------------------------------------
    // Precedence (loosest first): OR, XOR, AND, = <>, < > <= >=, + -, * / MOD,
    // unary NOT/-, primary.

    Expr parse_expr() { return parse_or(); }

    Expr binary(BinOp op, Expr lhs, Expr rhs) {
        Expr e;
        e.kind = ExprKind::Binary;
        e.bin = op;
        e.loc = lhs.loc;
        e.args.push_back(std::move(lhs));
        e.args.push_back(std::move(rhs));
        return e;
    }

    Expr parse_or() {
        Expr e = parse_xor();
        while (at_kw("OR")) {
            take();
            e = binary(BinOp::Or, std::move(e), parse_xor());
        }
        return e;
    }

    Expr parse_xor() {
        Expr e = parse_and();
        while (at_kw("XOR")) {
            take();
            e = binary(BinOp::Xor, std::move(e), parse_and());
        }
        return e;
    }

    Expr parse_and() {
        Expr e = parse_equality();
        while (at_kw("AND")) {
            take();
            e = binary(BinOp::And, std::move(e), parse_equality());
        }
        return e;
    }

    Expr parse_equality() {
        Expr e = parse_relational();
        for (;;) {
            if (at(Tok::Eq)) {
                take();
                e = binary(BinOp::Eq, std::move(e), parse_relational());
            } else if (at(Tok::Ne)) {
                take();
                e = binary(BinOp::Ne, std::move(e), parse_relational());
            } else {
                return e;
            }
        }
    }

    Expr parse_relational() {
        Expr e = parse_additive();
        for (;;) {
            BinOp op;
            if (at(Tok::Lt)) op = BinOp::Lt;
            else if (at(Tok::Gt)) op = BinOp::Gt;
            else if (at(Tok::Le)) op = BinOp::Le;
            else if (at(Tok::Ge)) op = BinOp::Ge;
            else return e;
            take();
            e = binary(op, std::move(e), parse_additive());
        }
    }

    Expr parse_additive() {
        Expr e = parse_multiplicative();
        for (;;) {
            if (at(Tok::Plus)) {
                take();
                e = binary(BinOp::Add, std::move(e), parse_multiplicative());
            } else if (at(Tok::Minus)) {
                take();
                e = binary(BinOp::Sub, std::move(e), parse_multiplicative());
            } else {
                return e;
            }
        }
    }

    Expr parse_multiplicative() {
        Expr e = parse_unary();
        for (;;) {
            BinOp op;
            if (at(Tok::Star)) op = BinOp::Mul;
            else if (at(Tok::Slash)) op = BinOp::Div;
            else if (at_kw("MOD")) op = BinOp::Mod;
            else return e;
            take();
            e = binary(op, std::move(e), parse_unary());
        }
    }

    Expr parse_unary() {
        if (at(Tok::Minus)) {
            Expr e;
            e.kind = ExprKind::Unary;
            e.un = UnOp::Neg;
            e.loc = take().loc;
            e.args.push_back(parse_unary());
            return e;
        }
        if (at_kw("NOT")) {
            Expr e;
            e.kind = ExprKind::Unary;
            e.un = UnOp::Not;
            e.loc = take().loc;
            e.args.push_back(parse_unary());
            return e;
        }
        return parse_primary();
    }

    Expr parse_primary() {
        const Token& t = peek();
        Expr e;
        e.loc = t.loc;
        switch (t.kind) {
        case Tok::IntLit:
            e.kind = ExprKind::Const;
            e.value = Const::of_int(t.ival);
            take();
            return e;
        case Tok::RealLit:
            e.kind = ExprKind::Const;
            e.value = Const::of_real(t.rval);
            take();
            return e;
        case Tok::TimeLit:
            e.kind = ExprKind::Const;
            e.value = Const::of_time(t.ival);
            take();
            return e;
        case Tok::StringLit:
            e.kind = ExprKind::Const;
            e.value = Const::of_string(t.text);
            take();
            return e;
        case Tok::Keyword:
            if (t.text == "TRUE" || t.text == "FALSE") {
                e.kind = ExprKind::Const;
                e.value = Const::of_bool(t.text == "TRUE");
                take();
                return e;
            }
            throw ParseError(t.loc, "unexpected keyword in expression: " + t.text);
        case Tok::LParen: {
            take();
            Expr inner = parse_expr();
            expect(Tok::RParen, "')'");
            return inner;
        }
        case Tok::Ident: {
            std::string name = take().text;
            if (at(Tok::LParen)) {
                take();
                e.kind = ExprKind::Call;
                e.name = std::move(name);
                if (!at(Tok::RParen)) {
                    do {
                        if (at(Tok::Ident) && peek(1).kind == Tok::Assign) {
                            e.arg_names.push_back(take().text);
                            take();
                        } else {
                            e.arg_names.emplace_back();
                        }
                        e.args.push_back(parse_expr());
                    } while (eat(Tok::Comma));
                }
                expect(Tok::RParen, "')'");
                return e;
            }
            e.kind = ExprKind::VarRef;
            e.name = std::move(name);
            return e;
        }
        default:
            throw ParseError(t.loc, "expected expression");
        }
    }
};

} // namespace

// ---- call-target collection ------------------------------------------------

void collect_call_targets(const Expr& e, std::vector<std::string>& out) {
    if (e.kind == ExprKind::Call) out.push_back(e.name);
    for (const Expr& a : e.args) collect_call_targets(a, out);
}

void collect_call_targets(const std::vector<Stmt>& stmts, std::vector<std::string>& out) {
    for (const Stmt& s : stmts) {
        switch (s.kind) {
        case StmtKind::Assign:
            collect_call_targets(s.rhs, out);
            break;
        case StmtKind::If:
            for (const IfBranch& b : s.branches) {
                collect_call_targets(b.cond, out);
                collect_call_targets(b.body, out);
            }
            collect_call_targets(s.else_body, out);
            break;
        case StmtKind::Case:
            collect_call_targets(s.selector, out);
            for (const CaseArm& a : s.arms) collect_call_targets(a.body, out);
            collect_call_targets(s.case_else, out);
            break;
        case StmtKind::For:
            collect_call_targets(s.from, out);
            collect_call_targets(s.to, out);
            if (s.has_by) collect_call_targets(s.by, out);
            collect_call_targets(s.body, out);
            break;
        case StmtKind::While:
            collect_call_targets(s.cond, out);
            collect_call_targets(s.body, out);
            break;
        case StmtKind::Repeat:
            collect_call_targets(s.body, out);
            collect_call_targets(s.until_cond, out);
            break;
        case StmtKind::Call:
            out.push_back(s.callee);
            for (const Expr& a : s.args) collect_call_targets(a, out);
            break;
        case StmtKind::Return:
        case StmtKind::Exit:
            break;
        }
    }
}

std::vector<std::string> pou_call_targets(const PouDecl& pou) {
    std::vector<std::string> out;
    if (pou.body.is_sfc) {
        for (const Transition& t : pou.body.chart.transitions) collect_call_targets(t.cond, out);
    } else {
        collect_call_targets(pou.body.stmts, out);
    }
    for (const ActionDecl& a : pou.actions) collect_call_targets(a.body, out);
    return out;
}

// ---- resolver ---------------------------------------------------------------

namespace {

class Resolver {
  public:
    explicit Resolver(SourceProject& project) : p_(project) {}

    void run() {
        check_duplicates();
        check_tasks();
        for (const PouDecl& pou : p_.pous) check_pou(pou);
        check_recursion();
    }

  private:
    SourceProject& p_;

    void check_duplicates() {
        std::set<std::string> names;
        for (const PouDecl& pou : p_.pous)
            if (!names.insert(pou.name).second)
                throw ParseError(pou.loc, "duplicate POU declaration '" + pou.name + "'");
        std::set<std::string> globals;
        for (const VarDecl& g : p_.global_vars)
            if (!globals.insert(g.name).second)
                throw ParseError(g.loc, "duplicate global variable '" + g.name + "'");
    }

    void check_tasks() {
        std::set<std::string> names;
        std::set<int> prios;
        for (const TaskDecl& t : p_.tasks) {
            if (!names.insert(t.name).second)
                throw ParseError({}, "duplicate task '" + t.name + "'");
            if (t.cycle_ms <= 0)
                throw ParseError({}, "task '" + t.name + "' has non-positive cycle time");
            if (!prios.insert(t.priority).second)
                throw ParseError({}, "task priorities are not unique");
            const PouDecl* entry = p_.find_pou(t.entry_pou);
            if (!entry)
                throw ParseError({}, "task '" + t.name + "' references unknown POU '" +
                                         t.entry_pou + "'");
            if (entry->kind != PouKind::Program)
                throw ParseError(entry->loc, "task entry '" + t.entry_pou + "' is not a PROGRAM");
        }
    }

    void check_pou(const PouDecl& pou) {
        std::set<std::string> vars;
        for (const VarDecl& v : pou.vars) {
            if (!vars.insert(v.name).second)
                throw ParseError(v.loc, "duplicate variable '" + v.name + "' in " + pou.name);
            if (v.type == DataType::BoolArray)
                throw ParseError(v.loc, "ARRAY type is only allowed in VAR_GLOBAL");
            // I/O image storage is reserved to globals and program-level vars;
            // on FBs/functions VAR_INPUT/VAR_OUTPUT declare call parameters.
        }
        if (pou.kind == PouKind::Function) {
            if (!pou.has_ret) throw ParseError(pou.loc, "FUNCTION requires a return type");
            if (pou.body.is_sfc)
                throw ParseError(pou.loc, "FUNCTION may not have an SFC body");
            for (const VarDecl& v : pou.vars)
                if (v.storage == Storage::Output)
                    throw ParseError(v.loc, "FUNCTION may not declare VAR_OUTPUT");
        }
        std::set<std::string> action_names;
        for (const ActionDecl& a : pou.actions)
            if (!action_names.insert(a.name).second)
                throw ParseError(a.loc, "duplicate action '" + a.name + "' in " + pou.name);

        if (pou.body.is_sfc) check_chart(pou);

        if (!pou.body.is_sfc) check_stmts(pou, pou.body.stmts, false);
        for (const ActionDecl& a : pou.actions) check_stmts(pou, a.body, false);
    }

    void check_chart(const PouDecl& pou) {
        const SfcChart& chart = pou.body.chart;
        if (chart.steps.empty()) throw ParseError(pou.loc, "SFC body has no steps");
        std::set<std::string> step_names;
        int initials = 0;
        for (const Step& s : chart.steps) {
            if (!step_names.insert(s.name).second)
                throw ParseError(s.loc, "duplicate step '" + s.name + "'");
            if (s.is_initial) ++initials;
            for (const StepActionRef& ref : s.actions) {
                bool found = false;
                for (const ActionDecl& a : pou.actions)
                    if (a.name == ref.action) found = true;
                if (!found)
                    throw ParseError(ref.loc, "step '" + s.name + "' references unknown action '" +
                                                  ref.action + "'");
            }
        }
        if (initials != 1)
            throw ParseError(pou.loc, "SFC chart needs exactly one INITIAL step, has " +
                                          std::to_string(initials));
        for (const Transition& t : chart.transitions) {
            if (!step_names.count(t.from))
                throw ParseError(t.loc, "transition from unknown step '" + t.from + "'");
            if (!step_names.count(t.to))
                throw ParseError(t.loc, "transition to unknown step '" + t.to + "'");
            check_expr(pou, t.cond);
        }
    }

    const VarDecl* lookup_var(const PouDecl& pou, const std::string& name) const {
        for (const VarDecl& v : pou.vars)
            if (v.name == name) return &v;
        return p_.find_global(name);
    }

    void check_var_ref(const PouDecl& pou, const std::string& name, const SourceLoc& loc) const {
        if (pou.kind == PouKind::Function && name == pou.name) return; // return variable
        if (!lookup_var(pou, name))
            throw ParseError(loc, "unresolved identifier '" + name + "' in " + pou.name);
    }

    void check_call(const PouDecl& pou, const std::string& callee,
                    const std::vector<Expr>& args, const std::vector<std::string>& arg_names,
                    const std::vector<CallOut>& outs, bool as_expr, const SourceLoc& loc) const {
        const PouDecl* target = p_.find_pou(callee);
        if (!target) throw ParseError(loc, "call to undeclared POU '" + callee + "'");
        if (target->kind == PouKind::Program)
            throw ParseError(loc, "PROGRAM '" + callee + "' cannot be called");
        if (as_expr && target->kind != PouKind::Function)
            throw ParseError(loc, "only FUNCTIONs may be called in expressions");

        std::vector<const VarDecl*> inputs;
        for (const VarDecl& v : target->vars)
            if (v.storage == Storage::Input) inputs.push_back(&v);

        size_t positional = 0;
        for (size_t i = 0; i < args.size(); ++i) {
            if (arg_names[i].empty()) {
                ++positional;
            } else {
                bool found = false;
                for (const VarDecl* in : inputs)
                    if (in->name == arg_names[i]) found = true;
                if (!found)
                    throw ParseError(loc, "'" + callee + "' has no input '" + arg_names[i] + "'");
            }
            check_expr(pou, args[i]);
        }
        if (positional > inputs.size())
            throw ParseError(loc, "too many arguments in call to '" + callee + "'");
        for (const CallOut& o : outs) {
            bool found = false;
            for (const VarDecl& v : target->vars)
                if (v.storage == Storage::Output && v.name == o.param) found = true;
            if (!found)
                throw ParseError(loc, "'" + callee + "' has no output '" + o.param + "'");
            check_var_ref(pou, o.target_var, loc);
        }
    }

    void check_expr(const PouDecl& pou, const Expr& e) const {
        switch (e.kind) {
        case ExprKind::Const:
            break;
        case ExprKind::VarRef:
            check_var_ref(pou, e.name, e.loc);
            break;
        case ExprKind::Unary:
            check_expr(pou, e.args[0]);
            break;
        case ExprKind::Binary:
            check_expr(pou, e.args[0]);
            check_expr(pou, e.args[1]);
            break;
        case ExprKind::Call:
            check_call(pou, e.name, e.args, e.arg_names, {}, true, e.loc);
            break;
        }
    }

    void check_stmts(const PouDecl& pou, const std::vector<Stmt>& stmts, bool in_loop) {
        for (const Stmt& s : stmts) {
            switch (s.kind) {
            case StmtKind::Assign:
                check_var_ref(pou, s.lhs, s.loc);
                check_expr(pou, s.rhs);
                break;
            case StmtKind::If:
                for (const IfBranch& b : s.branches) {
                    check_expr(pou, b.cond);
                    check_stmts(pou, b.body, in_loop);
                }
                check_stmts(pou, s.else_body, in_loop);
                break;
            case StmtKind::Case:
                check_expr(pou, s.selector);
                for (const CaseArm& a : s.arms) check_stmts(pou, a.body, in_loop);
                check_stmts(pou, s.case_else, in_loop);
                break;
            case StmtKind::For:
                check_var_ref(pou, s.for_var, s.loc);
                check_expr(pou, s.from);
                check_expr(pou, s.to);
                if (s.has_by) check_expr(pou, s.by);
                check_stmts(pou, s.body, true);
                break;
            case StmtKind::While:
                check_expr(pou, s.cond);
                check_stmts(pou, s.body, true);
                break;
            case StmtKind::Repeat:
                check_stmts(pou, s.body, true);
                check_expr(pou, s.until_cond);
                break;
            case StmtKind::Call:
                check_call(pou, s.callee, s.args, s.arg_names, s.outs, false, s.loc);
                break;
            case StmtKind::Return:
                break;
            case StmtKind::Exit:
                if (!in_loop) throw ParseError(s.loc, "EXIT outside of a loop");
                break;
            }
        }
    }

    // IEC 61131-3 forbids recursion between POUs; report a cycle as an error.
    void check_recursion() {
        std::map<std::string, std::vector<std::string>> graph;
        for (const PouDecl& pou : p_.pous) graph[pou.name] = pou_call_targets(pou);

        std::map<std::string, int> state; // 0 unvisited, 1 in stack, 2 done
        std::vector<std::string> stack;

        auto dfs = [&](auto&& self, const std::string& name) -> void {
            state[name] = 1;
            stack.push_back(name);
            for (const std::string& callee : graph[name]) {
                if (state[callee] == 1) {
                    std::string chain;
                    for (const std::string& s : stack) chain += s + " -> ";
                    throw ParseError(p_.find_pou(callee)->loc,
                                     "recursion between POUs: " + chain + callee);
                }
                if (state[callee] == 0) self(self, callee);
            }
            state[name] = 2;
            stack.pop_back();
        };
        for (const PouDecl& pou : p_.pous)
            if (state[pou.name] == 0) dfs(dfs, pou.name);
    }
};

} // namespace

SourceProject parse_project(const std::vector<std::pair<std::string, std::string>>& sources,
                            const std::vector<TaskDecl>& tasks) {
    SourceProject project;
    project.files = sources;
    project.tasks = tasks;
    uint32_t uid = 0;
    for (const auto& [path, text] : sources) {
        Parser parser(lex(path, text), uid);
        parser.parse_file(project);
    }
    Resolver(project).run();
    return project;
}

SourceProject parse_project(const std::vector<std::pair<std::string, std::string>>& sources) {
    return parse_project(sources, {});
}

} // namespace plccov
