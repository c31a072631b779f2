#include "plccov/depmodel.hpp"

#include <algorithm>
#include <map>

#include "plccov/errors.hpp"
#include "plccov/parser.hpp"
#include "plccov/printer.hpp"

namespace plccov {

const char* node_kind_name(NodeKind k) {
    switch (k) {
    case NodeKind::Project: return "project";
    case NodeKind::Task: return "task";
    case NodeKind::Pou: return "pou";
    case NodeKind::Action: return "action";
    case NodeKind::Step: return "step";
    case NodeKind::BasicBlock: return "block";
    }
    return "?";
}

const char* edge_kind_name(EdgeKind k) {
    switch (k) {
    case EdgeKind::Contains: return "contains";
    case EdgeKind::Calls: return "calls";
    case EdgeKind::JumpsTo: return "jumps";
    case EdgeKind::SfcTransition: return "sfc";
    }
    return "?";
}

std::vector<int> DependencyModel::contains_children(int id) const {
    std::vector<int> out;
    for (const DepEdge& e : edges)
        if (e.kind == EdgeKind::Contains && e.source == id) out.push_back(e.target);
    return out;
}

std::vector<int> DependencyModel::contains_parents(int id) const {
    std::vector<int> out;
    for (const DepEdge& e : edges)
        if (e.kind == EdgeKind::Contains && e.target == id) out.push_back(e.source);
    return out;
}

const DepNode* DependencyModel::find_by_name(NodeKind kind, const std::string& name) const {
    for (const DepNode& n : nodes)
        if (n.kind == kind && n.name == name) return &n;
    return nullptr;
}

int DependencyModel::entry_node(const std::string& pou_name) const {
    const DepNode* pou = find_by_name(NodeKind::Pou, pou_name);
    if (!pou) return -1;
    int best_block = -1;
    int first_step = -1;
    for (int child : contains_children(pou->id)) {
        const DepNode& c = node(child);
        if (c.kind == NodeKind::BasicBlock &&
            (best_block < 0 || c.sequential_id < node(best_block).sequential_id))
            best_block = child;
        if (c.kind == NodeKind::Step && first_step < 0) first_step = child;
    }
    if (best_block >= 0) return best_block;
    // SFC callee: the builder orders the initial step first.
    if (first_step >= 0) return first_step;
    return pou->id;
}

namespace {

Expr make_not(const Expr& e) {
    Expr n;
    n.kind = ExprKind::Unary;
    n.un = UnOp::Not;
    n.args.push_back(e);
    return n;
}

Expr make_and(Expr a, Expr b) {
    Expr e;
    e.kind = ExprKind::Binary;
    e.bin = BinOp::And;
    e.args.push_back(std::move(a));
    e.args.push_back(std::move(b));
    return e;
}

Expr make_or(Expr a, Expr b) {
    Expr e;
    e.kind = ExprKind::Binary;
    e.bin = BinOp::Or;
    e.args.push_back(std::move(a));
    e.args.push_back(std::move(b));
    return e;
}

Expr make_eq(const Expr& sel, int64_t label) {
    Expr lit;
    lit.kind = ExprKind::Const;
    lit.value = Const::of_int(label);
    Expr e;
    e.kind = ExprKind::Binary;
    e.bin = BinOp::Eq;
    e.args.push_back(sel);
    e.args.push_back(std::move(lit));
    return e;
}

// Inverted condition of a decision: NOT (c1) AND NOT (c2) ...
std::string inverted_conditions(const std::vector<const Expr*>& conds) {
    Expr acc;
    bool first = true;
    for (const Expr* c : conds) {
        Expr n = make_not(*c);
        acc = first ? std::move(n) : make_and(std::move(acc), std::move(n));
        first = false;
    }
    return expr_text(acc);
}

std::string arm_condition(const Expr& sel, const std::vector<int64_t>& labels) {
    Expr acc;
    bool first = true;
    for (int64_t l : labels) {
        Expr eq = make_eq(sel, l);
        acc = first ? std::move(eq) : make_or(std::move(acc), std::move(eq));
        first = false;
    }
    return expr_text(acc);
}

std::string case_else_condition(const Expr& sel, const std::vector<CaseArm>& arms) {
    Expr acc;
    bool first = true;
    for (const CaseArm& arm : arms) {
        for (int64_t l : arm.labels) {
            Expr n = make_not(make_eq(sel, l));
            acc = first ? std::move(n) : make_and(std::move(acc), std::move(n));
            first = false;
        }
    }
    return expr_text(acc);
}

class ModelBuilder {
  public:
    explicit ModelBuilder(const SourceProject& project) : p_(project) {}

    DependencyModel build() {
        int project_node = add_node(NodeKind::Project, "project", "", {});
        for (const TaskDecl& t : p_.tasks) {
            int id = add_node(NodeKind::Task, t.name, "", {});
            m_.roots.push_back(id);
            contains(project_node, id);
        }
        for (size_t i = 0; i < p_.tasks.size(); ++i) {
            int pou_id = visit_pou(p_.tasks[i].entry_pou);
            contains(m_.roots[i], pou_id);
        }
        return std::move(m_);
    }

  private:
    const SourceProject& p_;
    DependencyModel m_;
    std::map<std::string, int> visited_; // pou name -> node id
    int next_seq_ = 0;

    struct CallSite {
        int src_node; // block, or step for transition-condition calls
        std::string callee;
    };

    struct PendingEdge {
        int src;
        std::string cond;
    };

    struct WalkState {
        std::string container;
        std::vector<int> blocks;
        std::vector<CallSite> calls;
    };

    int add_node(NodeKind kind, std::string name, std::string container, SourceLoc loc) {
        DepNode n;
        n.id = static_cast<int>(m_.nodes.size());
        n.kind = kind;
        n.name = std::move(name);
        n.container = std::move(container);
        n.loc = std::move(loc);
        m_.nodes.push_back(std::move(n));
        return m_.nodes.back().id;
    }

    void contains(int parent, int child) {
        m_.edges.push_back({parent, child, EdgeKind::Contains, ""});
    }

    void add_edge(int src, int tgt, EdgeKind kind, std::string cond) {
        m_.edges.push_back({src, tgt, kind, std::move(cond)});
    }

    // Opens a block for `s` if none is current, attributes the statement and
    // its call targets to it, and lands any pending join edges on it.
    void append_stmt(WalkState& ws, int& current, std::vector<PendingEdge>& pending,
                     const Stmt& s) {
        if (current < 0) {
            current = add_node(NodeKind::BasicBlock,
                               ws.container + "#" + std::to_string(next_seq_), ws.container,
                               s.loc);
            m_.nodes[static_cast<size_t>(current)].sequential_id = next_seq_++;
            ws.blocks.push_back(current);
            for (PendingEdge& pe : pending)
                add_edge(pe.src, current, EdgeKind::JumpsTo, std::move(pe.cond));
            pending.clear();
        }
        DepNode& blk = m_.nodes[static_cast<size_t>(current)];
        blk.stmt_count += 1;
        blk.stmt_uids.push_back(s.uid);
        blk.stmt_lines.push_back(s.loc.line);
        std::vector<std::string> targets;
        collect_stmt_calls(s, targets);
        for (std::string& t : targets) ws.calls.push_back({current, std::move(t)});
    }

    // Calls made by the statement itself (its own expressions); statements in
    // nested arms attribute their calls to the arm blocks.
    static void collect_stmt_calls(const Stmt& s, std::vector<std::string>& out) {
        switch (s.kind) {
        case StmtKind::Assign: collect_call_targets(s.rhs, out); break;
        case StmtKind::Call:
            out.push_back(s.callee);
            for (const Expr& a : s.args) collect_call_targets(a, out);
            break;
        case StmtKind::If:
            for (const IfBranch& br : s.branches) collect_call_targets(br.cond, out);
            break;
        case StmtKind::Case: collect_call_targets(s.selector, out); break;
        case StmtKind::For:
            collect_call_targets(s.from, out);
            collect_call_targets(s.to, out);
            if (s.has_by) collect_call_targets(s.by, out);
            break;
        case StmtKind::While: collect_call_targets(s.cond, out); break;
        case StmtKind::Repeat: collect_call_targets(s.until_cond, out); break;
        case StmtKind::Return:
        case StmtKind::Exit: break;
        }
    }

    // Walks one statement list. `pending` edges land on the next block created
    // here; leftovers return to the caller (the enclosing join) and are
    // dropped at the outermost level.
    std::vector<PendingEdge> walk(const std::vector<Stmt>& stmts, WalkState& ws, int& current,
                                  std::vector<PendingEdge> pending) {
        for (const Stmt& s : stmts) {
            switch (s.kind) {
            case StmtKind::Assign:
            case StmtKind::Call:
            case StmtKind::Return:
            case StmtKind::Exit:
                append_stmt(ws, current, pending, s);
                break;
            case StmtKind::If: {
                append_stmt(ws, current, pending, s); // header joins the preceding block
                int header = current;
                current = -1;
                std::vector<const Expr*> conds;
                for (const IfBranch& br : s.branches) {
                    conds.push_back(&br.cond);
                    walk_arm(br.body, ws, header, expr_text(br.cond), pending);
                }
                if (s.has_else)
                    walk_arm(s.else_body, ws, header, inverted_conditions(conds), pending);
                else
                    pending.push_back({header, inverted_conditions(conds)});
                break;
            }
            case StmtKind::Case: {
                append_stmt(ws, current, pending, s);
                int header = current;
                current = -1;
                for (const CaseArm& arm : s.arms)
                    walk_arm(arm.body, ws, header, arm_condition(s.selector, arm.labels),
                             pending);
                std::string else_cond = case_else_condition(s.selector, s.arms);
                if (s.has_case_else)
                    walk_arm(s.case_else, ws, header, else_cond, pending);
                else
                    pending.push_back({header, std::move(else_cond)});
                break;
            }
            case StmtKind::For: {
                append_stmt(ws, current, pending, s);
                int header = current;
                current = -1;
                walk_arm(s.body, ws, header, "", pending);
                break;
            }
            case StmtKind::While: {
                append_stmt(ws, current, pending, s);
                int header = current;
                current = -1;
                walk_arm(s.body, ws, header, expr_text(s.cond), pending);
                pending.push_back({header, expr_text(make_not(s.cond))});
                break;
            }
            case StmtKind::Repeat: {
                append_stmt(ws, current, pending, s);
                int header = current;
                current = -1;
                walk_arm(s.body, ws, header, "", pending);
                break;
            }
            }
        }
        return pending;
    }

    // An arm or loop body starts a fresh block chain, entered from the header
    // block. An empty arm produces no block; its edge falls through to the join.
    void walk_arm(const std::vector<Stmt>& body, WalkState& ws, int header, std::string cond,
                  std::vector<PendingEdge>& outer_pending) {
        if (body.empty()) {
            outer_pending.push_back({header, std::move(cond)});
            return;
        }
        int current = -1;
        std::vector<PendingEdge> leftover =
            walk(body, ws, current, {{header, std::move(cond)}});
        for (PendingEdge& pe : leftover) outer_pending.push_back(std::move(pe));
    }

    int visit_pou(const std::string& name) {
        auto it = visited_.find(name);
        if (it != visited_.end()) return it->second;
        const PouDecl* pou = p_.find_pou(name);
        if (!pou) throw ConsistencyError("call to unknown POU '" + name + "'");

        int pou_id = add_node(NodeKind::Pou, pou->name, "", pou->loc);
        visited_[name] = pou_id;
        contains(0, pou_id); // project contains every reachable POU

        std::vector<CallSite> calls;

        if (!pou->body.is_sfc) {
            WalkState ws;
            ws.container = pou->name;
            int current = -1;
            walk(pou->body.stmts, ws, current, {});
            for (int b : ws.blocks) contains(pou_id, b);
            calls = std::move(ws.calls);
        } else {
            // Initial step ordered first so it is the Calls entry target.
            std::map<std::string, int> step_ids;
            std::vector<const Step*> ordered;
            for (const Step& st : pou->body.chart.steps)
                if (st.is_initial) ordered.push_back(&st);
            for (const Step& st : pou->body.chart.steps)
                if (!st.is_initial) ordered.push_back(&st);
            for (const Step* st : ordered) {
                int sid =
                    add_node(NodeKind::Step, pou->name + "." + st->name, pou->name, st->loc);
                step_ids[st->name] = sid;
                contains(pou_id, sid);
            }
            for (const Transition& t : pou->body.chart.transitions) {
                add_edge(step_ids[t.from], step_ids[t.to], EdgeKind::SfcTransition,
                         expr_text(t.cond));
                std::vector<std::string> targets;
                collect_call_targets(t.cond, targets);
                for (std::string& tgt : targets)
                    calls.push_back({step_ids[t.from], std::move(tgt)});
            }
            std::map<std::string, int> action_ids;
            for (const ActionDecl& a : pou->actions)
                action_ids[a.name] =
                    add_node(NodeKind::Action, pou->name + "." + a.name, pou->name, a.loc);
            std::set<std::string> referenced;
            for (const Step* st : ordered)
                for (const StepActionRef& ref : st->actions) {
                    contains(step_ids[st->name], action_ids[ref.action]);
                    referenced.insert(ref.action);
                }
            for (const ActionDecl& a : pou->actions)
                if (!referenced.count(a.name)) contains(pou_id, action_ids[a.name]);
            for (const ActionDecl& a : pou->actions) {
                WalkState aws;
                aws.container = pou->name + "." + a.name;
                int current = -1;
                walk(a.body, aws, current, {});
                for (int b : aws.blocks) contains(action_ids[a.name], b);
                for (CallSite& c : aws.calls) calls.push_back(std::move(c));
            }
        }

        if (!pou->body.is_sfc) {
            for (const ActionDecl& a : pou->actions) {
                int aid = add_node(NodeKind::Action, pou->name + "." + a.name, pou->name, a.loc);
                contains(pou_id, aid);
                WalkState aws;
                aws.container = pou->name + "." + a.name;
                int current = -1;
                walk(a.body, aws, current, {});
                for (int b : aws.blocks) contains(aid, b);
                for (CallSite& c : aws.calls) calls.push_back(std::move(c));
            }
        }

        // Depth-first into callees in encounter order, after this POU's own
        // blocks are numbered (keeps per-POU ids consecutive).
        std::set<std::string> seen;
        for (const CallSite& c : calls) {
            visit_pou(c.callee);
            int tgt = m_.entry_node(c.callee);
            std::string key = std::to_string(c.src_node) + ">" + c.callee;
            if (seen.insert(key).second) add_edge(c.src_node, tgt, EdgeKind::Calls, "");
        }
        return pou_id;
    }
};

} // namespace

DependencyModel build_model(const SourceProject& project) {
    return ModelBuilder(project).build();
}

std::vector<const DepNode*> basic_blocks(const DependencyModel& model) {
    std::vector<const DepNode*> out;
    for (const DepNode& n : model.nodes)
        if (n.kind == NodeKind::BasicBlock) out.push_back(&n);
    std::sort(out.begin(), out.end(), [](const DepNode* a, const DepNode* b) {
        return a->sequential_id < b->sequential_id;
    });
    return out;
}

std::set<std::string> reachable_pous(const DependencyModel& model) {
    std::set<std::string> out;
    for (const DepNode& n : model.nodes)
        if (n.kind == NodeKind::Pou) out.insert(n.name);
    return out;
}

std::string to_dot(const DependencyModel& model) {
    std::string out = "digraph depmodel {\n    rankdir=LR;\n    node [shape=box];\n";
    for (const DepNode& n : model.nodes) {
        std::string label = n.name;
        if (n.kind == NodeKind::BasicBlock)
            label = n.container + "\\nblock " + std::to_string(n.sequential_id);
        out += "    n" + std::to_string(n.id) + " [label=\"" + label + "\"";
        if (n.kind == NodeKind::BasicBlock) out += ", shape=ellipse";
        if (n.kind == NodeKind::Task) out += ", shape=septagon";
        out += "];\n";
    }
    for (const DepEdge& e : model.edges) {
        out += "    n" + std::to_string(e.source) + " -> n" + std::to_string(e.target);
        std::string attrs;
        switch (e.kind) {
        case EdgeKind::Contains: attrs = "style=dotted, arrowhead=none"; break;
        case EdgeKind::Calls: attrs = "style=bold"; break;
        case EdgeKind::JumpsTo:
        case EdgeKind::SfcTransition: break;
        }
        if (!e.condition.empty()) {
            if (!attrs.empty()) attrs += ", ";
            std::string esc;
            for (char c : e.condition)
                esc += (c == '"') ? std::string("\\\"") : std::string(1, c);
            attrs += "label=\"" + esc + "\"";
        }
        if (!attrs.empty()) out += " [" + attrs + "]";
        out += ";\n";
    }
    out += "}\n";
    return out;
}

} // namespace plccov
