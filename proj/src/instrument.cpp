#include "plccov/instrument.hpp"

#include <algorithm>
#include <cassert>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "plccov/errors.hpp"
#include "plccov/printer.hpp"
#include "plccov/xml.hpp"

namespace plccov {

bool operator==(const TracePointDatabase& a, const TracePointDatabase& b) {
    if (a.max_tp != b.max_tp || a.fingerprint != b.fingerprint ||
        a.points.size() != b.points.size())
        return false;
    if (a.names.array != b.names.array || a.names.record != b.names.record ||
        a.names.reset != b.names.reset || a.names.save != b.names.save)
        return false;
    for (size_t i = 0; i < a.points.size(); ++i) {
        const TracePoint& x = a.points[i];
        const TracePoint& y = b.points[i];
        if (x.id != y.id || x.owner != y.owner || x.kind != y.kind || !(x.loc == y.loc))
            return false;
    }
    return true;
}

std::string project_fingerprint(const SourceProject& project) {
    uint64_t h = 1469598103934665603ull;
    auto mix = [&h](const std::string& s) {
        for (unsigned char c : s) {
            h ^= c;
            h *= 1099511628211ull;
        }
        h ^= 0xff;
        h *= 1099511628211ull;
    };
    for (const auto& [path, text] : pretty_print(project)) {
        mix(path);
        mix(text);
    }
    static const char* hex = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<size_t>(i)] = hex[h & 0xf];
        h >>= 4;
    }
    return out;
}

namespace {

constexpr const char* kRuntimeFile = "tp_runtime.st";
constexpr const char* kStepActionPrefix = "tp_step_";

// Every identifier a generated name could collide with.
std::set<std::string> user_identifiers(const SourceProject& p) {
    std::set<std::string> ids;
    for (const VarDecl& g : p.global_vars) ids.insert(g.name);
    for (const PouDecl& pou : p.pous) {
        ids.insert(pou.name);
        for (const VarDecl& v : pou.vars) ids.insert(v.name);
        for (const ActionDecl& a : pou.actions) ids.insert(a.name);
        if (pou.body.is_sfc)
            for (const Step& s : pou.body.chart.steps) ids.insert(s.name);
    }
    return ids;
}

std::string disambiguate(const std::string& base, const std::set<std::string>& taken) {
    if (!taken.count(base)) return base;
    for (int i = 2;; ++i) {
        std::string candidate = base + "_" + std::to_string(i);
        if (!taken.count(candidate)) return candidate;
    }
}

Stmt make_tpr_call(const std::string& record_fn, int tp_id, const SourceLoc& loc, uint32_t uid) {
    Stmt s;
    s.kind = StmtKind::Call;
    s.uid = uid;
    s.loc = loc;
    s.callee = record_fn;
    s.arg_names.push_back("i");
    Expr arg;
    arg.kind = ExprKind::Const;
    arg.value = Const::of_int(tp_id);
    arg.loc = loc;
    s.args.push_back(std::move(arg));
    return s;
}

uint32_t max_uid(const std::vector<Stmt>& stmts) {
    uint32_t m = 0;
    for (const Stmt& s : stmts) {
        m = std::max(m, s.uid);
        for (const IfBranch& b : s.branches) m = std::max(m, max_uid(b.body));
        m = std::max(m, max_uid(s.else_body));
        for (const CaseArm& a : s.arms) m = std::max(m, max_uid(a.body));
        m = std::max(m, max_uid(s.case_else));
        m = std::max(m, max_uid(s.body));
    }
    return m;
}

class Inserter {
  public:
    Inserter(const std::map<uint32_t, int>& first_uid_to_tp, const std::string& record_fn,
             uint32_t next_uid)
        : map_(first_uid_to_tp), record_fn_(record_fn), next_uid_(next_uid) {}

    int inserted() const { return inserted_; }

    void run(std::vector<Stmt>& list) {
        for (size_t i = 0; i < list.size(); ++i) {
            auto it = map_.find(list[i].uid);
            if (it != map_.end()) {
                list.insert(list.begin() + static_cast<long>(i),
                            make_tpr_call(record_fn_, it->second, list[i].loc, ++next_uid_));
                ++inserted_;
                ++i;
            }
            Stmt& s = list[i];
            for (IfBranch& b : s.branches) run(b.body);
            run(s.else_body);
            for (CaseArm& a : s.arms) run(a.body);
            run(s.case_else);
            run(s.body);
        }
    }

  private:
    const std::map<uint32_t, int>& map_;
    const std::string& record_fn_;
    uint32_t next_uid_;
    int inserted_ = 0;
};

void append_runtime_decls(SourceProject& p, const TraceNames& names, int max_tp) {
    VarDecl tpa;
    tpa.name = names.array;
    tpa.type = DataType::BoolArray;
    tpa.storage = Storage::Global;
    tpa.array_size = max_tp + 1;
    tpa.loc = {kRuntimeFile, 1, 1};
    p.global_vars.push_back(std::move(tpa));

    PouDecl tpr;
    tpr.name = names.record;
    tpr.kind = PouKind::Function;
    tpr.has_ret = true;
    tpr.ret_type = DataType::Bool;
    tpr.loc = {kRuntimeFile, 2, 1};
    VarDecl i;
    i.name = "i";
    i.type = DataType::Int;
    i.storage = Storage::Input;
    i.loc = tpr.loc;
    tpr.vars.push_back(std::move(i));
    p.pous.push_back(std::move(tpr));

    PouDecl reset;
    reset.name = names.reset;
    reset.kind = PouKind::Function;
    reset.has_ret = true;
    reset.ret_type = DataType::Bool;
    reset.loc = {kRuntimeFile, 3, 1};
    p.pous.push_back(std::move(reset));

    PouDecl save;
    save.name = names.save;
    save.kind = PouKind::FunctionBlock;
    save.loc = {kRuntimeFile, 4, 1};
    VarDecl x;
    x.name = "xExecute";
    x.type = DataType::Bool;
    x.storage = Storage::Input;
    x.loc = save.loc;
    save.vars.push_back(std::move(x));
    VarDecl fn;
    fn.name = "szFilename";
    fn.type = DataType::String;
    fn.storage = Storage::Input;
    fn.loc = save.loc;
    save.vars.push_back(std::move(fn));
    VarDecl done;
    done.name = "xDone";
    done.type = DataType::Bool;
    done.storage = Storage::Output;
    done.loc = save.loc;
    save.vars.push_back(std::move(done));
    p.pous.push_back(std::move(save));

    p.files.emplace_back(kRuntimeFile, "");
}

} // namespace

std::pair<InstrumentedProject, TracePointDatabase> instrument(const SourceProject& project,
                                                              const DependencyModel& model) {
    for (const VarDecl& g : project.global_vars)
        if (g.type == DataType::BoolArray)
            throw ConsistencyError("project is already instrumented (trace array '" + g.name +
                                   "' present)");

    std::set<std::string> taken = user_identifiers(project);
    TraceNames names;
    names.array = disambiguate(names.array, taken);
    names.record = disambiguate(names.record, taken);
    names.reset = disambiguate(names.reset, taken);
    names.save = disambiguate(names.save, taken);

    InstrumentedProject out;
    out.base = project;
    out.names = names;

    TracePointDatabase db;
    db.names = names;

    // Block points: tpr(i := sequential_id) before the block's first statement.
    std::map<uint32_t, int> first_uid_to_tp;
    for (const DepNode* block : basic_blocks(model)) {
        first_uid_to_tp[block->stmt_uids.front()] = block->sequential_id;
        TracePoint tp;
        tp.id = block->sequential_id;
        tp.owner = block->container;
        tp.kind = TpKind::Block;
        tp.loc = block->loc;
        tp.node_ref = block->id;
        db.points.push_back(std::move(tp));
    }

    uint32_t next_uid = 0;
    for (const PouDecl& pou : project.pous) {
        next_uid = std::max(next_uid, max_uid(pou.body.stmts));
        for (const ActionDecl& a : pou.actions) next_uid = std::max(next_uid, max_uid(a.body));
    }

    Inserter inserter(first_uid_to_tp, names.record, next_uid);
    for (PouDecl& pou : out.base.pous) {
        inserter.run(pou.body.stmts);
        for (ActionDecl& a : pou.actions) inserter.run(a.body);
    }
    if (inserter.inserted() != static_cast<int>(first_uid_to_tp.size()))
        throw ConsistencyError("instrumentation did not reach every basic block");
    next_uid += static_cast<uint32_t>(first_uid_to_tp.size());

    // Step activation points: one synthetic P1 action per step, numbered after
    // the blocks in model node order.
    int next_id = static_cast<int>(db.points.size());
    for (const DepNode& n : model.nodes) {
        if (n.kind != NodeKind::Step) continue;
        PouDecl* pou = out.base.find_pou(n.container);
        assert(pou && pou->body.is_sfc);
        std::string step_name = n.name.substr(n.container.size() + 1);

        std::set<std::string> action_names;
        for (const ActionDecl& a : pou->actions) action_names.insert(a.name);
        std::string action_name = disambiguate(kStepActionPrefix + step_name, action_names);

        ActionDecl act;
        act.name = action_name;
        act.loc = n.loc;
        act.body.push_back(make_tpr_call(names.record, next_id, n.loc, ++next_uid));
        pou->actions.push_back(std::move(act));
        for (Step& st : pou->body.chart.steps)
            if (st.name == step_name) st.actions.push_back({action_name, ActionQualifier::P1, n.loc});

        TracePoint tp;
        tp.id = next_id++;
        tp.owner = n.name;
        tp.kind = TpKind::Step;
        tp.loc = n.loc;
        tp.node_ref = n.id;
        db.points.push_back(std::move(tp));
    }

    db.max_tp = next_id - 1;
    assert(static_cast<int>(db.points.size()) == db.max_tp + 1);

    if (!db.points.empty()) append_runtime_decls(out.base, names, db.max_tp);
    db.fingerprint = project_fingerprint(out.base);
    return {std::move(out), std::move(db)};
}

namespace {

bool is_record_call(const Stmt& s, const std::string& record_fn) {
    return s.kind == StmtKind::Call && s.callee == record_fn;
}

void strip_calls(std::vector<Stmt>& list, const std::string& record_fn) {
    list.erase(std::remove_if(list.begin(), list.end(),
                              [&](const Stmt& s) { return is_record_call(s, record_fn); }),
               list.end());
    for (Stmt& s : list) {
        for (IfBranch& b : s.branches) strip_calls(b.body, record_fn);
        strip_calls(s.else_body, record_fn);
        for (CaseArm& a : s.arms) strip_calls(a.body, record_fn);
        strip_calls(s.case_else, record_fn);
        strip_calls(s.body, record_fn);
    }
}

} // namespace

SourceProject strip_instrumentation(const SourceProject& instrumented, const TraceNames& names) {
    SourceProject out = instrumented;

    // Synthetic step actions: body is exactly one record call.
    for (PouDecl& pou : out.pous) {
        std::set<std::string> generated;
        for (const ActionDecl& a : pou.actions)
            if (a.body.size() == 1 && is_record_call(a.body[0], names.record))
                generated.insert(a.name);
        if (generated.empty()) continue;
        pou.actions.erase(std::remove_if(pou.actions.begin(), pou.actions.end(),
                                         [&](const ActionDecl& a) {
                                             return generated.count(a.name) > 0;
                                         }),
                          pou.actions.end());
        if (pou.body.is_sfc)
            for (Step& st : pou.body.chart.steps)
                st.actions.erase(std::remove_if(st.actions.begin(), st.actions.end(),
                                                [&](const StepActionRef& r) {
                                                    return generated.count(r.action) > 0;
                                                }),
                                 st.actions.end());
    }

    for (PouDecl& pou : out.pous) {
        strip_calls(pou.body.stmts, names.record);
        for (ActionDecl& a : pou.actions) strip_calls(a.body, names.record);
    }

    out.pous.erase(std::remove_if(out.pous.begin(), out.pous.end(),
                                  [&](const PouDecl& p) {
                                      return p.name == names.record || p.name == names.reset ||
                                             p.name == names.save;
                                  }),
                   out.pous.end());
    out.global_vars.erase(std::remove_if(out.global_vars.begin(), out.global_vars.end(),
                                         [&](const VarDecl& v) {
                                             return v.type == DataType::BoolArray &&
                                                    v.name == names.array;
                                         }),
                          out.global_vars.end());
    out.files.erase(std::remove_if(out.files.begin(), out.files.end(),
                                   [&](const std::pair<std::string, std::string>& f) {
                                       return f.first == kRuntimeFile && f.second.empty();
                                   }),
                    out.files.end());
    return out;
}

std::string tp_database_text(const TracePointDatabase& db) {
    std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += "<tracepoints max_tp=\"" + std::to_string(db.max_tp) + "\" fingerprint=\"" +
           db.fingerprint + "\"";
    if (!db.names.is_default()) {
        out += " array=\"" + xml_escape(db.names.array) + "\" record=\"" +
               xml_escape(db.names.record) + "\" reset=\"" + xml_escape(db.names.reset) +
               "\" save=\"" + xml_escape(db.names.save) + "\"";
    }
    out += ">\n";
    for (const TracePoint& tp : db.points) {
        out += "    <tp id=\"" + std::to_string(tp.id) + "\" pou=\"" + xml_escape(tp.owner) +
               "\" kind=\"" + (tp.kind == TpKind::Block ? "block" : "step") + "\" line=\"" +
               std::to_string(tp.loc.line) + "\" col=\"" + std::to_string(tp.loc.col) +
               "\" file=\"" + xml_escape(tp.loc.file) + "\"/>\n";
    }
    out += "</tracepoints>\n";
    return out;
}

void emit_tp_database(const TracePointDatabase& db, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConsistencyError("cannot write trace-point database: " + path);
    f << tp_database_text(db);
}

TracePointDatabase parse_tp_database(const std::string& text) {
    XmlNode root = xml_parse(text);
    if (root.name != "tracepoints")
        throw ConsistencyError("not a trace-point database (root <" + root.name + ">)");
    TracePointDatabase db;
    db.max_tp = std::stoi(root.need("max_tp"));
    db.fingerprint = root.need("fingerprint");
    db.names.array = root.attr_or("array", "tpa");
    db.names.record = root.attr_or("record", "tpr");
    db.names.reset = root.attr_or("reset", "tp_reset");
    db.names.save = root.attr_or("save", "tp_save");
    int expected = 0;
    for (const XmlNode& child : root.children) {
        if (child.name != "tp")
            throw ConsistencyError("unexpected element <" + child.name + "> in database");
        TracePoint tp;
        tp.id = std::stoi(child.need("id"));
        tp.owner = child.need("pou");
        std::string kind = child.need("kind");
        if (kind == "block") tp.kind = TpKind::Block;
        else if (kind == "step") tp.kind = TpKind::Step;
        else throw ConsistencyError("bad trace-point kind '" + kind + "'");
        tp.loc.line = std::stoi(child.need("line"));
        tp.loc.col = std::stoi(child.need("col"));
        tp.loc.file = child.need("file");
        if (tp.id != expected++)
            throw ConsistencyError("trace-point ids are not dense/sorted at id " +
                                   std::to_string(tp.id));
        db.points.push_back(std::move(tp));
    }
    if (db.max_tp != expected - 1)
        throw ConsistencyError("max_tp does not match the point list");
    return db;
}

TracePointDatabase load_tp_database(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ConsistencyError("cannot read trace-point database: " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_tp_database(ss.str());
}

void verify_fingerprint(const TracePointDatabase& db, const SourceProject& instrumented) {
    std::string actual = project_fingerprint(instrumented);
    if (actual != db.fingerprint)
        throw ConsistencyError("fingerprint mismatch: database " + db.fingerprint +
                               ", sources " + actual);
}

} // namespace plccov
