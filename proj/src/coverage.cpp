#include "plccov/coverage.hpp"

#include <algorithm>
#include <fstream>

#include "json.hpp"

#include "plccov/errors.hpp"
#include "plccov/printer.hpp"
#include "plccov/xml.hpp"

namespace plccov {

const char* coverage_status_name(CoverageStatus s) {
    switch (s) {
    case CoverageStatus::Uncovered: return "uncovered";
    case CoverageStatus::Partial: return "partial";
    case CoverageStatus::Covered: return "covered";
    }
    return "?";
}

std::vector<bool> VisitMatrix::column_or() const {
    int max_id = points.empty() ? -1 : points.back();
    std::vector<bool> out(static_cast<size_t>(max_id + 1), false);
    for (size_t t = 0; t < visited.size(); ++t)
        for (size_t p = 0; p < points.size(); ++p)
            if (visited[t][p]) out[static_cast<size_t>(points[p])] = true;
    return out;
}

bool operator==(const CoverageReport& a, const CoverageReport& b) {
    auto findings_equal = [](const std::vector<Finding>& x, const std::vector<Finding>& y) {
        if (x.size() != y.size()) return false;
        for (size_t i = 0; i < x.size(); ++i)
            if (x[i].node != y[i].node || x[i].kind != y[i].kind || x[i].name != y[i].name ||
                !(x[i].loc == y[i].loc))
                return false;
        return true;
    };
    return a.status == b.status && findings_equal(a.untested, b.untested) &&
           a.totals == b.totals && a.per_test_counts == b.per_test_counts &&
           a.points_total == b.points_total && a.points_visited == b.points_visited &&
           a.fingerprint == b.fingerprint;
}

VisitMatrix superimpose(const std::vector<ExecutionTrace>& traces,
                        const TracePointDatabase& db) {
    VisitMatrix m;
    for (const TracePoint& tp : db.points) m.points.push_back(tp.id);
    std::set<std::string> ids;
    for (const ExecutionTrace& t : traces) {
        if (!ids.insert(t.test_id).second)
            throw ConsistencyError("duplicate test id '" + t.test_id + "' in trace set");
        if (static_cast<int>(t.visits.size()) != db.point_count())
            throw ConsistencyError("trace '" + t.test_id + "' does not match the database");
        m.tests.push_back(t.test_id);
        std::vector<bool> row;
        row.reserve(m.points.size());
        for (int id : m.points) {
            auto it = t.visits.find(id);
            if (it == t.visits.end())
                throw ConsistencyError("trace '" + t.test_id + "' is missing id " +
                                       std::to_string(id));
            row.push_back(it->second);
        }
        m.visited.push_back(std::move(row));
    }
    return m;
}

bool was_visited(const VisitMatrix& matrix, int point_id) {
    size_t col = 0;
    bool found = false;
    for (size_t p = 0; p < matrix.points.size(); ++p)
        if (matrix.points[p] == point_id) {
            col = p;
            found = true;
        }
    if (!found) throw ConsistencyError("unknown trace point id " + std::to_string(point_id));
    for (const auto& row : matrix.visited)
        if (row[col]) return true;
    return false;
}

namespace {

struct RollupContext {
    const DependencyModel& model;
    std::vector<std::vector<int>> children;    // contains adjacency
    std::vector<std::vector<int>> node_points; // directly attributed point ids
    std::vector<bool> point_visited;           // by point id
    std::vector<std::pair<int, int>> memo;     // node -> (visited, total), -1 = unset

    RollupContext(const DependencyModel& m, const VisitMatrix& matrix,
                  const TracePointDatabase& db)
        : model(m) {
        size_t n = m.nodes.size();
        children.resize(n);
        node_points.resize(n);
        memo.assign(n, {-1, -1});
        for (const DepEdge& e : m.edges)
            if (e.kind == EdgeKind::Contains)
                children[static_cast<size_t>(e.source)].push_back(e.target);
        point_visited = matrix.column_or();
        point_visited.resize(static_cast<size_t>(db.max_tp + 1), false);
        for (const TracePoint& tp : db.points) {
            if (tp.node_ref < 0 || tp.node_ref >= static_cast<int>(n))
                throw ConsistencyError(
                    "trace-point database carries no model references; rebuild it from the "
                    "sources");
            NodeKind k = m.node(tp.node_ref).kind;
            if ((tp.kind == TpKind::Block && k != NodeKind::BasicBlock) ||
                (tp.kind == TpKind::Step && k != NodeKind::Step))
                throw ConsistencyError("trace point " + std::to_string(tp.id) +
                                       " does not match the model");
            node_points[static_cast<size_t>(tp.node_ref)].push_back(tp.id);
        }
    }

    std::pair<int, int> count(int node) {
        auto& slot = memo[static_cast<size_t>(node)];
        if (slot.first >= 0) return slot;
        int vis = 0, tot = 0;
        for (int p : node_points[static_cast<size_t>(node)]) {
            ++tot;
            if (point_visited[static_cast<size_t>(p)]) ++vis;
        }
        for (int c : children[static_cast<size_t>(node)]) {
            auto [v, t] = count(c);
            vis += v;
            tot += t;
        }
        slot = {vis, tot};
        return slot;
    }

    CoverageStatus status(int node) {
        auto [vis, tot] = count(node);
        if (tot == 0 || vis == tot) return CoverageStatus::Covered;
        if (vis == 0) return CoverageStatus::Uncovered;
        return CoverageStatus::Partial;
    }
};

void sort_findings(std::vector<Finding>& findings) {
    std::stable_sort(findings.begin(), findings.end(), [](const Finding& a, const Finding& b) {
        if (a.loc.file != b.loc.file) return a.loc.file < b.loc.file;
        if (a.loc.line != b.loc.line) return a.loc.line < b.loc.line;
        return a.name < b.name;
    });
}

} // namespace

CoverageReport rollup(const DependencyModel& model, const VisitMatrix& matrix,
                      const TracePointDatabase& db) {
    RollupContext ctx(model, matrix, db);
    CoverageReport report;
    report.fingerprint = db.fingerprint;
    report.points_total = db.point_count();
    for (bool v : ctx.point_visited)
        if (v) ++report.points_visited;

    for (const DepNode& n : model.nodes) {
        CoverageStatus s = ctx.status(n.id);
        report.status[n.id] = s;
        ++report.totals[node_kind_name(n.kind)][coverage_status_name(s)];
    }

    // Maximal uncovered subtrees: an Uncovered node with no Uncovered parent.
    std::vector<std::vector<int>> parents(model.nodes.size());
    for (const DepEdge& e : model.edges)
        if (e.kind == EdgeKind::Contains)
            parents[static_cast<size_t>(e.target)].push_back(e.source);
    for (const DepNode& n : model.nodes) {
        if (report.status[n.id] != CoverageStatus::Uncovered) continue;
        bool subsumed = false;
        for (int p : parents[static_cast<size_t>(n.id)])
            if (report.status[p] == CoverageStatus::Uncovered) subsumed = true;
        if (subsumed) continue;
        report.untested.push_back({n.id, n.kind, n.name, n.loc});
    }
    sort_findings(report.untested);

    for (size_t t = 0; t < matrix.tests.size(); ++t) {
        int count = 0;
        for (bool v : matrix.visited[t])
            if (v) ++count;
        report.per_test_counts[matrix.tests[t]] = count;
    }
    return report;
}

std::vector<Finding> find_untested(const CoverageReport& report, const DependencyModel& model,
                                   const std::set<NodeKind>& kinds) {
    if (kinds.empty()) return report.untested;
    std::vector<Finding> out;
    for (const DepNode& n : model.nodes) {
        if (!kinds.count(n.kind)) continue;
        auto it = report.status.find(n.id);
        if (it == report.status.end() || it->second != CoverageStatus::Uncovered) continue;
        out.push_back({n.id, n.kind, n.name, n.loc});
    }
    sort_findings(out);
    return out;
}

bool transition_traversed(const DependencyModel& model, const TracePointDatabase& db,
                          const VisitMatrix& matrix, const DepEdge& edge) {
    if (edge.kind != EdgeKind::SfcTransition) return false;
    for (const TracePoint& tp : db.points)
        if (tp.kind == TpKind::Step && tp.node_ref == edge.target)
            return was_visited(matrix, tp.id);
    (void)model;
    return false;
}

// ---- emitters -----------------------------------------------------------------

std::string report_to_text(const CoverageReport& report, const DependencyModel& model) {
    std::string out;
    if (report.untested.empty()) {
        out += "No untested code found.\n";
    } else {
        out += "Untested code (" + std::to_string(report.untested.size()) + " findings):\n";
        for (const Finding& f : report.untested) {
            out += "  [" + std::string(node_kind_name(f.kind)) + "] " + f.name;
            if (f.loc.valid()) out += "  (" + f.loc.str() + ")";
            out += "\n";
        }
    }
    out += "\nStatus by kind:\n";
    for (const auto& [kind, counts] : report.totals) {
        out += "  " + kind + ":";
        for (const auto& [status, n] : counts) out += " " + status + "=" + std::to_string(n);
        out += "\n";
    }
    out += "\nPer-test visited points:\n";
    for (const auto& [test, n] : report.per_test_counts)
        out += "  " + test + ": " + std::to_string(n) + "\n";
    (void)model;
    return out;
}

namespace {

const char* dot_fill(CoverageStatus s) {
    switch (s) {
    case CoverageStatus::Uncovered: return "firebrick";
    case CoverageStatus::Partial: return "gold";
    case CoverageStatus::Covered: return "lightgrey";
    }
    return "white";
}

std::string html_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        default: out += c;
        }
    }
    return out;
}

} // namespace

std::string report_to_dot(const CoverageReport& report, const DependencyModel& model) {
    std::string out = "digraph coverage {\n    rankdir=LR;\n    node [shape=box];\n";
    for (const DepNode& n : model.nodes) {
        if (n.kind == NodeKind::Task)
            out += "    n" + std::to_string(n.id) + " [label=\"" + n.name +
                   "\", shape=septagon];\n";
        if (n.kind != NodeKind::Pou) continue;
        CoverageStatus s = report.status.at(n.id);
        out += "    n" + std::to_string(n.id) + " [label=\"" + n.name + "\", style=filled, " +
               "fillcolor=" + dot_fill(s) + "];\n";
    }
    // Task -> entry POU edges, then POU-level call edges derived from the
    // block-level Calls edges.
    std::set<std::pair<int, int>> seen;
    std::vector<std::pair<int, int>> call_edges;
    auto pou_of = [&](int node) -> int {
        int cur = node;
        for (;;) {
            const DepNode& n = model.node(cur);
            if (n.kind == NodeKind::Pou) return cur;
            auto ps = model.contains_parents(cur);
            if (ps.empty()) return -1;
            cur = ps[0];
        }
    };
    for (const DepEdge& e : model.edges) {
        if (e.kind == EdgeKind::Contains && model.node(e.source).kind == NodeKind::Task) {
            if (seen.insert({e.source, e.target}).second) call_edges.push_back({e.source, e.target});
        }
        if (e.kind != EdgeKind::Calls) continue;
        int src = pou_of(e.source);
        int tgt = pou_of(e.target);
        if (src >= 0 && tgt >= 0 && seen.insert({src, tgt}).second)
            call_edges.push_back({src, tgt});
    }
    for (auto [s, t] : call_edges)
        out += "    n" + std::to_string(s) + " -> n" + std::to_string(t) + ";\n";
    out += "}\n";
    return out;
}

std::string report_to_html(const CoverageReport& report, const DependencyModel& model,
                           const SourceProject& project, const TracePointDatabase& db,
                           const VisitMatrix& matrix) {
    std::vector<bool> visited = matrix.column_or();
    visited.resize(static_cast<size_t>(db.max_tp + 1), false);

    std::string out = "<!DOCTYPE html>\n<html>\n<head>\n<meta charset=\"utf-8\">\n"
                      "<title>Coverage report</title>\n<style>\n"
                      "body { font-family: sans-serif; }\n"
                      "pre { border: 1px solid #ccc; padding: 8px; }\n"
                      ".unc { background: #f5b7b1; }\n"
                      ".badge { padding: 2px 6px; border-radius: 4px; color: #fff; }\n"
                      ".b-uncovered { background: #b03a2e; }\n"
                      ".b-partial { background: #b7950b; }\n"
                      ".b-covered { background: #95a5a6; }\n"
                      "</style>\n</head>\n<body>\n<h1>Coverage report</h1>\n";
    out += "<p>" + std::to_string(report.points_visited) + " of " +
           std::to_string(report.points_total) + " trace points visited.</p>\n";

    if (!report.untested.empty()) {
        out += "<h2>Untested code</h2>\n<ul>\n";
        for (const Finding& f : report.untested) {
            out += "<li><b>" + html_escape(f.name) + "</b> (" + node_kind_name(f.kind);
            if (f.loc.valid()) out += ", " + html_escape(f.loc.str());
            out += ")</li>\n";
        }
        out += "</ul>\n";
    }

    std::map<std::string, std::vector<std::string>> file_lines;
    for (const auto& [path, text] : project.files) {
        std::vector<std::string> lines;
        std::string cur;
        for (char c : text) {
            if (c == '\n') {
                lines.push_back(cur);
                cur.clear();
            } else {
                cur += c;
            }
        }
        if (!cur.empty()) lines.push_back(cur);
        file_lines[path] = std::move(lines);
    }

    for (const DepNode& pou : model.nodes) {
        if (pou.kind != NodeKind::Pou) continue;
        CoverageStatus s = report.status.at(pou.id);
        out += "<h2>" + html_escape(pou.name) + " <span class=\"badge b-" +
               coverage_status_name(s) + "\">" + coverage_status_name(s) + "</span></h2>\n";

        // SFC view: steps and transitions with their statuses.
        bool is_sfc = false;
        for (int child : model.contains_children(pou.id))
            if (model.node(child).kind == NodeKind::Step) is_sfc = true;
        if (is_sfc) {
            out += "<h3>Steps</h3>\n<ul>\n";
            for (int child : model.contains_children(pou.id)) {
                const DepNode& n = model.node(child);
                if (n.kind != NodeKind::Step) continue;
                CoverageStatus ss = report.status.at(n.id);
                out += "<li>" + html_escape(n.name) + " <span class=\"badge b-" +
                       coverage_status_name(ss) + "\">" + coverage_status_name(ss) +
                       "</span></li>\n";
            }
            out += "</ul>\n<h3>Transitions</h3>\n<ul>\n";
            for (const DepEdge& e : model.edges) {
                if (e.kind != EdgeKind::SfcTransition) continue;
                if (model.node(e.source).container != pou.name) continue;
                bool traversed = transition_traversed(model, db, matrix, e);
                out += "<li>" + html_escape(model.node(e.source).name) + " &rarr; " +
                       html_escape(model.node(e.target).name) + " [" +
                       html_escape(e.condition) + "] " +
                       (traversed ? "traversed" : "<b>never traversed</b>") + "</li>\n";
            }
            out += "</ul>\n";
        }

        // Source with uncovered block lines highlighted, grouped by file.
        std::map<std::string, std::set<int>> unc_lines;
        std::map<std::string, std::pair<int, int>> span; // file -> min/max line
        auto note_block = [&](const DepNode& blk) {
            bool vis = visited[static_cast<size_t>(blk.sequential_id)];
            for (int line : blk.stmt_lines) {
                auto& sp = span[blk.loc.file];
                if (sp.first == 0 || line < sp.first) sp.first = line;
                if (line > sp.second) sp.second = line;
                if (!vis) unc_lines[blk.loc.file].insert(line);
            }
        };
        for (int child : model.contains_children(pou.id)) {
            const DepNode& n = model.node(child);
            if (n.kind == NodeKind::BasicBlock) note_block(n);
            if (n.kind == NodeKind::Action || n.kind == NodeKind::Step)
                for (int sub : model.contains_children(n.id)) {
                    const DepNode& m2 = model.node(sub);
                    if (m2.kind == NodeKind::BasicBlock) note_block(m2);
                    if (m2.kind == NodeKind::Action)
                        for (int b : model.contains_children(m2.id))
                            if (model.node(b).kind == NodeKind::BasicBlock)
                                note_block(model.node(b));
                }
        }
        for (const auto& [file, sp] : span) {
            auto it = file_lines.find(file);
            if (it == file_lines.end()) continue;
            out += "<h3>" + html_escape(file) + "</h3>\n<pre>\n";
            for (int line = sp.first; line <= sp.second && line <= static_cast<int>(it->second.size());
                 ++line) {
                const std::string& text = it->second[static_cast<size_t>(line - 1)];
                bool unc = unc_lines[file].count(line) > 0;
                out += (unc ? "<span class=\"unc\">" : "") + std::to_string(line) + "  " +
                       html_escape(text) + (unc ? "</span>" : "") + "\n";
            }
            out += "</pre>\n";
        }
    }
    out += "</body>\n</html>\n";
    return out;
}

std::string report_to_json(const CoverageReport& report, const DependencyModel& model) {
    nlohmann::json j;
    j["fingerprint"] = report.fingerprint;
    j["points_total"] = report.points_total;
    j["points_visited"] = report.points_visited;
    j["percent_visited"] = report.points_total == 0
                               ? 100.0
                               : 100.0 * report.points_visited / report.points_total;
    j["nodes"] = nlohmann::json::array();
    for (const DepNode& n : model.nodes) {
        nlohmann::json node;
        node["id"] = n.id;
        node["kind"] = node_kind_name(n.kind);
        node["name"] = n.name;
        node["status"] = coverage_status_name(report.status.at(n.id));
        if (n.kind == NodeKind::BasicBlock) node["sequential_id"] = n.sequential_id;
        if (n.loc.valid()) {
            node["file"] = n.loc.file;
            node["line"] = n.loc.line;
            node["col"] = n.loc.col;
        }
        j["nodes"].push_back(std::move(node));
    }
    j["untested"] = nlohmann::json::array();
    for (const Finding& f : report.untested) {
        nlohmann::json finding;
        finding["node"] = f.node;
        finding["kind"] = node_kind_name(f.kind);
        finding["name"] = f.name;
        if (f.loc.valid()) {
            finding["file"] = f.loc.file;
            finding["line"] = f.loc.line;
            finding["col"] = f.loc.col;
        }
        j["untested"].push_back(std::move(finding));
    }
    j["totals"] = report.totals;
    j["per_test_counts"] = report.per_test_counts;
    return j.dump(2) + "\n";
}

namespace {

NodeKind kind_from_name(const std::string& name) {
    if (name == "project") return NodeKind::Project;
    if (name == "task") return NodeKind::Task;
    if (name == "pou") return NodeKind::Pou;
    if (name == "action") return NodeKind::Action;
    if (name == "step") return NodeKind::Step;
    if (name == "block") return NodeKind::BasicBlock;
    throw ConsistencyError("bad node kind '" + name + "'");
}

CoverageStatus status_from_name(const std::string& name) {
    if (name == "uncovered") return CoverageStatus::Uncovered;
    if (name == "partial") return CoverageStatus::Partial;
    if (name == "covered") return CoverageStatus::Covered;
    throw ConsistencyError("bad status '" + name + "'");
}

} // namespace

CoverageReport report_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    CoverageReport report;
    report.fingerprint = j.at("fingerprint").get<std::string>();
    report.points_total = j.at("points_total").get<int>();
    report.points_visited = j.at("points_visited").get<int>();
    for (const auto& node : j.at("nodes"))
        report.status[node.at("id").get<int>()] =
            status_from_name(node.at("status").get<std::string>());
    for (const auto& f : j.at("untested")) {
        Finding finding;
        finding.node = f.at("node").get<int>();
        finding.kind = kind_from_name(f.at("kind").get<std::string>());
        finding.name = f.at("name").get<std::string>();
        if (f.contains("file")) {
            finding.loc.file = f.at("file").get<std::string>();
            finding.loc.line = f.at("line").get<int>();
            finding.loc.col = f.at("col").get<int>();
        }
        report.untested.push_back(std::move(finding));
    }
    report.totals =
        j.at("totals").get<std::map<std::string, std::map<std::string, int>>>();
    report.per_test_counts = j.at("per_test_counts").get<std::map<std::string, int>>();
    return report;
}

void emit_report(const CoverageReport& report, const DependencyModel& model,
                 const SourceProject& project, const TracePointDatabase& db,
                 const VisitMatrix& matrix, ReportFormat format, const std::string& path) {
    std::string text;
    switch (format) {
    case ReportFormat::Text: text = report_to_text(report, model); break;
    case ReportFormat::Dot: text = report_to_dot(report, model); break;
    case ReportFormat::Html: text = report_to_html(report, model, project, db, matrix); break;
    case ReportFormat::Json: text = report_to_json(report, model); break;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConsistencyError("cannot write report: " + path);
    f << text;
}

} // namespace plccov
