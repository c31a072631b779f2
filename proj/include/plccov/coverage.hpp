#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "plccov/depmodel.hpp"
#include "plccov/instrument.hpp"
#include "plccov/testkit.hpp"

namespace plccov {

struct VisitMatrix {
    std::vector<std::string> tests;
    std::vector<int> points; // ascending trace-point ids
    std::vector<std::vector<bool>> visited; // [test][point]

    // OR over all tests per point, indexed by point id.
    std::vector<bool> column_or() const;
};

enum class CoverageStatus { Uncovered, Partial, Covered };

const char* coverage_status_name(CoverageStatus s);

struct Finding {
    int node = -1;
    NodeKind kind = NodeKind::Pou;
    std::string name;
    SourceLoc loc;
};

struct CoverageReport {
    std::map<int, CoverageStatus> status; // per dependency-model node
    std::vector<Finding> untested;        // maximal uncovered subtrees, by file/line
    // kind -> status -> count
    std::map<std::string, std::map<std::string, int>> totals;
    std::map<std::string, int> per_test_counts;
    int points_total = 0;
    int points_visited = 0;
    std::string fingerprint;
};

bool operator==(const CoverageReport& a, const CoverageReport& b);

// OR-superimposition of per-test visit vectors into a matrix.
// Errors: trace id set differing from the database, duplicate test ids.
VisitMatrix superimpose(const std::vector<ExecutionTrace>& traces, const TracePointDatabase& db);

bool was_visited(const VisitMatrix& matrix, int point_id);

// Hierarchical status: a leaf point is Covered iff visited; an internal node
// is Covered iff all descendant points are, Uncovered iff none, else Partial.
// Nodes without any descendant point count as Covered (nothing to test).
CoverageReport rollup(const DependencyModel& model, const VisitMatrix& matrix,
                      const TracePointDatabase& db);

// Uncovered nodes filtered by kind, ordered by file/line. An empty filter
// returns the maximal uncovered subtrees from the report.
std::vector<Finding> find_untested(const CoverageReport& report, const DependencyModel& model,
                                   const std::set<NodeKind>& kinds = {});

// Derived SFC transition coverage: traversed iff the target step's activation
// point was visited in some test.
bool transition_traversed(const DependencyModel& model, const TracePointDatabase& db,
                          const VisitMatrix& matrix, const DepEdge& edge);

enum class ReportFormat { Text, Dot, Html, Json };

std::string report_to_text(const CoverageReport& report, const DependencyModel& model);
// POU-level call graph; uncovered dark red, partial yellow, covered light.
std::string report_to_dot(const CoverageReport& report, const DependencyModel& model);
std::string report_to_html(const CoverageReport& report, const DependencyModel& model,
                           const SourceProject& project, const TracePointDatabase& db,
                           const VisitMatrix& matrix);
std::string report_to_json(const CoverageReport& report, const DependencyModel& model);

void emit_report(const CoverageReport& report, const DependencyModel& model,
                 const SourceProject& project, const TracePointDatabase& db,
                 const VisitMatrix& matrix, ReportFormat format, const std::string& path);

// Inverse of report_to_json, for consumers of the machine-readable report.
CoverageReport report_from_json(const std::string& text);

} // namespace plccov
