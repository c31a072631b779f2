#pragma once

#include <string>
#include <utility>
#include <vector>

#include "plccov/ast.hpp"
#include "plccov/depmodel.hpp"

namespace plccov {

enum class TpKind { Block, Step };

struct TracePoint {
    int id = 0;               // block points carry the block's sequential_id
    std::string owner;        // qualified owner: Pou, Pou.action or Pou.step
    TpKind kind = TpKind::Block;
    SourceLoc loc;            // block: first statement; step: step declaration
    int node_ref = -1;        // dependency-model node id; not serialized
};

// Names of the generated tracing POUs and the trace array. Defaults follow
// the runtime interface (tpa / tpr / tp_reset / tp_save); a numeric suffix is
// appended when a user identifier collides.
struct TraceNames {
    std::string array = "tpa";
    std::string record = "tpr";
    std::string reset = "tp_reset";
    std::string save = "tp_save";

    bool is_default() const {
        return array == "tpa" && record == "tpr" && reset == "tp_reset" && save == "tp_save";
    }
};

struct TracePointDatabase {
    std::vector<TracePoint> points; // sorted by id
    int max_tp = -1;
    std::string fingerprint; // content hash of the instrumented sources
    TraceNames names;

    int point_count() const { return static_cast<int>(points.size()); }
};

bool operator==(const TracePointDatabase& a, const TracePointDatabase& b);

struct InstrumentedProject {
    SourceProject base; // transformed sources including the generated declarations
    TraceNames names;
};

// Inserts one trace-point call at the start of every basic block, a synthetic
// P1 activation action on every SFC step, and the tracing declarations; emits
// the trace-point database. Rejects already-instrumented projects.
std::pair<InstrumentedProject, TracePointDatabase> instrument(const SourceProject& project,
                                                              const DependencyModel& model);

// Inverse transformation: removing every generated call, action and
// declaration restores the original AST.
SourceProject strip_instrumentation(const SourceProject& instrumented, const TraceNames& names);

std::string tp_database_text(const TracePointDatabase& db);
void emit_tp_database(const TracePointDatabase& db, const std::string& path);

TracePointDatabase parse_tp_database(const std::string& text);
TracePointDatabase load_tp_database(const std::string& path);

// Throws ConsistencyError when the database fingerprint does not match the
// given instrumented sources.
void verify_fingerprint(const TracePointDatabase& db, const SourceProject& instrumented);

// FNV-1a content hash over the pretty-printed sources, 16 hex digits.
std::string project_fingerprint(const SourceProject& project);

} // namespace plccov
