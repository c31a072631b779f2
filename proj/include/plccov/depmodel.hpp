#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "plccov/ast.hpp"

namespace plccov {

enum class NodeKind { Project, Task, Pou, Action, Step, BasicBlock };

const char* node_kind_name(NodeKind k);

struct DepNode {
    int id = 0;
    NodeKind kind = NodeKind::Project;
    std::string name;      // qualified: Pou, Pou.action, Pou.step, <container>#<seq>
    std::string container; // owning POU or POU.action (BasicBlock/Step/Action)
    int sequential_id = -1; // BasicBlock only
    SourceLoc loc;          // BasicBlock: first statement; others: declaration
    int stmt_count = 0;     // BasicBlock only
    std::vector<uint32_t> stmt_uids; // BasicBlock: statements attributed to the block
    std::vector<int> stmt_lines;     // BasicBlock: source lines of those statements
};

enum class EdgeKind { Contains, Calls, JumpsTo, SfcTransition };

const char* edge_kind_name(EdgeKind k);

struct DepEdge {
    int source = 0;
    int target = 0;
    EdgeKind kind = EdgeKind::Contains;
    std::string condition; // JumpsTo / SfcTransition; may be empty (unconditional)
};

struct DependencyModel {
    std::vector<DepNode> nodes;
    std::vector<DepEdge> edges;
    std::vector<int> roots; // Task nodes

    const DepNode& node(int id) const { return nodes[static_cast<size_t>(id)]; }

    std::vector<int> contains_children(int id) const;
    std::vector<int> contains_parents(int id) const;
    const DepNode* find_by_name(NodeKind kind, const std::string& name) const;

    // Entry node of a POU for Calls edges: first body block, or the initial
    // step for SFC bodies, or the Pou node itself when the body is empty.
    int entry_node(const std::string& pou_name) const;
};

// Builds the dependency model: tasks are the exploration roots, POUs never
// called from a task entry are omitted, every reachable statement lands in
// exactly one sequentially numbered basic block.
DependencyModel build_model(const SourceProject& project);

// Blocks ordered by sequential_id.
std::vector<const DepNode*> basic_blocks(const DependencyModel& model);

std::set<std::string> reachable_pous(const DependencyModel& model);

// Debug DOT export: node label = name + sequential id, edge label = condition.
std::string to_dot(const DependencyModel& model);

} // namespace plccov
