#pragma once

#include <string>
#include <utility>
#include <vector>

#include "plccov/ast.hpp"

namespace plccov {

// Parses and name-resolves a project. Task declarations come from the project
// manifest; they are validated against the parsed POUs (entry exists and is a
// PROGRAM, unique priorities, positive cycle times).
//
// Throws ParseError on syntax errors, unresolved identifiers, duplicate
// declarations and recursion between POUs.
SourceProject parse_project(const std::vector<std::pair<std::string, std::string>>& sources,
                            const std::vector<TaskDecl>& tasks);

SourceProject parse_project(const std::vector<std::pair<std::string, std::string>>& sources);

// All POUs referenced by a statement list / expression, in encounter order
// (statement calls, expression calls, nested bodies). Used by the resolver's
// recursion check and by the dependency-model oracle tests.
void collect_call_targets(const std::vector<Stmt>& stmts, std::vector<std::string>& out);
void collect_call_targets(const Expr& e, std::vector<std::string>& out);

// Call targets of an entire POU: body, actions, SFC transition conditions.
std::vector<std::string> pou_call_targets(const PouDecl& pou);

} // namespace plccov
