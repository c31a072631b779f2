#pragma once

#include <string>
#include <utility>
#include <vector>

#include "plccov/ast.hpp"

namespace plccov {

// Canonical source text for an expression: minimal parentheses, spaced
// operators. Also used for JumpsTo / SfcTransition edge condition labels.
std::string expr_text(const Expr& e);

std::string const_text(const Const& c);

std::string stmt_text(const Stmt& s, int indent);

std::string pou_text(const PouDecl& pou);

// Re-emits the project as canonical source, grouped by originating file (decl
// locations name the file). Output reparses to a structurally identical AST.
std::vector<std::pair<std::string, std::string>> pretty_print(const SourceProject& project);

} // namespace plccov
