#pragma once

#include <string>

#include "graphdsl/ast.hpp"

namespace graphdsl {

// Prints an AST back to DSL source. parse(prettyPrint(parse(s))) is
// structurally identical to parse(s).
std::string prettyPrint(const ast::Program& program);
std::string prettyPrint(const ast::Expr& expr);

}  // namespace graphdsl
