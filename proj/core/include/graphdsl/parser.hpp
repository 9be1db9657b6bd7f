#pragma once

#include <string>
#include <vector>

#include "graphdsl/ast.hpp"
#include "graphdsl/token.hpp"

namespace graphdsl {

// Recursive-descent parser for the DSL. The accepted grammar is documented in
// docs/grammar.md. Throws CompileError("ParseError") with a span and the
// expected-token set on malformed input; iterateInReverse outside an
// iterateInBFS body is rejected here as a structural error.
ast::Program parse(const std::vector<Token>& tokens);

// Convenience: tokenize + parse.
ast::Program parseSource(const std::string& source);

}  // namespace graphdsl
