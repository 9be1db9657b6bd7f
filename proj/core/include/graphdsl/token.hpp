#pragma once

#include <string>
#include <vector>

#include "graphdsl/diagnostics.hpp"

namespace graphdsl {

enum class TokenKind {
    Keyword,
    Identifier,
    IntLiteral,
    FloatLiteral,
    BoolLiteral,
    Operator,
    Punctuation,
    EndOfInput,
};

struct Token {
    TokenKind kind = TokenKind::EndOfInput;
    std::string lexeme;
    SourceSpan span;

    bool is(TokenKind k) const { return kind == k; }
    bool is(TokenKind k, const char* text) const { return kind == k && lexeme == text; }
    bool isKeyword(const char* kw) const { return is(TokenKind::Keyword, kw); }
    bool isOp(const char* op) const { return is(TokenKind::Operator, op); }
    bool isPunct(const char* p) const { return is(TokenKind::Punctuation, p); }
};

const char* tokenKindName(TokenKind kind);

// Tokenizes DSL source. Comments (`//` to end of line) are dropped; the
// stream always ends in an EndOfInput token. Throws CompileError("LexError")
// with a span on unrecognized bytes or malformed literals.
std::vector<Token> tokenize(const std::string& source);

}  // namespace graphdsl
