#include "graphdsl/token.hpp"

#include <array>
#include <cctype>
#include <string_view>
#include <unordered_set>

namespace graphdsl {

namespace {

const std::unordered_set<std::string_view> kKeywords = {
    "function",  "forall",     "for",          "in",    "fixedPoint", "until",
    "iterateInBFS", "iterateInReverse", "from", "if",   "else",       "return",
    "Min",       "Max",        "filter",       "int",   "long",       "float",
    "double",    "bool",       "node",         "edge",  "Graph",      "propNode",
    "propEdge",  "setNode",    "INF",
};

bool isIdentStart(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool isIdentChar(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool isDigit(char c) { return c >= '0' && c <= '9'; }

// Multi-char operators, longest first.
const std::array<std::string_view, 12> kMultiOps = {
    "&&=", "||=", "+=", "*=", "++", "&&", "||", "<=", ">=", "==", "!=", "->",
};

const std::string_view kSingleOps = "=<>!+-*/";
const std::string_view kPunct = "(){};,.:";

}  // namespace

const char* tokenKindName(TokenKind kind) {
    switch (kind) {
        case TokenKind::Keyword: return "keyword";
        case TokenKind::Identifier: return "identifier";
        case TokenKind::IntLiteral: return "integer literal";
        case TokenKind::FloatLiteral: return "float literal";
        case TokenKind::BoolLiteral: return "bool literal";
        case TokenKind::Operator: return "operator";
        case TokenKind::Punctuation: return "punctuation";
        case TokenKind::EndOfInput: return "end of input";
    }
    return "token";
}

std::vector<Token> tokenize(const std::string& source) {
    std::vector<Token> out;
    size_t i = 0;
    uint32_t line = 1, col = 1;

    auto advance = [&](size_t n) {
        for (size_t k = 0; k < n; ++k) {
            if (source[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
            ++i;
        }
    };

    auto push = [&](TokenKind kind, size_t start, size_t len, uint32_t l, uint32_t c) {
        out.push_back(Token{kind, source.substr(start, len), SourceSpan{l, c, static_cast<uint32_t>(len)}});
    };

    const size_t n = source.size();
    while (i < n) {
        char c = source[i];
        if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
            advance(1);
            continue;
        }
        if (c == '/' && i + 1 < n && source[i + 1] == '/') {
            while (i < n && source[i] != '\n') advance(1);
            continue;
        }

        const uint32_t tl = line, tc = col;
        const size_t start = i;

        if (isIdentStart(c)) {
            size_t len = 1;
            while (start + len < n && isIdentChar(source[start + len])) ++len;
            std::string_view word(source.data() + start, len);
            advance(len);
            if (word == "True" || word == "False") {
                push(TokenKind::BoolLiteral, start, len, tl, tc);
            } else if (kKeywords.count(word)) {
                push(TokenKind::Keyword, start, len, tl, tc);
            } else {
                push(TokenKind::Identifier, start, len, tl, tc);
            }
            continue;
        }

        if (isDigit(c)) {
            size_t len = 1;
            bool isFloat = false;
            while (start + len < n && isDigit(source[start + len])) ++len;
            if (start + len < n && source[start + len] == '.' && start + len + 1 < n &&
                isDigit(source[start + len + 1])) {
                isFloat = true;
                ++len;
                while (start + len < n && isDigit(source[start + len])) ++len;
            }
            if (start + len < n && (source[start + len] == 'e' || source[start + len] == 'E')) {
                size_t e = len + 1;
                if (start + e < n && (source[start + e] == '+' || source[start + e] == '-')) ++e;
                if (start + e < n && isDigit(source[start + e])) {
                    isFloat = true;
                    len = e;
                    while (start + len < n && isDigit(source[start + len])) ++len;
                } else {
                    advance(len);
                    throw lexError({tl, tc, static_cast<uint32_t>(len + 1)},
                                   "malformed numeric literal: exponent has no digits");
                }
            }
            if (start + len < n && isIdentStart(source[start + len])) {
                throw lexError({tl, tc, static_cast<uint32_t>(len + 1)},
                               "malformed numeric literal: unexpected character '" +
                                   std::string(1, source[start + len]) + "'");
            }
            advance(len);
            push(isFloat ? TokenKind::FloatLiteral : TokenKind::IntLiteral, start, len, tl, tc);
            continue;
        }

        bool matched = false;
        for (std::string_view op : kMultiOps) {
            if (source.compare(start, op.size(), op) == 0) {
                advance(op.size());
                push(TokenKind::Operator, start, op.size(), tl, tc);
                matched = true;
                break;
            }
        }
        if (matched) continue;

        if (kSingleOps.find(c) != std::string_view::npos) {
            advance(1);
            push(TokenKind::Operator, start, 1, tl, tc);
            continue;
        }
        if (kPunct.find(c) != std::string_view::npos) {
            advance(1);
            push(TokenKind::Punctuation, start, 1, tl, tc);
            continue;
        }

        throw lexError({tl, tc, 1}, "unrecognized character '" +
                                        (std::isprint(static_cast<unsigned char>(c))
                                             ? std::string(1, c)
                                             : "\\x" + std::to_string(static_cast<unsigned char>(c))) +
                                        "'");
    }

    out.push_back(Token{TokenKind::EndOfInput, "", SourceSpan{line, col, 0}});
    return out;
}

}  // namespace graphdsl
