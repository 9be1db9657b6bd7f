#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace graphdsl {

// 1-based source position; length in bytes.
struct SourceSpan {
    uint32_t line = 1;
    uint32_t column = 1;
    uint32_t length = 0;

    bool operator==(const SourceSpan&) const = default;
};

enum class Severity { Error, Warning, Note };

struct Diagnostic {
    Severity severity = Severity::Error;
    SourceSpan span;
    std::string message;

    std::string format(const std::string& file = "<input>", bool color = false) const;
};

// Thrown for user-facing errors (lexing, parsing, type checking, runtime).
// The CLI turns these into `file:line:col: error: message` lines, exit 1.
class CompileError : public std::runtime_error {
public:
    CompileError(std::string kind, SourceSpan span, const std::string& message)
        : std::runtime_error(message), kind_(std::move(kind)), span_(span) {}

    const std::string& kind() const { return kind_; }
    SourceSpan span() const { return span_; }

    Diagnostic diagnostic() const { return {Severity::Error, span_, std::string(what())}; }

private:
    std::string kind_;
    SourceSpan span_;
};

inline CompileError lexError(SourceSpan span, const std::string& msg) {
    return CompileError("LexError", span, msg);
}
inline CompileError parseError(SourceSpan span, const std::string& msg) {
    return CompileError("ParseError", span, msg);
}
inline CompileError typeError(SourceSpan span, const std::string& msg) {
    return CompileError("TypeError", span, msg);
}
inline CompileError runtimeError(SourceSpan span, const std::string& msg) {
    return CompileError("RuntimeError", span, msg);
}

}  // namespace graphdsl
