#include "graphdsl/diagnostics.hpp"

#include <sstream>

namespace graphdsl {

std::string Diagnostic::format(const std::string& file, bool color) const {
    const char* sev = severity == Severity::Error     ? "error"
                      : severity == Severity::Warning ? "warning"
                                                      : "note";
    const char* col = severity == Severity::Error     ? "\033[31m"
                      : severity == Severity::Warning ? "\033[33m"
                                                      : "\033[36m";
    std::ostringstream os;
    os << file << ":" << span.line << ":" << span.column << ": ";
    if (color) os << col;
    os << sev;
    if (color) os << "\033[0m";
    os << ": " << message;
    return os.str();
}

}  // namespace graphdsl
