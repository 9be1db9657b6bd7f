#pragma once

#include <string>
#include <vector>

#include "graphdsl/codegen.hpp"

namespace graphdsl::codegen {

struct Violation {
    std::string code;     // e.g. "missing-h2d", "missing-atomic", "graph-copy-out"
    std::string message;
    std::string file;
    std::string symbol;
};

struct CheckReport {
    std::vector<Violation> violations;
    bool ok() const { return violations.empty(); }
};

// Token-level inspection of the emitted text against the analyses: transfer
// balance, kernel/host split, per-construct atomic/pragma idioms, flag-copy
// pairing inside convergence loops, and no device-to-host copies of the
// static graph arrays. Re-scans the text (rather than trusting metadata) so
// that text mutations are caught. Never throws.
CheckReport structuralCheck(const EmitUnit& unit, const sema::AnnotatedProgram& program,
                            const Analyses& analyses);

std::string formatReport(const CheckReport& report);

}  // namespace graphdsl::codegen
