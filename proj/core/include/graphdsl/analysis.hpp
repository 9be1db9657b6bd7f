#pragma once

#include <set>
#include <string>
#include <vector>

#include "graphdsl/sema.hpp"

namespace graphdsl::sema {

enum class RegionKind { ForAll, BfsForward, BfsReverse };

const char* regionKindName(RegionKind kind);

// Named CSR arrays a kernel may need.
enum class GraphArray { Offsets, Dests, Weights, RevOffsets, RevSrcs, RevEid };

const char* graphArrayName(GraphArray a);

using SymbolSet = std::set<int>;  // ordered -> deterministic reports

// One accelerator-side execution region (an outermost parallel forall, a BFS
// forward pass, or a BFS reverse pass). Inner foralls serialize inside the
// region and do not get their own entry.
struct RegionInfo {
    int id = -1;
    RegionKind kind = RegionKind::ForAll;
    const ast::Stmt* stmt = nullptr;
    SourceSpan span;
    SymbolSet reads;        // non-local symbols read on the device
    SymbolSet writes;       // non-local symbols written on the device
    SymbolSet copyIn;       // host -> device before the region
    SymbolSet copyOut;      // device -> host after the region
    SymbolSet deviceOnly;   // declarations local to the region
    std::set<GraphArray> graphArrays;
    SymbolSet scalarParams;  // read-only scalars passed by value at launch
    int enclosingFixedPoint = -1;  // index into fixedPoints, -1 = none
    int scopeId = -1;
};

// Consecutive regions with no intervening host statement that touches their
// transferred data share one transfer scope: data is moved once for the whole
// run of regions.
struct TransferScope {
    int id = -1;
    std::vector<int> regions;
    SymbolSet copyIn;
    SymbolSet copyOut;
    std::set<GraphArray> graphArrays;
};

struct ReductionInfo {
    int targetSymbol = -1;
    ast::ReduceOp op = ast::ReduceOp::Sum;
    int regionId = -1;
    bool isFixedPointFlag = false;  // write fused into the convergence flag
    bool targetIsRegionLocal = false;  // accumulator lives inside the region
    SourceSpan span;
};

struct FixedPointInfo {
    const ast::Stmt* stmt = nullptr;
    int flagSymbol = -1;
    int propertySymbol = -1;
    bool convergedWhenAllFalse = true;  // polarity of the convergence expression
    std::vector<SourceSpan> fusedUpdateSites;
    // The OR-reduction memory optimization: when the convergence property is
    // never read, a single device flag replaces the whole per-node array.
    bool flagOnly = false;
    std::vector<int> regionIds;  // parallel regions inside the loop body
};

struct TransferAnalysis {
    std::vector<RegionInfo> regions;
    std::vector<TransferScope> scopes;
    std::vector<FixedPointInfo> fixedPoints;

    const RegionInfo* regionForStmt(const ast::Stmt* s) const {
        for (const auto& r : regions)
            if (r.stmt == s) return &r;
        return nullptr;
    }
};

// Runs the transfer-set analysis: region discovery, per-region def/use at
// array granularity, copy-in/copy-out/device-only classification, and
// consecutive-region merging. Total; never fails on a type-checked program.
// Region ids are recorded back into the AST statements (idempotent).
TransferAnalysis analyzeTransfers(AnnotatedProgram& program);

// Reports every reduction assignment inside a parallel region plus the
// fused convergence-flag writes of each fixedPoint.
std::vector<ReductionInfo> detectReductions(const AnnotatedProgram& program,
                                            const TransferAnalysis& transfers);

// Deterministic line-oriented report of both analyses (the `analyze`
// subcommand and `--emit-analysis` output; golden-tested).
std::string formatAnalysisReport(const AnnotatedProgram& program, const TransferAnalysis& transfers,
                                 const std::vector<ReductionInfo>& reductions);

}  // namespace graphdsl::sema
