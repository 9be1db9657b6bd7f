#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "graphdsl/analysis.hpp"
#include "graphdsl/csr.hpp"
#include "graphdsl/sema.hpp"

namespace graphdsl::interp {

struct Value {
    enum class Kind { Int, Float, Bool };
    Kind kind = Kind::Int;
    int64_t i = 0;
    double f = 0.0;
    bool b = false;

    static Value ofInt(int64_t v) { return {Kind::Int, v, 0.0, false}; }
    static Value ofFloat(double v) { return {Kind::Float, 0, v, false}; }
    static Value ofBool(bool v) { return {Kind::Bool, 0, 0.0, v}; }

    double asFloat() const { return kind == Kind::Float ? f : static_cast<double>(i); }
    int64_t asInt() const { return kind == Kind::Int ? i : static_cast<int64_t>(f); }
    bool asBool() const { return b; }
};

std::string formatValue(const Value& v);

// Node property arrays and shared scalars, keyed by symbol id. Arrays always
// have length n and are created once, at the declaration or parameter
// binding.
struct PropArray {
    ast::TypeKind elem = ast::TypeKind::Int;
    std::vector<int64_t> ints;
    std::vector<double> floats;
    std::vector<uint8_t> bools;

    size_t size() const {
        return elem == ast::TypeKind::Bool    ? bools.size()
               : elem == ast::TypeKind::Float || elem == ast::TypeKind::Double ? floats.size()
                                                                               : ints.size();
    }
};

struct ScalarCell {
    ast::TypeKind type = ast::TypeKind::Int;
    int64_t i = 0;
    double f = 0.0;
    uint8_t b = 0;

    Value load() const;
    void store(const Value& v);
};

using ArgValue = std::variant<int64_t, double, bool, std::vector<int32_t>>;
using ArgMap = std::map<std::string, ArgValue>;

enum class ExecMode { Sequential, Parallel };

struct RunOptions {
    ExecMode mode = ExecMode::Sequential;
    int threads = 4;
    // fixedPoint iteration cap; <=0 means the default 10*n + 100.
    int64_t fixedPointCap = 0;
    // When set, every in-region read of a store-level symbol is checked
    // against that region's copy_in set (transfer-soundness instrumentation).
    const sema::TransferAnalysis* instrumentTransfers = nullptr;
};

struct RunResult {
    std::map<int, PropArray> properties;  // symbol id -> per-node array
    std::map<int, ScalarCell> scalars;    // symbol id -> cell
    std::optional<Value> returnValue;
    std::vector<std::string> transferViolations;

    const PropArray* property(const sema::SymbolTable& syms, const std::string& name) const;
    std::optional<Value> scalar(const sema::SymbolTable& syms, const std::string& name) const;
};

// Executes the entry function of a type-checked program on a CSR graph.
// Sequential mode is deterministic; parallel mode uses a worker pool confined
// to this call and is deterministic only for commutative-update programs.
RunResult run(const sema::AnnotatedProgram& program, const CsrGraph& graph, const ArgMap& args,
              const RunOptions& options = {});

struct BfsContext {
    int32_t root = 0;
    std::vector<int32_t> level;                 // -1 = unreached
    std::vector<std::vector<int32_t>> levelOrder;
    int32_t hops = 0;                           // max level reached
};

// Level-synchronous BFS mirroring the generated code's finished-flag loop.
BfsContext bfsLevels(const CsrGraph& graph, int32_t root);

}  // namespace graphdsl::interp
