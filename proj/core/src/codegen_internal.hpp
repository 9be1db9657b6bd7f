#pragma once

#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "graphdsl/codegen.hpp"

namespace graphdsl::codegen {

// ---------------------------------------------------------------------------
// Line-oriented writer with indent tracking and 1-based line numbers.
// ---------------------------------------------------------------------------

class CodeWriter {
public:
    explicit CodeWriter(int indentWidth = 2) : indentWidth_(indentWidth) {}

    void line(const std::string& text) {
        for (int i = 0; i < depth_ * indentWidth_; ++i) out_ += ' ';
        out_ += text;
        out_ += '\n';
        ++lineNo_;
    }
    void blank() {
        out_ += '\n';
        ++lineNo_;
    }
    void raw(const std::string& text) {  // multi-line block, no indent
        out_ += text;
        for (char c : text)
            if (c == '\n') ++lineNo_;
    }
    void open(const std::string& text) {
        line(text);
        ++depth_;
    }
    void close(const std::string& text = "}") {
        --depth_;
        line(text);
    }
    // "} else {" style: dedent, print, re-indent.
    void closeOpen(const std::string& text) {
        --depth_;
        line(text);
        ++depth_;
    }
    int nextLine() const { return lineNo_; }  // line number the next line() will get
    int depth() const { return depth_; }
    const std::string& text() const { return out_; }

private:
    int indentWidth_;
    int depth_ = 0;
    int lineNo_ = 1;
    std::string out_;
};

// ---------------------------------------------------------------------------
// Lowering plan shared by all backends
// ---------------------------------------------------------------------------

struct PlannedXfer {
    int symbol;
    TransferDir dir;
    bool operator<(const PlannedXfer& o) const {
        if (symbol != o.symbol) return symbol < o.symbol;
        return static_cast<int>(dir) < static_cast<int>(o.dir);
    }
};

struct RegionPlan {
    const sema::RegionInfo* info = nullptr;
    std::string kernelName;
    // Deterministic kernel parameter order: V, graph arrays (enum order),
    // read-only scalars (by name), arrays (by name), written scalars (by
    // name), then construct internals (next buffers, level, hops, flags).
    std::vector<int> scalarParams;   // read-only, by value
    std::vector<int> arrayParams;    // property arrays
    std::vector<int> writtenScalars; // device cells
};

struct BfsNames {
    std::string level;
    std::string hops;
    std::string finished;
};

struct LoweringPlan {
    std::string unitName;
    std::string functionName;  // lowercased entry name used in emitted code
    std::vector<RegionPlan> regions;
    // Emitted names per symbol: DSL names, deduplicated against shadowing,
    // prelude identifiers, and C keywords.
    std::map<int, std::string> names;
    std::map<const ast::Stmt*, BfsNames> bfsNames;       // per iterateInBFS
    std::map<const ast::Stmt*, std::string> fpNextName;  // per buffered fixedPoint
    // Transfers anchored before/after host statements (hoisted out of loops
    // where no host access interferes).
    std::map<const ast::Stmt*, std::set<PlannedXfer>> before, after;
    // Every program symbol that needs a device allocation (arrays + written
    // scalars), sorted by name for deterministic emission.
    std::vector<int> deviceArrays;
    std::vector<int> deviceScalars;
    // fixedPoint indices that keep a per-node array (double-buffered).
    std::set<int> bufferedFixedPoints;
    bool hasBfs = false;
    bool anyFloatReduction = false;
    bool anyFloatMinMax = false;
    bool usesEdgeIndexHelper = false;  // get_edge not matched to a neighbor loop
    bool usesIsEdgeHelper = false;
    bool usesMinWt = false;
    bool usesMaxWt = false;
};

LoweringPlan buildPlan(const sema::AnnotatedProgram& program, const Analyses& analyses,
                       const std::string& unitName);

void scanHelperUsage(const sema::AnnotatedProgram& program, LoweringPlan& plan);
void assignNames(const sema::AnnotatedProgram& program, const sema::TransferAnalysis& ta,
                 LoweringPlan& plan);

// ---------------------------------------------------------------------------
// Shared expression emission; backends override the reference hooks.
// ---------------------------------------------------------------------------

struct ExprEmitter {
    const sema::AnnotatedProgram* prog = nullptr;

    virtual ~ExprEmitter() = default;
    virtual std::string scalarRef(int symbol) = 0;
    virtual std::string propRef(int symbol, const std::string& objText) = 0;
    virtual std::string edgeWeightRef(const std::string& edgeText) = 0;
    // count_outNbrs/is_an_edge/get_edge/num_nodes/minWt/maxWt
    virtual std::string graphMethod(const ast::MethodCall& m, const ast::Expr& e) = 0;
    virtual std::string boolLit(bool v) { return v ? "true" : "false"; }
    virtual std::string infLit() { return "(INT_MAX / 2)"; }

    std::string emit(const ast::Expr& e, int minPrec = 0);
};

// C type names per DSL type (bool lowered to int when boolAsInt, OpenCL).
std::string cType(ast::TypeKind kind, bool boolAsInt);

std::string floatLitText(const ast::FloatLit& f);

// Lowercased identifier-safe version of the entry function name.
std::string loweredName(const std::string& name);

// True when the reduce op on this element type needs the float CAS-emulation
// path on backends without native float atomics.
bool isFloatElem(ast::TypeKind k);

// Shared prelude fragments: CSR struct + edge-list loader (identical text on
// every host backend) and the binary-search helpers with a backend-specific
// function qualifier.
std::string preludeGraphRuntime();
std::string preludeIsEdge(const std::string& qualifier);
std::string preludeEdgeIndex(const std::string& qualifier);

// Standalone main(): loads the graph, parses per-parameter arguments in
// signature order, invokes the generated function, prints outputs in the
// name<TAB>node<TAB>value format. callPrefix lets SYCL pass its queue.
std::string buildMainDriver(const sema::AnnotatedProgram& program, const LoweringPlan& plan,
                            const std::string& callPrefix, bool boolAsInt);

int countLines(const std::string& text);
int countNonBlank(const std::string& text);

EmitUnit generateCuda(const sema::AnnotatedProgram& program, const Analyses& analyses,
                      const CodegenConfig& cfg, const LoweringPlan& plan);
EmitUnit generateOpenAcc(const sema::AnnotatedProgram& program, const Analyses& analyses,
                         const CodegenConfig& cfg, const LoweringPlan& plan);
EmitUnit generateSycl(const sema::AnnotatedProgram& program, const Analyses& analyses,
                      const CodegenConfig& cfg, const LoweringPlan& plan);
EmitUnit generateOpenCl(const sema::AnnotatedProgram& program, const Analyses& analyses,
                        const CodegenConfig& cfg, const LoweringPlan& plan);

[[noreturn]] void unsupported(BackendKind backend, const std::string& construct, SourceSpan span);

}  // namespace graphdsl::codegen
