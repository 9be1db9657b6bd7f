#pragma once

#include <map>
#include <string>
#include <vector>

#include "graphdsl/analysis.hpp"
#include "graphdsl/sema.hpp"

namespace graphdsl::codegen {

enum class BackendKind { Cuda, OpenAcc, Sycl, OpenCl };

const char* backendName(BackendKind b);
BackendKind backendFromName(const std::string& name);  // throws on unknown names

struct CodegenConfig {
    // CUDA threads-per-block; SYCL/OpenCL global launch width.
    int numThreads = 1024;
    std::string deviceVarPrefix = "gpu_";
    // OpenCL lacks float/double atomics; emulation is forced on there.
    bool floatAtomicsEmulation = false;
    int indent = 2;
};

struct EmitFile {
    std::string name;
    std::string text;
};

struct KernelMeta {
    std::string name;
    std::vector<std::string> params;  // parameter names in order
    std::string file;
    int defLine = 0;                  // 1-based line of the kernel definition
    std::vector<int> launchLines;     // host-side launch sites
    int regionId = -1;                // -1 for helper kernels
};

enum class TransferDir { HostToDevice, DeviceToHost };

struct TransferMeta {
    std::string symbol;
    TransferDir dir = TransferDir::HostToDevice;
    std::string file;
    int line = 0;
    bool graphArray = false;
};

struct LoopMeta {
    // Host convergence loops (fixedPoint / BFS do-while): line span of the
    // emitted loop body, for flag-pairing checks.
    std::string flagName;
    std::string file;
    int beginLine = 0;
    int endLine = 0;
    bool isBfs = false;
};

struct EmitUnit {
    std::string programName;
    BackendKind backend = BackendKind::Cuda;
    std::vector<EmitFile> files;
    std::vector<KernelMeta> kernels;
    std::vector<TransferMeta> transfers;
    std::vector<LoopMeta> loops;
    std::map<std::string, int> lineCounts;  // file -> total lines
    // Generated function + kernel lines, excluding the fixed prelude and the
    // main() driver; size-envelope checks compare against this.
    int bodyLineCount = 0;

    const EmitFile* file(const std::string& name) const {
        for (const auto& f : files)
            if (f.name == name) return &f;
        return nullptr;
    }
};

struct Analyses {
    sema::TransferAnalysis transfers;
    std::vector<sema::ReductionInfo> reductions;
};

// Runs transfer + reduction analyses in one call.
Analyses analyzeAll(sema::AnnotatedProgram& program);

// Emits backend source for the program's entry function. Deterministic:
// identical inputs produce byte-identical units. Throws
// CompileError("UnsupportedConstruct") for constructs a backend cannot
// express (never for the corpus programs).
EmitUnit generate(const sema::AnnotatedProgram& program, const Analyses& analyses,
                  BackendKind backend, const CodegenConfig& cfg = {},
                  const std::string& unitName = "");

}  // namespace graphdsl::codegen
