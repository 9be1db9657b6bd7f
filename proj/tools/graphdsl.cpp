// graphdsl: compile, run, check, analyze, and gen-graph for the vertex-centric
// graph DSL.
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "graphdsl/codegen.hpp"
#include "graphdsl/corpus.hpp"
#include "graphdsl/csr.hpp"
#include "graphdsl/graphgen.hpp"
#include "graphdsl/interpreter.hpp"
#include "graphdsl/oracles.hpp"
#include "graphdsl/parser.hpp"
#include "graphdsl/structural_check.hpp"

namespace {

using namespace graphdsl;

bool colorEnabled() {
    const char* env = std::getenv("GRAPHDSL_COLOR");
    if (!env) return false;
    return std::string(env) == "1";
}

std::string readFile(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

sema::AnnotatedProgram compileFrontend(const std::string& path, bool printWarnings = true) {
    std::string source = readFile(path);
    ast::Program program = parseSource(source);
    sema::AnnotatedProgram annotated = sema::typeCheck(std::move(program), path);
    if (printWarnings)
        for (const auto& w : annotated.warnings)
            std::cerr << w.format(path, colorEnabled()) << "\n";
    return annotated;
}

interp::ArgMap parseArgs(const std::vector<std::string>& pairs,
                         const sema::AnnotatedProgram& prog) {
    interp::ArgMap args;
    for (const auto& pair : pairs) {
        size_t eq = pair.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("--arg expects name=value, got '" + pair + "'");
        std::string name = pair.substr(0, eq);
        std::string value = pair.substr(eq + 1);
        const sema::Symbol* sym = nullptr;
        for (const auto& p : prog.entry().params)
            if (p.name == name) sym = &prog.symbols.at(p.symbol);
        if (!sym) throw std::runtime_error("no parameter named '" + name + "'");
        switch (sym->kind) {
            case sema::SymbolKind::NodeSet: {
                std::vector<int32_t> nodes;
                std::istringstream ls(value);
                std::string tok;
                while (std::getline(ls, tok, ',')) nodes.push_back(std::stoi(tok));
                args[name] = nodes;
                break;
            }
            case sema::SymbolKind::Node: args[name] = static_cast<int64_t>(std::stoll(value)); break;
            default:
                if (sym->type.kind == ast::TypeKind::Bool)
                    args[name] = (value == "true" || value == "True" || value == "1");
                else if (sym->type.isFloating())
                    args[name] = std::stod(value);
                else
                    args[name] = static_cast<int64_t>(std::stoll(value));
                break;
        }
    }
    return args;
}

void printResult(const sema::AnnotatedProgram& prog, const interp::RunResult& result) {
    // Parameters and function-level declarations, in declaration order.
    for (const auto& s : prog.symbols.all()) {
        if (!s.isParam && s.declDepth > 1) continue;
        auto propIt = result.properties.find(s.id);
        if (propIt != result.properties.end()) {
            const auto& arr = propIt->second;
            for (size_t v = 0; v < arr.size(); ++v) {
                interp::Value val;
                if (arr.elem == ast::TypeKind::Bool)
                    val = interp::Value::ofBool(arr.bools[v] != 0);
                else if (arr.elem == ast::TypeKind::Float || arr.elem == ast::TypeKind::Double)
                    val = interp::Value::ofFloat(arr.floats[v]);
                else
                    val = interp::Value::ofInt(arr.ints[v]);
                std::cout << s.name << "\t" << v << "\t" << interp::formatValue(val) << "\n";
            }
            continue;
        }
        auto scalarIt = result.scalars.find(s.id);
        if (scalarIt != result.scalars.end())
            std::cout << s.name << "\t" << interp::formatValue(scalarIt->second.load()) << "\n";
    }
    if (result.returnValue)
        std::cout << "return\t" << interp::formatValue(*result.returnValue) << "\n";
}

int runCompile(const std::string& programPath, const std::string& backendName,
               const std::string& outDir, bool emitAnalysis, int numThreads) {
    sema::AnnotatedProgram prog = compileFrontend(programPath);
    codegen::Analyses analyses = codegen::analyzeAll(prog);
    if (emitAnalysis)
        std::cout << sema::formatAnalysisReport(prog, analyses.transfers, analyses.reductions);

    std::string stem = std::filesystem::path(programPath).stem().string();
    codegen::CodegenConfig cfg;
    cfg.numThreads = numThreads;

    std::vector<codegen::BackendKind> backends;
    if (backendName == "all")
        backends = {codegen::BackendKind::Cuda, codegen::BackendKind::OpenAcc,
                    codegen::BackendKind::Sycl, codegen::BackendKind::OpenCl};
    else
        backends = {codegen::backendFromName(backendName)};

    std::filesystem::create_directories(outDir);
    for (auto backend : backends) {
        codegen::EmitUnit unit = codegen::generate(prog, analyses, backend, cfg, stem);
        for (const auto& file : unit.files) {
            std::string path = outDir + "/" + file.name;
            std::ofstream out(path);
            out << file.text;
            std::cout << "wrote " << path << " (" << unit.lineCounts.at(file.name)
                      << " lines)\n";
        }
    }
    return 0;
}

int runRun(const std::string& programPath, const std::string& graphPath, bool directed,
           const std::vector<std::string>& argPairs, const std::string& mode, int threads,
           int64_t fpCap, int weightLo, int weightHi, int64_t weightSeed) {
    sema::AnnotatedProgram prog = compileFrontend(programPath);
    CsrGraph graph = CsrGraph::loadEdgeList(graphPath, directed);
    if (weightLo >= 0 && weightHi >= weightLo)
        graph = graph.withRandomWeights(weightLo, weightHi, static_cast<uint64_t>(weightSeed));
    interp::RunOptions options;
    options.mode = mode == "par" ? interp::ExecMode::Parallel : interp::ExecMode::Sequential;
    options.threads = threads;
    options.fixedPointCap = fpCap;
    interp::RunResult result = interp::run(prog, graph, parseArgs(argPairs, prog), options);
    printResult(prog, result);
    return 0;
}

double maxAbsError(const std::vector<double>& a, const std::vector<double>& b) {
    double worst = 0;
    for (size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
    return worst;
}

double maxRelError(const std::vector<double>& a, const std::vector<double>& b) {
    double worst = 0;
    for (size_t i = 0; i < a.size(); ++i) {
        double scale = std::max({std::abs(a[i]), std::abs(b[i]), 1e-12});
        worst = std::max(worst, std::abs(a[i] - b[i]) / scale);
    }
    return worst;
}

int runCheck(const std::string& programPath, const std::string& graphPath, bool directed,
             const std::vector<std::string>& argPairs, const std::string& mode, int threads,
             const std::string& oracleOverride) {
    sema::AnnotatedProgram prog = compileFrontend(programPath);
    CsrGraph graph = CsrGraph::loadEdgeList(graphPath, directed);

    std::string name = oracleOverride;
    if (name.empty()) name = std::filesystem::path(programPath).stem().string();
    const corpus::CorpusEntry& entry = corpus::entryByName(name);

    interp::ArgMap args = parseArgs(argPairs, prog);
    // Fill the per-algorithm defaults so `check program --graph g` just works.
    if (entry.oracleId == "sssp" && !args.count("src")) args["src"] = int64_t(0);
    if (entry.oracleId == "bc" && !args.count("sourceSet")) {
        std::vector<int32_t> all;
        for (int32_t v = 0; v < graph.nodeCount(); ++v) all.push_back(v);
        args["sourceSet"] = all;
    }
    if (entry.oracleId == "pr") {
        if (!args.count("damping")) args["damping"] = 0.85;
        if (!args.count("threshold")) args["threshold"] = 1e-9;
        if (!args.count("maxIter")) args["maxIter"] = int64_t(110);
    }
    interp::RunOptions options;
    options.mode = mode == "par" ? interp::ExecMode::Parallel : interp::ExecMode::Sequential;
    options.threads = threads;
    interp::RunResult result = interp::run(prog, graph, args, options);

    bool pass = false;
    double absErr = 0, relErr = 0;
    if (entry.oracleId == "tc") {
        int64_t expected = oracles::tc(graph);
        int64_t got = 0;
        if (auto v = result.scalar(prog.symbols, entry.resultName)) got = v->asInt();
        absErr = static_cast<double>(std::abs(expected - got));
        pass = expected == got;
        std::cout << "tc: interpreter " << got << " oracle " << expected << "\n";
    } else if (entry.oracleId == "sssp") {
        int32_t src = 0;
        if (auto it = args.find("src"); it != args.end())
            src = static_cast<int32_t>(std::get<int64_t>(it->second));
        auto expected = oracles::sssp(graph, src);
        const auto* arr = result.property(prog.symbols, entry.resultName);
        int64_t worst = 0;
        for (size_t i = 0; i < expected.size(); ++i)
            worst = std::max(worst, std::abs(expected[i] - arr->ints[i]));
        absErr = static_cast<double>(worst);
        pass = worst == 0;
        std::cout << "sssp: max absolute distance error " << worst << "\n";
    } else if (entry.oracleId == "bc") {
        std::vector<int32_t> sources;
        if (auto it = args.find("sourceSet"); it != args.end())
            sources = std::get<std::vector<int32_t>>(it->second);
        auto expected = oracles::bc(graph, sources);
        const auto* arr = result.property(prog.symbols, entry.resultName);
        absErr = maxAbsError(expected, arr->floats);
        relErr = maxRelError(expected, arr->floats);
        pass = relErr <= entry.tolerance;
        std::cout << "bc: max abs error " << absErr << ", max rel error " << relErr << "\n";
    } else if (entry.oracleId == "pr") {
        double damping = 0.85, threshold = 1e-9;
        int maxIter = 110;
        if (auto it = args.find("damping"); it != args.end())
            damping = std::get<double>(it->second);
        if (auto it = args.find("threshold"); it != args.end())
            threshold = std::get<double>(it->second);
        if (auto it = args.find("maxIter"); it != args.end())
            maxIter = static_cast<int>(std::get<int64_t>(it->second));
        auto expected = oracles::pr(graph, damping, threshold, maxIter);
        const auto* arr = result.property(prog.symbols, entry.resultName);
        absErr = maxAbsError(expected, arr->floats);
        pass = absErr <= entry.tolerance;
        std::cout << "pr: max abs error " << absErr << "\n";
    }
    std::ostringstream tol;
    if (entry.tolerance == 0)
        tol << "exact";
    else
        tol << entry.tolerance << (entry.toleranceIsRelative ? " relative" : " absolute");
    std::cout << (pass ? "PASS" : "FAIL") << " (tolerance " << tol.str() << ")\n";
    return pass ? 0 : 1;
}

int runAnalyze(const std::string& programPath) {
    sema::AnnotatedProgram prog = compileFrontend(programPath);
    codegen::Analyses analyses = codegen::analyzeAll(prog);
    std::cout << sema::formatAnalysisReport(prog, analyses.transfers, analyses.reductions);
    return 0;
}

int runGenGraph(const std::string& kind, int32_t nodes, int64_t edges, uint64_t seed,
                const std::string& outPath, bool weighted, int wmin, int wmax, double a, double b,
                double c, double d) {
    std::vector<EdgeInput> edgeList;
    if (kind == "uniform")
        edgeList = genUniformEdges(nodes, edges, seed);
    else if (kind == "rmat")
        edgeList = genRmatEdges(nodes, edges, seed, {a, b, c, d});
    else
        throw std::runtime_error("--kind must be uniform or rmat");

    std::ofstream out(outPath);
    if (!out) throw std::runtime_error("cannot open output file: " + outPath);
    out << "# " << kind << " graph: nodes " << nodes << " edges " << edges << " seed " << seed
        << "\n";
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
    std::uniform_int_distribution<int> weight(wmin, wmax);
    for (const auto& e : edgeList) {
        out << e.u << " " << e.v;
        if (weighted) out << " " << weight(rng);
        out << "\n";
    }
    // Degree summary of the undirected realization, as loaders will see it.
    CsrGraph g = CsrGraph::buildFromEdges(nodes, edgeList, false);
    int32_t maxDeg = 0;
    for (int32_t v = 0; v < g.nodeCount(); ++v) maxDeg = std::max(maxDeg, g.outDegree(v));
    double avgDeg = g.nodeCount() ? static_cast<double>(g.edgeCount()) / g.nodeCount() : 0.0;
    std::cout << "wrote " << outPath << " (nodes " << g.nodeCount() << ", stored edges "
              << g.edgeCount() << ", avg degree " << avgDeg << ", max degree " << maxDeg
              << ")\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Vertex-centric graph DSL compiler and reference executor"};
    app.require_subcommand(1);

    // compile
    auto* compile = app.add_subcommand("compile", "Emit accelerator source for a DSL program");
    std::string programPath, backend = "cuda", outDir = ".";
    bool emitAnalysis = false;
    int numThreads = 1024;
    compile->add_option("program", programPath, "DSL source file (.sp)")->required();
    compile->add_option("--backend", backend, "cuda|openacc|sycl|opencl|all")
        ->default_val("cuda");
    compile->add_option("--out", outDir, "output directory")->default_val(".");
    compile->add_flag("--emit-analysis", emitAnalysis, "print the transfer/reduction report");
    compile->add_option("--num-threads", numThreads, "launch width");

    // run
    auto* run = app.add_subcommand("run", "Interpret a DSL program on a graph");
    std::string graphPath, mode = "seq";
    bool directed = false;
    std::vector<std::string> argPairs;
    int threads = 4;
    int64_t fpCap = 0;
    int weightLo = -1, weightHi = -1;
    int64_t weightSeed = 1;
    run->add_option("program", programPath, "DSL source file (.sp)")->required();
    run->add_option("--graph", graphPath, "edge-list file")->required();
    run->add_flag("--directed", directed, "treat the edge list as directed");
    run->add_option("--arg", argPairs, "program argument name=value (repeatable)");
    run->add_option("--mode", mode, "seq|par")->default_val("seq");
    run->add_option("--threads", threads, "parallel-mode worker count");
    run->add_option("--fp-cap", fpCap, "fixedPoint iteration cap (default 10n+100)");
    run->add_option("--weight-min", weightLo, "reassign random weights: low bound");
    run->add_option("--weight-max", weightHi, "reassign random weights: high bound");
    run->add_option("--weight-seed", weightSeed, "seed for random weights");

    // check
    auto* check = app.add_subcommand("check", "Interpret and compare against the oracle");
    std::string oracleName;
    check->add_option("program", programPath, "DSL source file (.sp)")->required();
    check->add_option("--graph", graphPath, "edge-list file")->required();
    check->add_flag("--directed", directed, "treat the edge list as directed");
    check->add_option("--arg", argPairs, "program argument name=value (repeatable)");
    check->add_option("--mode", mode, "seq|par")->default_val("seq");
    check->add_option("--threads", threads, "parallel-mode worker count");
    check->add_option("--oracle", oracleName, "oracle id (bc|pr|sssp|tc); default from file stem");

    // analyze
    auto* analyze = app.add_subcommand("analyze", "Dump the transfer/reduction analysis report");
    analyze->add_option("program", programPath, "DSL source file (.sp)")->required();

    // gen-graph
    auto* gen = app.add_subcommand("gen-graph", "Write a synthetic edge-list file");
    std::string kind = "uniform", outPath = "graph.txt";
    int32_t nodes = 1024;
    int64_t edges = 8192;
    uint64_t seed = 1;
    bool weighted = false;
    int wmin = 1, wmax = 100;
    double ra = 0.57, rb = 0.19, rc = 0.19, rd = 0.05;
    gen->add_option("--kind", kind, "uniform|rmat")->default_val("uniform");
    gen->add_option("--nodes", nodes, "node count")->default_val("1024");
    gen->add_option("--edges", edges, "edge count")->default_val("8192");
    gen->add_option("--seed", seed, "generator seed")->default_val("1");
    gen->add_option("--out", outPath, "output file")->default_val("graph.txt");
    gen->add_flag("--weighted", weighted, "emit uniform random weights");
    gen->add_option("--weight-min", wmin, "weight low bound")->default_val("1");
    gen->add_option("--weight-max", wmax, "weight high bound")->default_val("100");
    gen->add_option("--rmat-a", ra, "RMAT a")->default_val("0.57");
    gen->add_option("--rmat-b", rb, "RMAT b")->default_val("0.19");
    gen->add_option("--rmat-c", rc, "RMAT c")->default_val("0.19");
    gen->add_option("--rmat-d", rd, "RMAT d")->default_val("0.05");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (compile->parsed())
            return runCompile(programPath, backend, outDir, emitAnalysis, numThreads);
        if (run->parsed())
            return runRun(programPath, graphPath, directed, argPairs, mode, threads, fpCap,
                          weightLo, weightHi, weightSeed);
        if (check->parsed())
            return runCheck(programPath, graphPath, directed, argPairs, mode, threads, oracleName);
        if (analyze->parsed()) return runAnalyze(programPath);
        if (gen->parsed())
            return runGenGraph(kind, nodes, edges, seed, outPath, weighted, wmin, wmax, ra, rb, rc,
                               rd);
    } catch (const graphdsl::CompileError& e) {
        std::cerr << e.diagnostic().format(programPath, colorEnabled()) << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
