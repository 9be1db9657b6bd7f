#include <benchmark/benchmark.h>

#include <fstream>
#include <random>
#include <sstream>

#include "graphdsl/codegen.hpp"
#include "graphdsl/corpus.hpp"
#include "graphdsl/csr.hpp"
#include "graphdsl/graphgen.hpp"
#include "graphdsl/interpreter.hpp"
#include "graphdsl/parser.hpp"

namespace {

using namespace graphdsl;

std::string corpusSource(const std::string& name) {
    static std::map<std::string, std::string> cache;
    auto it = cache.find(name);
    if (it != cache.end()) return it->second;
    ast::Program p = corpus::loadCorpus(name, GRAPHDSL_TEST_CORPUS_DIR);
    // Keep a reparseable snapshot so parsing is measured from text.
    std::ifstream in(corpus::corpusSourcePath(name, GRAPHDSL_TEST_CORPUS_DIR));
    std::ostringstream buf;
    buf << in.rdbuf();
    return cache[name] = buf.str();
}

void BM_ParseTypecheck(benchmark::State& state, const std::string& name) {
    std::string src = corpusSource(name);
    for (auto _ : state) {
        auto prog = sema::typeCheck(parseSource(src));
        benchmark::DoNotOptimize(prog);
    }
}

void BM_AnalyzeAndGenerate(benchmark::State& state, const std::string& name,
                           codegen::BackendKind backend) {
    auto prog = sema::typeCheck(corpus::loadCorpus(name, GRAPHDSL_TEST_CORPUS_DIR));
    auto analyses = codegen::analyzeAll(prog);
    for (auto _ : state) {
        auto unit = codegen::generate(prog, analyses, backend, {}, name);
        benchmark::DoNotOptimize(unit);
    }
}

void BM_InterpretSssp(benchmark::State& state) {
    int32_t n = static_cast<int32_t>(state.range(0));
    auto edges = genUniformEdges(n, n * 4, 13);
    CsrGraph g = CsrGraph::buildFromEdges(n, edges, false).withRandomWeights(1, 100, 13);
    auto prog = sema::typeCheck(corpus::loadCorpus("sssp", GRAPHDSL_TEST_CORPUS_DIR));
    for (auto _ : state) {
        auto r = interp::run(prog, g, {{"src", int64_t(0)}});
        benchmark::DoNotOptimize(r);
    }
    state.SetItemsProcessed(state.iterations() * g.edgeCount());
}

void BM_CsrBuild(benchmark::State& state) {
    int32_t n = static_cast<int32_t>(state.range(0));
    auto edges = genRmatEdges(n, n * 8, 21);
    for (auto _ : state) {
        CsrGraph g = CsrGraph::buildFromEdges(n, edges, false);
        benchmark::DoNotOptimize(g);
    }
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(edges.size()));
}

void BM_IsEdge(benchmark::State& state) {
    int32_t n = 4096;
    auto edges = genRmatEdges(n, n * 16, 3);
    CsrGraph g = CsrGraph::buildFromEdges(n, edges, false);
    std::mt19937_64 rng(5);
    for (auto _ : state) {
        int32_t u = static_cast<int32_t>(rng() % n);
        int32_t v = static_cast<int32_t>(rng() % n);
        benchmark::DoNotOptimize(g.isEdge(u, v));
    }
}

}  // namespace

BENCHMARK_CAPTURE(BM_ParseTypecheck, bc, std::string("bc"));
BENCHMARK_CAPTURE(BM_ParseTypecheck, sssp, std::string("sssp"));
BENCHMARK_CAPTURE(BM_AnalyzeAndGenerate, sssp_cuda, std::string("sssp"),
                  graphdsl::codegen::BackendKind::Cuda);
BENCHMARK_CAPTURE(BM_AnalyzeAndGenerate, bc_opencl, std::string("bc"),
                  graphdsl::codegen::BackendKind::OpenCl);
BENCHMARK(BM_InterpretSssp)->Arg(256)->Arg(1024);
BENCHMARK(BM_CsrBuild)->Arg(1024)->Arg(8192);
BENCHMARK(BM_IsEdge);

BENCHMARK_MAIN();
