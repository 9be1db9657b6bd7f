#include "graphdsl/corpus.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "graphdsl/parser.hpp"

#ifndef GRAPHDSL_CORPUS_DIR
#define GRAPHDSL_CORPUS_DIR "corpus"
#endif

namespace graphdsl::corpus {

using namespace ast;

namespace {

void countBlock(const Block& b, ConstructCensus& c);

void countStmt(const Stmt& s, ConstructCensus& c) {
    if (s.is<ForAllStmt>()) {
        ++c.forAll;
        countBlock(s.as<ForAllStmt>().body, c);
    } else if (s.is<FixedPointStmt>()) {
        ++c.fixedPoint;
        countBlock(s.as<FixedPointStmt>().body, c);
    } else if (s.is<IterateBfsStmt>()) {
        ++c.iterateInBfs;
        countBlock(s.as<IterateBfsStmt>().body, c);
    } else if (s.is<IterateRevStmt>()) {
        ++c.iterateInReverse;
        countBlock(s.as<IterateRevStmt>().body, c);
    } else if (s.is<MinMaxAssignStmt>()) {
        ++c.minMaxAssign;
    } else if (s.is<ReduceAssignStmt>()) {
        ++c.reduceAssign;
    } else if (s.is<IfStmt>()) {
        countBlock(s.as<IfStmt>().thenBlock, c);
        if (s.as<IfStmt>().elseBlock) countBlock(*s.as<IfStmt>().elseBlock, c);
    }
}

void countBlock(const Block& b, ConstructCensus& c) {
    for (const auto& s : b.stmts) countStmt(*s, c);
}

}  // namespace

ConstructCensus countConstructs(const Program& program) {
    ConstructCensus c;
    for (const auto& fn : program.functions) countBlock(fn.body, c);
    return c;
}

std::vector<CorpusEntry> listCorpus() {
    // Census values are asserted by tests; editing a corpus program without
    // updating them here fails CI.
    std::vector<CorpusEntry> entries;
    entries.push_back({"bc",
                       "bc.sp",
                       "ComputeBC",
                       {{"sourceSet", "node-set"}},
                       {3, 0, 1, 1, 0, 3},
                       "bc",
                       "property",
                       "bc",
                       30,
                       1e-9,
                       true});
    entries.push_back({"pr",
                       "pr.sp",
                       "ComputePR",
                       {{"damping", "float"}, {"threshold", "float"}, {"maxIter", "int"}},
                       {4, 1, 0, 0, 0, 3},
                       "pr",
                       "property",
                       "rank",
                       30,
                       1e-6,
                       false});
    entries.push_back({"sssp",
                       "sssp.sp",
                       "ComputeSSSP",
                       {{"src", "node"}},
                       {2, 1, 0, 0, 1, 0},
                       "sssp",
                       "property",
                       "dist",
                       20,
                       0.0,
                       false});
    entries.push_back({"tc",
                       "tc.sp",
                       "ComputeTC",
                       {},
                       {3, 0, 0, 0, 0, 1},
                       "tc",
                       "scalar",
                       "triangleCount",
                       20,
                       0.0,
                       false});
    return entries;
}

std::string corpusDir() {
    if (const char* env = std::getenv("GRAPHDSL_CORPUS_DIR")) return env;
    return GRAPHDSL_CORPUS_DIR;
}

const CorpusEntry& entryByName(const std::string& name) {
    static const std::vector<CorpusEntry> entries = listCorpus();
    for (const auto& e : entries)
        if (e.name == name) return e;
    throw std::invalid_argument("UnknownCorpusEntry: '" + name + "'");
}

std::string corpusSourcePath(const std::string& name, const std::string& dir) {
    return dir + "/" + entryByName(name).fileName;
}

Program loadCorpus(const std::string& name, const std::string& dir) {
    std::string path = corpusSourcePath(name, dir);
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open corpus program: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parseSource(buf.str());
}

int countSourceLines(const std::string& source) {
    std::istringstream in(source);
    std::string line;
    int count = 0;
    while (std::getline(in, line)) {
        size_t first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        if (line.compare(first, 2, "//") == 0) continue;
        ++count;
    }
    return count;
}

}  // namespace graphdsl::corpus
