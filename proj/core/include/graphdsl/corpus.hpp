#pragma once

#include <optional>
#include <string>
#include <vector>

#include "graphdsl/ast.hpp"

namespace graphdsl::corpus {

struct ConstructCensus {
    int forAll = 0;         // for + forall statements
    int fixedPoint = 0;
    int iterateInBfs = 0;
    int iterateInReverse = 0;
    int minMaxAssign = 0;
    int reduceAssign = 0;

    bool operator==(const ConstructCensus&) const = default;
};

ConstructCensus countConstructs(const ast::Program& program);

struct ArgSpec {
    std::string name;
    std::string kind;  // "node", "int", "float", "bool", "node-set"
};

struct CorpusEntry {
    std::string name;         // "bc", "pr", "sssp", "tc"
    std::string fileName;     // bc.sp ...
    std::string entryFunction;
    std::vector<ArgSpec> args;
    ConstructCensus census;
    std::string oracleId;     // matching oracle
    std::string resultKind;   // "property" or "scalar"
    std::string resultName;   // property/scalar holding the answer
    int maxSourceLines = 0;   // non-blank, non-comment lines allowed
    double tolerance = 0.0;   // 0 = exact
    bool toleranceIsRelative = false;
};

std::vector<CorpusEntry> listCorpus();

// Resolves the corpus directory: GRAPHDSL_CORPUS_DIR env var, then the
// build-time source path.
std::string corpusDir();

const CorpusEntry& entryByName(const std::string& name);

// Loads and parses corpus/<name>.sp. Throws on unknown names or parse errors.
ast::Program loadCorpus(const std::string& name, const std::string& dir = corpusDir());

std::string corpusSourcePath(const std::string& name, const std::string& dir = corpusDir());

// Non-blank, non-comment-only line count of a DSL source.
int countSourceLines(const std::string& source);

}  // namespace graphdsl::corpus
