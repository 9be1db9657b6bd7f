#include <doctest.h>

#include <random>

#include "graphdsl/corpus.hpp"
#include "graphdsl/parser.hpp"
#include "graphdsl/pretty_print.hpp"
#include "support/random_programs.hpp"

using namespace graphdsl;

TEST_CASE("tokenize: single keyword") {
    auto toks = tokenize("forall");
    REQUIRE(toks.size() == 2);
    CHECK(toks[0].isKeyword("forall"));
    CHECK(toks[1].is(TokenKind::EndOfInput));
}

TEST_CASE("tokenize: property access expression") {
    auto toks = tokenize("v.dist + e.weight");
    REQUIRE(toks.size() == 8);  // ident . ident op ident . ident EOI
    CHECK(toks[0].is(TokenKind::Identifier, "v"));
    CHECK(toks[1].isPunct("."));
    CHECK(toks[2].is(TokenKind::Identifier, "dist"));
    CHECK(toks[3].isOp("+"));
    CHECK(toks[4].is(TokenKind::Identifier, "e"));
    CHECK(toks[6].is(TokenKind::Identifier, "weight"));
}

TEST_CASE("tokenize: comments dropped") {
    auto toks = tokenize("x = 3 // note");
    REQUIRE(toks.size() == 4);
    CHECK(toks[0].is(TokenKind::Identifier, "x"));
    CHECK(toks[1].isOp("="));
    CHECK(toks[2].is(TokenKind::IntLiteral, "3"));
}

TEST_CASE("tokenize: spans reconstruct comment-free source") {
    const std::string source = "function F(Graph g) {\n  int x = 41;\n  x = x + 1;\n}\n";
    auto toks = tokenize(source);
    // Rebuild by placing each lexeme at its 1-based (line, column).
    std::vector<std::string> lines(1);
    for (const auto& t : toks) {
        if (t.is(TokenKind::EndOfInput)) break;
        while (lines.size() < t.span.line) lines.emplace_back();
        std::string& line = lines[t.span.line - 1];
        if (line.size() < t.span.column - 1) line.resize(t.span.column - 1, ' ');
        line += t.lexeme;
    }
    std::string rebuilt;
    for (const auto& l : lines) rebuilt += l + "\n";
    CHECK(rebuilt == source);
}

TEST_CASE("tokenize: spans monotone and 1-based") {
    auto toks = tokenize("forall (v in g.nodes()) {\n  v.x = 1;\n}");
    uint32_t line = 1, col = 0;
    for (const auto& t : toks) {
        CHECK(t.span.line >= 1);
        CHECK(t.span.column >= 1);
        CHECK(t.span.line >= line);
        if (t.span.line == line) CHECK(t.span.column >= col);
        line = t.span.line;
        col = t.span.column;
    }
}

TEST_CASE("tokenize: errors carry spans") {
    CHECK_THROWS_AS(tokenize("int x = @;"), CompileError);
    try {
        tokenize("x\n  @");
        FAIL("expected a lex error");
    } catch (const CompileError& e) {
        CHECK(e.kind() == "LexError");
        CHECK(e.span().line == 2);
        CHECK(e.span().column == 3);
    }
    CHECK_THROWS_AS(tokenize("x = 1e;"), CompileError);
}

TEST_CASE("parse: Min construct shape") {
    const char* src =
        "function F(Graph g, propNode<int> dist, propEdge<int> weight) {\n"
        "  propNode<bool> modified;\n"
        "  forall (v in g.nodes()) {\n"
        "    forall (nbr in g.neighbors(v)) {\n"
        "      edge e = g.get_edge(v, nbr);\n"
        "      <nbr.dist, nbr.modified> = <Min(nbr.dist, v.dist + e.weight), True>;\n"
        "    }\n"
        "  }\n"
        "}\n";
    ast::Program p = parseSource(src);
    const auto& outer = p.entry().body.stmts[1]->as<ast::ForAllStmt>();
    const auto& inner = outer.body.stmts[0]->as<ast::ForAllStmt>();
    const auto& mm = inner.body.stmts[1]->as<ast::MinMaxAssignStmt>();
    CHECK(mm.isMin);
    REQUIRE(mm.targets.size() == 2);
    CHECK(mm.targets[0]->is<ast::PropAccess>());
    CHECK(mm.targets[0]->as<ast::PropAccess>().property == "dist");
    CHECK(mm.targets[1]->as<ast::PropAccess>().property == "modified");
    REQUIRE(mm.attachedValues.size() == 1);
    CHECK(mm.attachedValues[0]->is<ast::BoolLit>());
    CHECK(mm.compareCandidate->is<ast::BinaryExpr>());
}

TEST_CASE("parse: fixedPoint header") {
    const char* src =
        "function F(Graph g) {\n"
        "  propNode<bool> modified;\n"
        "  bool fin = False;\n"
        "  fixedPoint until (fin: !modified) {\n"
        "  }\n"
        "}\n";
    ast::Program p = parseSource(src);
    const auto& fp = p.entry().body.stmts[2]->as<ast::FixedPointStmt>();
    CHECK(fp.flag == "fin");
    CHECK(fp.convergence->is<ast::UnaryExpr>());
    CHECK(fp.body.stmts.empty());
}

TEST_CASE("parse: empty forall") {
    ast::Program p = parseSource("function F(Graph g) { forall (v in g.nodes()) { } }");
    const auto& fa = p.entry().body.stmts[0]->as<ast::ForAllStmt>();
    CHECK(fa.parallel);
    CHECK(fa.var == "v");
    CHECK(fa.domain.kind == ast::IterDomainKind::Nodes);
    CHECK(fa.filter == nullptr);
    CHECK(fa.body.stmts.empty());
}

TEST_CASE("parse: iterateInReverse outside iterateInBFS is a structural error") {
    const char* src =
        "function F(Graph g) {\n"
        "  iterateInReverse () { }\n"
        "}\n";
    try {
        parseSource(src);
        FAIL("expected a parse error");
    } catch (const CompileError& e) {
        CHECK(e.kind() == "ParseError");
        CHECK(e.span().line == 2);
        CHECK(std::string(e.what()).find("iterateInBFS") != std::string::npos);
    }
}

TEST_CASE("parse: errors report expected tokens with in-bounds spans") {
    const char* bad[] = {
        "function F(Graph g) { forall v in g.nodes()) { } }",
        "function F(Graph g) { int x = ; }",
        "function",
        "function F(Graph g { }",
        "function F() { <a> = <Min(a, 1)>; extra }",
    };
    for (const char* src : bad) {
        std::string text(src);
        uint32_t lines = 1;
        for (char c : text)
            if (c == '\n') ++lines;
        try {
            parseSource(text);
        } catch (const CompileError& e) {
            CHECK(e.span().line >= 1);
            CHECK(e.span().line <= lines);
            CHECK(std::string(e.what()).find("expected") != std::string::npos);
        }
    }
}

TEST_CASE("parse: never crashes on arbitrary input (fuzz)") {
    std::mt19937_64 rng(2024);
    const std::string alphabet = "abgv.(){}<>=+-*/!&|;:, \n\t0123456789forallminmax_\"'@#$";
    for (int iter = 0; iter < 2000; ++iter) {
        std::string junk;
        size_t len = rng() % 160;
        for (size_t i = 0; i < len; ++i) junk += alphabet[rng() % alphabet.size()];
        try {
            parseSource(junk);
        } catch (const CompileError&) {
            // expected for almost every input
        }
    }
    CHECK(true);
}

TEST_CASE("round-trip: corpus programs") {
    for (const auto& entry : corpus::listCorpus()) {
        ast::Program original = corpus::loadCorpus(entry.name, GRAPHDSL_TEST_CORPUS_DIR);
        std::string printed = prettyPrint(original);
        ast::Program reparsed = parseSource(printed);
        CHECK_MESSAGE(ast::equal(original, reparsed), "round-trip mismatch for ", entry.name);
    }
}

TEST_CASE("round-trip: random programs") {
    for (uint64_t seed = 1; seed <= 60; ++seed) {
        std::string src = testsupport::randomProgramSource(seed);
        ast::Program original = parseSource(src);
        ast::Program reparsed = parseSource(prettyPrint(original));
        CHECK_MESSAGE(ast::equal(original, reparsed), "seed ", seed);
    }
}
