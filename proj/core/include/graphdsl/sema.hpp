#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "graphdsl/ast.hpp"

namespace graphdsl::sema {

enum class SymbolKind {
    Graph,
    Node,
    Edge,
    Scalar,        // int/long/float/double/bool
    NodeProperty,
    EdgeProperty,
    NodeSet,
};

struct Symbol {
    int id = -1;
    std::string name;
    SymbolKind kind = SymbolKind::Scalar;
    ast::TypeRef type;           // declared type (element type for properties)
    SourceSpan declSpan;
    bool isParam = false;
    int declDepth = 0;           // lexical block depth of the declaration
    int declRegion = -1;         // parallel region the decl sits in, -1 = host
};

class SymbolTable {
public:
    const Symbol& at(int id) const { return symbols_.at(id); }
    Symbol& at(int id) { return symbols_.at(id); }
    size_t size() const { return symbols_.size(); }

    int add(Symbol sym) {
        sym.id = static_cast<int>(symbols_.size());
        symbols_.push_back(std::move(sym));
        return symbols_.back().id;
    }

    const std::vector<Symbol>& all() const { return symbols_; }

    // First symbol with the given name (properties are unique per program).
    const Symbol* findByName(const std::string& name) const {
        for (const auto& s : symbols_)
            if (s.name == name) return &s;
        return nullptr;
    }

private:
    std::vector<Symbol> symbols_;
};

// A type-checked program: the AST annotated in place (expression types and
// symbol ids) plus the symbol table and non-fatal diagnostics.
struct AnnotatedProgram {
    ast::Program program;
    SymbolTable symbols;
    std::vector<Diagnostic> warnings;
    std::string sourceName;

    const ast::FunctionDecl& entry() const { return program.entry(); }
};

// Resolves names, checks types, and verifies per-construct rules (Table-1
// reduction typing, Min/Max shape, convergence expressions). Throws
// CompileError("TypeError") on the first hard error; data-race suspicions are
// reported as warnings.
AnnotatedProgram typeCheck(ast::Program program, const std::string& sourceName = "<input>");

}  // namespace graphdsl::sema
