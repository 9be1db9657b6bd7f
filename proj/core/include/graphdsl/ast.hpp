#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "graphdsl/diagnostics.hpp"

namespace graphdsl::ast {

// ---------------------------------------------------------------------------
// Types
// ---------------------------------------------------------------------------

enum class TypeKind {
    Void,
    Int,     // 64-bit in the interpreter, `int` in emitted code
    Long,
    Float,   // double precision in the interpreter and emitted code
    Double,
    Bool,
    Node,
    Edge,
    Graph,
    NodeProp,
    EdgeProp,
    NodeSet,
};

struct TypeRef {
    TypeKind kind = TypeKind::Void;
    TypeKind element = TypeKind::Void;  // for NodeProp / EdgeProp
    std::string graphParam;             // for NodeSet: setNode<g>

    bool isIntegral() const { return kind == TypeKind::Int || kind == TypeKind::Long; }
    bool isFloating() const { return kind == TypeKind::Float || kind == TypeKind::Double; }
    bool isNumeric() const { return isIntegral() || isFloating(); }
    bool operator==(const TypeRef& o) const { return kind == o.kind && element == o.element; }
};

std::string typeName(const TypeRef& t);

// ---------------------------------------------------------------------------
// Expressions
// ---------------------------------------------------------------------------

struct Expr;
using ExprPtr = std::unique_ptr<Expr>;

enum class UnaryOp { Not, Neg };
enum class BinaryOp { Add, Sub, Mul, Div, Lt, Le, Gt, Ge, Eq, Ne, And, Or };

const char* unaryOpToken(UnaryOp op);
const char* binaryOpToken(BinaryOp op);
int binaryOpPrecedence(BinaryOp op);

struct IntLit {
    int64_t value = 0;
};
struct FloatLit {
    double value = 0.0;
    std::string text;  // original spelling, kept for faithful printing
};
struct BoolLit {
    bool value = false;
};
struct InfLit {};

struct VarRef {
    std::string name;
};

// node-expr . property
struct PropAccess {
    ExprPtr object;
    std::string property;
};

struct UnaryExpr {
    UnaryOp op;
    ExprPtr operand;
};

struct BinaryExpr {
    BinaryOp op;
    ExprPtr lhs;
    ExprPtr rhs;
};

// object.method(args...); object is a Graph for the builtin graph methods.
// argNames[i] is non-empty for named arguments (attachNodeProperty(p = expr));
// argSymbols carries their resolved property symbols after type checking.
struct MethodCall {
    ExprPtr object;
    std::string method;
    std::vector<ExprPtr> args;
    std::vector<std::string> argNames;
    std::vector<int> argSymbols;
};

struct Expr {
    std::variant<IntLit, FloatLit, BoolLit, InfLit, VarRef, PropAccess, UnaryExpr, BinaryExpr,
                 MethodCall>
        node;
    SourceSpan span;

    // Filled by semantic analysis.
    TypeRef type;
    int symbol = -1;  // VarRef: symbol id; PropAccess: property symbol id

    template <typename T>
    bool is() const {
        return std::holds_alternative<T>(node);
    }
    template <typename T>
    T& as() {
        return std::get<T>(node);
    }
    template <typename T>
    const T& as() const {
        return std::get<T>(node);
    }
};

ExprPtr makeExpr(SourceSpan span, std::variant<IntLit, FloatLit, BoolLit, InfLit, VarRef,
                                               PropAccess, UnaryExpr, BinaryExpr, MethodCall>
                                      node);

// ---------------------------------------------------------------------------
// Statements
// ---------------------------------------------------------------------------

struct Stmt;
using StmtPtr = std::unique_ptr<Stmt>;

struct Block {
    std::vector<StmtPtr> stmts;
};

enum class ReduceOp { Sum, Product, Count, All, Any };

const char* reduceOpName(ReduceOp op);
const char* reduceOpToken(ReduceOp op);

// propNode<float> sigma;   int x = 0;
struct DeclStmt {
    TypeRef type;
    std::string name;
    ExprPtr init;  // may be null
    int symbol = -1;
};

// lvalue = expr;  lvalue is VarRef or PropAccess.
struct AssignStmt {
    ExprPtr target;
    ExprPtr value;
};

// lvalue op= expr;  or lvalue++;
struct ReduceAssignStmt {
    ExprPtr target;
    ReduceOp op;
    ExprPtr value;  // null for Count (++)
};

// <t0, t1, ...> = <Min(cur, cand), v1, ...>;
struct MinMaxAssignStmt {
    std::vector<ExprPtr> targets;
    bool isMin = true;
    ExprPtr compareCurrent;    // must match targets[0]
    ExprPtr compareCandidate;  // challenger value
    std::vector<ExprPtr> attachedValues;  // for targets[1..]
};

enum class IterDomainKind { Nodes, Neighbors, NodesTo, Container };

struct IterDomain {
    IterDomainKind kind = IterDomainKind::Nodes;
    std::string graphName;  // for Nodes/Neighbors/NodesTo
    ExprPtr source;         // node expr for Neighbors/NodesTo; null otherwise
    std::string container;  // for Container
    int containerSymbol = -1;
    int graphSymbol = -1;
};

// forall/for (var in domain.filter(f)) { body }
struct ForAllStmt {
    std::string var;
    IterDomain domain;
    ExprPtr filter;  // may be null
    Block body;
    bool parallel = false;
    int varSymbol = -1;
    int regionId = -1;  // parallel region id, set by analysis
};

// fixedPoint until (flag: convergence) { body }
struct FixedPointStmt {
    std::string flag;
    ExprPtr convergence;
    Block body;
    int flagSymbol = -1;
};

// iterateInBFS (var in g.nodes() from root) { body }
struct IterateBfsStmt {
    std::string var;
    std::string graphName;
    ExprPtr root;
    Block body;
    int varSymbol = -1;
    int graphSymbol = -1;
    int regionId = -1;  // forward-pass region id
};

// iterateInReverse (filter) { body } — only inside an iterateInBFS body.
struct IterateRevStmt {
    ExprPtr filter;  // may be null
    Block body;
    int regionId = -1;
};

struct IfStmt {
    ExprPtr cond;
    Block thenBlock;
    std::optional<Block> elseBlock;
};

// expression statement; only method calls are permitted (attachNodeProperty).
struct CallStmt {
    ExprPtr call;
};

struct ReturnStmt {
    ExprPtr value;  // may be null
};

struct Stmt {
    std::variant<DeclStmt, AssignStmt, ReduceAssignStmt, MinMaxAssignStmt, ForAllStmt,
                 FixedPointStmt, IterateBfsStmt, IterateRevStmt, IfStmt, CallStmt, ReturnStmt>
        node;
    SourceSpan span;

    template <typename T>
    bool is() const {
        return std::holds_alternative<T>(node);
    }
    template <typename T>
    T& as() {
        return std::get<T>(node);
    }
    template <typename T>
    const T& as() const {
        return std::get<T>(node);
    }
};

StmtPtr makeStmt(SourceSpan span,
                 std::variant<DeclStmt, AssignStmt, ReduceAssignStmt, MinMaxAssignStmt, ForAllStmt,
                              FixedPointStmt, IterateBfsStmt, IterateRevStmt, IfStmt, CallStmt,
                              ReturnStmt>
                     node);

// ---------------------------------------------------------------------------
// Functions & program
// ---------------------------------------------------------------------------

struct Param {
    TypeRef type;
    std::string name;
    SourceSpan span;
    int symbol = -1;
};

struct FunctionDecl {
    std::string name;
    std::vector<Param> params;
    Block body;
    SourceSpan span;
};

struct Program {
    std::vector<FunctionDecl> functions;
    size_t entryIndex = 0;

    const FunctionDecl& entry() const { return functions.at(entryIndex); }
    FunctionDecl& entry() { return functions.at(entryIndex); }
};

// Structural equality ignoring spans and annotations (used by round-trip tests).
bool equal(const Expr& a, const Expr& b);
bool equal(const Stmt& a, const Stmt& b);
bool equal(const Block& a, const Block& b);
bool equal(const Program& a, const Program& b);

// Deep copy (annotations are not copied).
ExprPtr clone(const Expr& e);

}  // namespace graphdsl::ast
