#include "graphdsl/ast.hpp"

namespace graphdsl::ast {

std::string typeName(const TypeRef& t) {
    switch (t.kind) {
        case TypeKind::Void: return "void";
        case TypeKind::Int: return "int";
        case TypeKind::Long: return "long";
        case TypeKind::Float: return "float";
        case TypeKind::Double: return "double";
        case TypeKind::Bool: return "bool";
        case TypeKind::Node: return "node";
        case TypeKind::Edge: return "edge";
        case TypeKind::Graph: return "Graph";
        case TypeKind::NodeProp: return "propNode<" + typeName(TypeRef{t.element}) + ">";
        case TypeKind::EdgeProp: return "propEdge<" + typeName(TypeRef{t.element}) + ">";
        case TypeKind::NodeSet:
            return t.graphParam.empty() ? "setNode" : "setNode<" + t.graphParam + ">";
    }
    return "?";
}

const char* unaryOpToken(UnaryOp op) { return op == UnaryOp::Not ? "!" : "-"; }

const char* binaryOpToken(BinaryOp op) {
    switch (op) {
        case BinaryOp::Add: return "+";
        case BinaryOp::Sub: return "-";
        case BinaryOp::Mul: return "*";
        case BinaryOp::Div: return "/";
        case BinaryOp::Lt: return "<";
        case BinaryOp::Le: return "<=";
        case BinaryOp::Gt: return ">";
        case BinaryOp::Ge: return ">=";
        case BinaryOp::Eq: return "==";
        case BinaryOp::Ne: return "!=";
        case BinaryOp::And: return "&&";
        case BinaryOp::Or: return "||";
    }
    return "?";
}

int binaryOpPrecedence(BinaryOp op) {
    switch (op) {
        case BinaryOp::Mul:
        case BinaryOp::Div: return 6;
        case BinaryOp::Add:
        case BinaryOp::Sub: return 5;
        case BinaryOp::Lt:
        case BinaryOp::Le:
        case BinaryOp::Gt:
        case BinaryOp::Ge: return 4;
        case BinaryOp::Eq:
        case BinaryOp::Ne: return 3;
        case BinaryOp::And: return 2;
        case BinaryOp::Or: return 1;
    }
    return 0;
}

const char* reduceOpName(ReduceOp op) {
    switch (op) {
        case ReduceOp::Sum: return "Sum";
        case ReduceOp::Product: return "Product";
        case ReduceOp::Count: return "Count";
        case ReduceOp::All: return "All";
        case ReduceOp::Any: return "Any";
    }
    return "?";
}

const char* reduceOpToken(ReduceOp op) {
    switch (op) {
        case ReduceOp::Sum: return "+=";
        case ReduceOp::Product: return "*=";
        case ReduceOp::Count: return "++";
        case ReduceOp::All: return "&&=";
        case ReduceOp::Any: return "||=";
    }
    return "?";
}

ExprPtr makeExpr(SourceSpan span, std::variant<IntLit, FloatLit, BoolLit, InfLit, VarRef,
                                               PropAccess, UnaryExpr, BinaryExpr, MethodCall>
                                      node) {
    auto e = std::make_unique<Expr>();
    e->node = std::move(node);
    e->span = span;
    return e;
}

StmtPtr makeStmt(SourceSpan span,
                 std::variant<DeclStmt, AssignStmt, ReduceAssignStmt, MinMaxAssignStmt, ForAllStmt,
                              FixedPointStmt, IterateBfsStmt, IterateRevStmt, IfStmt, CallStmt,
                              ReturnStmt>
                     node) {
    auto s = std::make_unique<Stmt>();
    s->node = std::move(node);
    s->span = span;
    return s;
}

namespace {

bool equalOpt(const ExprPtr& a, const ExprPtr& b) {
    if (!a || !b) return !a && !b;
    return equal(*a, *b);
}

bool equalDomain(const IterDomain& a, const IterDomain& b) {
    if (a.kind != b.kind) return false;
    if (a.graphName != b.graphName) return false;
    if (a.container != b.container) return false;
    return equalOpt(a.source, b.source);
}

}  // namespace

bool equal(const Expr& a, const Expr& b) {
    if (a.node.index() != b.node.index()) return false;
    if (a.is<IntLit>()) return a.as<IntLit>().value == b.as<IntLit>().value;
    if (a.is<FloatLit>()) return a.as<FloatLit>().value == b.as<FloatLit>().value;
    if (a.is<BoolLit>()) return a.as<BoolLit>().value == b.as<BoolLit>().value;
    if (a.is<InfLit>()) return true;
    if (a.is<VarRef>()) return a.as<VarRef>().name == b.as<VarRef>().name;
    if (a.is<PropAccess>()) {
        const auto& x = a.as<PropAccess>();
        const auto& y = b.as<PropAccess>();
        return x.property == y.property && equal(*x.object, *y.object);
    }
    if (a.is<UnaryExpr>()) {
        const auto& x = a.as<UnaryExpr>();
        const auto& y = b.as<UnaryExpr>();
        return x.op == y.op && equal(*x.operand, *y.operand);
    }
    if (a.is<BinaryExpr>()) {
        const auto& x = a.as<BinaryExpr>();
        const auto& y = b.as<BinaryExpr>();
        return x.op == y.op && equal(*x.lhs, *y.lhs) && equal(*x.rhs, *y.rhs);
    }
    if (a.is<MethodCall>()) {
        const auto& x = a.as<MethodCall>();
        const auto& y = b.as<MethodCall>();
        if (x.method != y.method || x.args.size() != y.args.size()) return false;
        if (x.argNames != y.argNames) return false;
        if (!equalOpt(x.object, y.object)) return false;
        for (size_t i = 0; i < x.args.size(); ++i)
            if (!equal(*x.args[i], *y.args[i])) return false;
        return true;
    }
    return false;
}

bool equal(const Block& a, const Block& b) {
    if (a.stmts.size() != b.stmts.size()) return false;
    for (size_t i = 0; i < a.stmts.size(); ++i)
        if (!equal(*a.stmts[i], *b.stmts[i])) return false;
    return true;
}

bool equal(const Stmt& a, const Stmt& b) {
    if (a.node.index() != b.node.index()) return false;
    if (a.is<DeclStmt>()) {
        const auto& x = a.as<DeclStmt>();
        const auto& y = b.as<DeclStmt>();
        return x.type == y.type && x.name == y.name && equalOpt(x.init, y.init);
    }
    if (a.is<AssignStmt>()) {
        const auto& x = a.as<AssignStmt>();
        const auto& y = b.as<AssignStmt>();
        return equal(*x.target, *y.target) && equal(*x.value, *y.value);
    }
    if (a.is<ReduceAssignStmt>()) {
        const auto& x = a.as<ReduceAssignStmt>();
        const auto& y = b.as<ReduceAssignStmt>();
        return x.op == y.op && equal(*x.target, *y.target) && equalOpt(x.value, y.value);
    }
    if (a.is<MinMaxAssignStmt>()) {
        const auto& x = a.as<MinMaxAssignStmt>();
        const auto& y = b.as<MinMaxAssignStmt>();
        if (x.isMin != y.isMin || x.targets.size() != y.targets.size() ||
            x.attachedValues.size() != y.attachedValues.size())
            return false;
        for (size_t i = 0; i < x.targets.size(); ++i)
            if (!equal(*x.targets[i], *y.targets[i])) return false;
        for (size_t i = 0; i < x.attachedValues.size(); ++i)
            if (!equal(*x.attachedValues[i], *y.attachedValues[i])) return false;
        return equal(*x.compareCurrent, *y.compareCurrent) &&
               equal(*x.compareCandidate, *y.compareCandidate);
    }
    if (a.is<ForAllStmt>()) {
        const auto& x = a.as<ForAllStmt>();
        const auto& y = b.as<ForAllStmt>();
        return x.var == y.var && x.parallel == y.parallel && equalDomain(x.domain, y.domain) &&
               equalOpt(x.filter, y.filter) && equal(x.body, y.body);
    }
    if (a.is<FixedPointStmt>()) {
        const auto& x = a.as<FixedPointStmt>();
        const auto& y = b.as<FixedPointStmt>();
        return x.flag == y.flag && equal(*x.convergence, *y.convergence) && equal(x.body, y.body);
    }
    if (a.is<IterateBfsStmt>()) {
        const auto& x = a.as<IterateBfsStmt>();
        const auto& y = b.as<IterateBfsStmt>();
        return x.var == y.var && x.graphName == y.graphName && equal(*x.root, *y.root) &&
               equal(x.body, y.body);
    }
    if (a.is<IterateRevStmt>()) {
        const auto& x = a.as<IterateRevStmt>();
        const auto& y = b.as<IterateRevStmt>();
        return equalOpt(x.filter, y.filter) && equal(x.body, y.body);
    }
    if (a.is<IfStmt>()) {
        const auto& x = a.as<IfStmt>();
        const auto& y = b.as<IfStmt>();
        if (x.elseBlock.has_value() != y.elseBlock.has_value()) return false;
        if (!equal(*x.cond, *y.cond) || !equal(x.thenBlock, y.thenBlock)) return false;
        return !x.elseBlock || equal(*x.elseBlock, *y.elseBlock);
    }
    if (a.is<CallStmt>()) return equal(*a.as<CallStmt>().call, *b.as<CallStmt>().call);
    if (a.is<ReturnStmt>()) return equalOpt(a.as<ReturnStmt>().value, b.as<ReturnStmt>().value);
    return false;
}

bool equal(const Program& a, const Program& b) {
    if (a.functions.size() != b.functions.size()) return false;
    for (size_t f = 0; f < a.functions.size(); ++f) {
        const auto& x = a.functions[f];
        const auto& y = b.functions[f];
        if (x.name != y.name || x.params.size() != y.params.size()) return false;
        for (size_t i = 0; i < x.params.size(); ++i) {
            if (!(x.params[i].type == y.params[i].type) || x.params[i].name != y.params[i].name)
                return false;
        }
        if (!equal(x.body, y.body)) return false;
    }
    return true;
}

ExprPtr clone(const Expr& e) {
    if (e.is<IntLit>()) return makeExpr(e.span, e.as<IntLit>());
    if (e.is<FloatLit>()) return makeExpr(e.span, e.as<FloatLit>());
    if (e.is<BoolLit>()) return makeExpr(e.span, e.as<BoolLit>());
    if (e.is<InfLit>()) return makeExpr(e.span, e.as<InfLit>());
    if (e.is<VarRef>()) return makeExpr(e.span, e.as<VarRef>());
    if (e.is<PropAccess>()) {
        const auto& p = e.as<PropAccess>();
        return makeExpr(e.span, PropAccess{clone(*p.object), p.property});
    }
    if (e.is<UnaryExpr>()) {
        const auto& u = e.as<UnaryExpr>();
        return makeExpr(e.span, UnaryExpr{u.op, clone(*u.operand)});
    }
    if (e.is<BinaryExpr>()) {
        const auto& b = e.as<BinaryExpr>();
        return makeExpr(e.span, BinaryExpr{b.op, clone(*b.lhs), clone(*b.rhs)});
    }
    const auto& m = e.as<MethodCall>();
    MethodCall copy;
    copy.object = m.object ? clone(*m.object) : nullptr;
    copy.method = m.method;
    copy.argNames = m.argNames;
    for (const auto& a : m.args) copy.args.push_back(clone(*a));
    return makeExpr(e.span, std::move(copy));
}

}  // namespace graphdsl::ast
