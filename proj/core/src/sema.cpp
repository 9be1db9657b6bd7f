#include "graphdsl/sema.hpp"

#include <cassert>
#include <functional>
#include <map>

namespace graphdsl::sema {

using namespace ast;

namespace {

bool isScalarKind(TypeKind k) {
    return k == TypeKind::Int || k == TypeKind::Long || k == TypeKind::Float ||
           k == TypeKind::Double || k == TypeKind::Bool;
}

// Numeric promotion lattice: int < long < float < double.
int numericRank(TypeKind k) {
    switch (k) {
        case TypeKind::Int: return 0;
        case TypeKind::Long: return 1;
        case TypeKind::Float: return 2;
        case TypeKind::Double: return 3;
        default: return -1;
    }
}

TypeKind promote(TypeKind a, TypeKind b) { return numericRank(a) >= numericRank(b) ? a : b; }

// Assignment compatibility: numeric widening is implicit; bool/node/edge are
// exact.
bool assignable(TypeKind target, TypeKind value) {
    if (target == value) return true;
    int rt = numericRank(target), rv = numericRank(value);
    if (rt >= 0 && rv >= 0) return rt >= rv;
    return false;
}

class Checker {
public:
    explicit Checker(Program program, std::string sourceName)
        : result_{std::move(program), {}, {}, std::move(sourceName)} {}

    AnnotatedProgram run() {
        for (auto& fn : result_.program.functions) checkFunction(fn);
        return std::move(result_);
    }

private:
    AnnotatedProgram result_;
    std::vector<std::map<std::string, int>> scopes_;
    int blockDepth_ = 0;
    int parallelDepth_ = 0;
    bool inFixedPoint_ = false;
    bool inBfs_ = false;
    TypeRef returnType_;
    bool sawReturn_ = false;

    [[noreturn]] void err(SourceSpan span, const std::string& msg) { throw typeError(span, msg); }

    void warn(SourceSpan span, const std::string& msg) {
        result_.warnings.push_back({Severity::Warning, span, msg});
    }

    // ---- scope helpers ----

    void pushScope() { scopes_.emplace_back(); }
    void popScope() { scopes_.pop_back(); }

    int declare(const std::string& name, SymbolKind kind, TypeRef type, SourceSpan span,
                bool isParam) {
        auto& scope = scopes_.back();
        if (scope.count(name))
            err(span, "redeclaration of '" + name + "' in the same scope");
        Symbol s;
        s.name = name;
        s.kind = kind;
        s.type = type;
        s.declSpan = span;
        s.isParam = isParam;
        s.declDepth = blockDepth_;
        s.declRegion = parallelDepth_ > 0 ? 0 : -1;
        int id = result_.symbols.add(std::move(s));
        scope[name] = id;
        return id;
    }

    const Symbol* lookup(const std::string& name) const {
        for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
            auto f = it->find(name);
            if (f != it->end()) return &result_.symbols.at(f->second);
        }
        return nullptr;
    }

    const Symbol& resolve(const std::string& name, SourceSpan span) {
        const Symbol* s = lookup(name);
        if (!s) err(span, "use of undeclared identifier '" + name + "'");
        return *s;
    }

    // ---- function ----

    void checkFunction(FunctionDecl& fn) {
        scopes_.clear();
        pushScope();
        blockDepth_ = 0;
        parallelDepth_ = 0;
        inFixedPoint_ = false;
        inBfs_ = false;
        returnType_ = TypeRef{TypeKind::Void};
        sawReturn_ = false;

        for (auto& p : fn.params) {
            SymbolKind kind;
            switch (p.type.kind) {
                case TypeKind::Graph: kind = SymbolKind::Graph; break;
                case TypeKind::Node: kind = SymbolKind::Node; break;
                case TypeKind::Edge: kind = SymbolKind::Edge; break;
                case TypeKind::NodeProp: kind = SymbolKind::NodeProperty; break;
                case TypeKind::EdgeProp: kind = SymbolKind::EdgeProperty; break;
                case TypeKind::NodeSet: {
                    kind = SymbolKind::NodeSet;
                    const Symbol* g = lookup(p.type.graphParam);
                    if (!g || g->kind != SymbolKind::Graph)
                        err(p.span, "setNode<" + p.type.graphParam +
                                        ">: no Graph parameter named '" + p.type.graphParam + "'");
                    break;
                }
                default:
                    if (!isScalarKind(p.type.kind))
                        err(p.span, "invalid parameter type " + typeName(p.type));
                    kind = SymbolKind::Scalar;
                    break;
            }
            p.symbol = declare(p.name, kind, p.type, p.span, true);
        }
        checkBlock(fn.body);
        popScope();
    }

    void checkBlock(Block& b) {
        pushScope();
        ++blockDepth_;
        for (auto& s : b.stmts) checkStmt(*s);
        --blockDepth_;
        popScope();
    }

    // ---- statements ----

    void checkStmt(Stmt& s) {
        if (s.is<DeclStmt>()) return checkDecl(s);
        if (s.is<AssignStmt>()) return checkAssign(s);
        if (s.is<ReduceAssignStmt>()) return checkReduceAssign(s);
        if (s.is<MinMaxAssignStmt>()) return checkMinMax(s);
        if (s.is<ForAllStmt>()) return checkForAll(s);
        if (s.is<FixedPointStmt>()) return checkFixedPoint(s);
        if (s.is<IterateBfsStmt>()) return checkBfs(s);
        if (s.is<IterateRevStmt>()) return checkReverse(s);
        if (s.is<IfStmt>()) return checkIf(s);
        if (s.is<CallStmt>()) return checkCall(s);
        if (s.is<ReturnStmt>()) return checkReturn(s);
    }

    void checkDecl(Stmt& s) {
        auto& d = s.as<DeclStmt>();
        SymbolKind kind;
        switch (d.type.kind) {
            case TypeKind::NodeProp: kind = SymbolKind::NodeProperty; break;
            case TypeKind::EdgeProp: kind = SymbolKind::EdgeProperty; break;
            case TypeKind::Node: kind = SymbolKind::Node; break;
            case TypeKind::Edge: kind = SymbolKind::Edge; break;
            case TypeKind::Graph: err(s.span, "Graph variables can only be parameters");
            case TypeKind::NodeSet: err(s.span, "setNode variables can only be parameters");
            default: kind = SymbolKind::Scalar; break;
        }
        if (d.init) {
            TypeRef t = checkExpr(*d.init);
            if (kind == SymbolKind::NodeProperty || kind == SymbolKind::EdgeProperty)
                err(s.span, "property declarations cannot have initializers; use attachNodeProperty");
            if (!assignable(d.type.kind, t.kind))
                err(d.init->span, "cannot initialize " + typeName(d.type) + " '" + d.name +
                                      "' with a value of type " + typeName(t));
        }
        if ((kind == SymbolKind::NodeProperty || kind == SymbolKind::EdgeProperty) &&
            parallelDepth_ > 0)
            err(s.span, "properties must be declared outside parallel loops");
        d.symbol = declare(d.name, kind, d.type, s.span, false);
    }

    TypeRef checkLValue(Expr& e) {
        if (e.is<VarRef>()) {
            const Symbol& sym = resolve(e.as<VarRef>().name, e.span);
            if (sym.kind == SymbolKind::Graph || sym.kind == SymbolKind::NodeSet ||
                sym.kind == SymbolKind::NodeProperty || sym.kind == SymbolKind::EdgeProperty)
                err(e.span, "'" + sym.name + "' is not assignable");
            e.symbol = sym.id;
            e.type = sym.type;
            return sym.type;
        }
        if (e.is<PropAccess>()) return checkExpr(e);
        err(e.span, "expected an assignable variable or property access");
    }

    void checkAssign(Stmt& s) {
        auto& a = s.as<AssignStmt>();
        TypeRef target = checkLValue(*a.target);
        TypeRef value = checkExpr(*a.value);
        if (!assignable(target.kind == TypeKind::NodeProp || target.kind == TypeKind::EdgeProp
                            ? target.element
                            : target.kind,
                        value.kind))
            err(a.value->span, "cannot assign " + typeName(value) + " to " + typeName(target));
        maybeWarnScalarRace(*a.target, s.span);
    }

    void checkReduceAssign(Stmt& s) {
        auto& r = s.as<ReduceAssignStmt>();
        TypeRef target = checkLValue(*r.target);
        TypeKind elem = target.kind == TypeKind::NodeProp || target.kind == TypeKind::EdgeProp
                            ? target.element
                            : target.kind;
        switch (r.op) {
            case ReduceOp::Sum:
            case ReduceOp::Product:
                if (numericRank(elem) < 0)
                    err(s.span, std::string(reduceOpName(r.op)) +
                                    "-reduction requires a numeric target, got " + typeName(target));
                break;
            case ReduceOp::Count:
                if (elem != TypeKind::Int && elem != TypeKind::Long)
                    err(s.span, "Count-reduction (++) requires an integer target, got " +
                                    typeName(target));
                break;
            case ReduceOp::All:
            case ReduceOp::Any:
                if (elem != TypeKind::Bool)
                    err(s.span, std::string(reduceOpName(r.op)) +
                                    "-reduction requires a bool target, got " + typeName(target));
                break;
        }
        if (r.value) {
            TypeRef v = checkExpr(*r.value);
            if (!assignable(elem, v.kind))
                err(r.value->span,
                    "cannot combine " + typeName(v) + " into " + typeName(target));
        }
    }

    void checkMinMax(Stmt& s) {
        auto& m = s.as<MinMaxAssignStmt>();
        if (m.targets.empty()) err(s.span, "Min/Max assignment needs at least one target");
        std::vector<TypeRef> targetTypes;
        for (auto& t : m.targets) targetTypes.push_back(checkLValue(*t));
        if (!ast::equal(*m.targets[0], *m.compareCurrent))
            err(m.compareCurrent->span,
                "the first Min/Max argument must be the first assignment target");
        TypeRef cur = checkExpr(*m.compareCurrent);
        TypeRef cand = checkExpr(*m.compareCandidate);
        if (numericRank(cur.kind) < 0 || numericRank(cand.kind) < 0)
            err(s.span, "Min/Max comparison requires numeric operands");
        TypeKind t0 = targetTypes[0].kind == TypeKind::NodeProp ? targetTypes[0].element
                                                                : targetTypes[0].kind;
        if (!assignable(t0, cand.kind))
            err(m.compareCandidate->span, "cannot assign " + typeName(cand) + " to " +
                                              typeName(targetTypes[0]) + " via Min/Max");
        for (size_t i = 0; i < m.attachedValues.size(); ++i) {
            TypeRef v = checkExpr(*m.attachedValues[i]);
            TypeRef tt = targetTypes[i + 1];
            TypeKind elem =
                tt.kind == TypeKind::NodeProp || tt.kind == TypeKind::EdgeProp ? tt.element : tt.kind;
            if (!assignable(elem, v.kind))
                err(m.attachedValues[i]->span,
                    "attached value type " + typeName(v) + " does not match target " + typeName(tt));
        }
    }

    void checkForAll(Stmt& s) {
        auto& f = s.as<ForAllStmt>();
        TypeKind varType = TypeKind::Node;
        switch (f.domain.kind) {
            case IterDomainKind::Nodes: {
                const Symbol& g = resolve(f.domain.graphName, s.span);
                if (g.kind != SymbolKind::Graph)
                    err(s.span, "'" + f.domain.graphName + "' is not a Graph");
                f.domain.graphSymbol = g.id;
                break;
            }
            case IterDomainKind::Neighbors:
            case IterDomainKind::NodesTo: {
                const Symbol& g = resolve(f.domain.graphName, s.span);
                if (g.kind != SymbolKind::Graph)
                    err(s.span, "'" + f.domain.graphName + "' is not a Graph");
                f.domain.graphSymbol = g.id;
                TypeRef src = checkExpr(*f.domain.source);
                if (src.kind != TypeKind::Node)
                    err(f.domain.source->span, "iteration source must be a node");
                break;
            }
            case IterDomainKind::Container: {
                const Symbol& c = resolve(f.domain.container, s.span);
                if (c.kind != SymbolKind::NodeSet)
                    err(s.span, "'" + f.domain.container + "' is not a node set");
                f.domain.containerSymbol = c.id;
                break;
            }
        }
        pushScope();
        ++blockDepth_;
        f.varSymbol = declare(f.var, SymbolKind::Node, TypeRef{varType}, s.span, false);
        if (f.filter) {
            TypeRef ft = checkExpr(*f.filter);
            if (ft.kind != TypeKind::Bool) err(f.filter->span, "filter expression must be bool");
        }
        // Container iteration stays on the host; everything else may become a
        // parallel region when spelled `forall`.
        bool entersParallel = f.parallel && f.domain.kind != IterDomainKind::Container;
        if (entersParallel) ++parallelDepth_;
        checkBlock(f.body);
        if (entersParallel) --parallelDepth_;
        --blockDepth_;
        popScope();
    }

    void checkFixedPoint(Stmt& s) {
        auto& f = s.as<FixedPointStmt>();
        if (parallelDepth_ > 0) err(s.span, "fixedPoint cannot appear inside a parallel loop");
        if (inFixedPoint_) err(s.span, "nested fixedPoint loops are not supported");
        const Symbol& flag = resolve(f.flag, s.span);
        if (flag.kind != SymbolKind::Scalar || flag.type.kind != TypeKind::Bool)
            err(s.span, "fixedPoint flag '" + f.flag + "' must be a bool variable");
        f.flagSymbol = flag.id;

        // Convergence expression: a bool node property or its negation.
        const Expr* conv = f.convergence.get();
        bool negated = false;
        if (conv->is<UnaryExpr>() && conv->as<UnaryExpr>().op == UnaryOp::Not) {
            negated = true;
            conv = conv->as<UnaryExpr>().operand.get();
        }
        if (!conv->is<VarRef>())
            err(f.convergence->span,
                "convergence expression must be a bool node property or its negation");
        const Symbol& prop = resolve(conv->as<VarRef>().name, f.convergence->span);
        if (prop.kind != SymbolKind::NodeProperty || prop.type.element != TypeKind::Bool)
            err(f.convergence->span,
                "convergence expression must name a propNode<bool>, got '" + prop.name + "'");
        // Annotate both the inner VarRef and the top-level expression.
        const_cast<Expr*>(conv)->symbol = prop.id;
        const_cast<Expr*>(conv)->type = TypeRef{TypeKind::Bool};
        f.convergence->type = TypeRef{TypeKind::Bool};

        inFixedPoint_ = true;
        checkBlock(f.body);
        inFixedPoint_ = false;
        (void)negated;
    }

    void checkBfs(Stmt& s) {
        auto& b = s.as<IterateBfsStmt>();
        if (parallelDepth_ > 0) err(s.span, "iterateInBFS cannot appear inside a parallel loop");
        if (inBfs_) err(s.span, "nested iterateInBFS loops are not supported");
        const Symbol& g = resolve(b.graphName, s.span);
        if (g.kind != SymbolKind::Graph) err(s.span, "'" + b.graphName + "' is not a Graph");
        b.graphSymbol = g.id;
        TypeRef root = checkExpr(*b.root);
        if (root.kind != TypeKind::Node) err(b.root->span, "BFS root must be a node");
        pushScope();
        ++blockDepth_;
        b.varSymbol = declare(b.var, SymbolKind::Node, TypeRef{TypeKind::Node}, s.span, false);
        inBfs_ = true;
        ++parallelDepth_;
        checkBlock(b.body);
        --parallelDepth_;
        inBfs_ = false;
        --blockDepth_;
        popScope();
    }

    void checkReverse(Stmt& s) {
        auto& r = s.as<IterateRevStmt>();
        if (!inBfs_) err(s.span, "iterateInReverse must appear inside an iterateInBFS body");
        if (r.filter) {
            TypeRef t = checkExpr(*r.filter);
            if (t.kind != TypeKind::Bool) err(r.filter->span, "filter expression must be bool");
        }
        checkBlock(r.body);
    }

    void checkIf(Stmt& s) {
        auto& i = s.as<IfStmt>();
        TypeRef c = checkExpr(*i.cond);
        if (c.kind != TypeKind::Bool) err(i.cond->span, "if condition must be bool");
        checkBlock(i.thenBlock);
        if (i.elseBlock) checkBlock(*i.elseBlock);
    }

    void checkCall(Stmt& s) {
        auto& c = s.as<CallStmt>();
        if (!c.call->is<MethodCall>()) err(s.span, "expression statements must be method calls");
        checkExpr(*c.call, /*asStatement=*/true);
    }

    void checkReturn(Stmt& s) {
        auto& r = s.as<ReturnStmt>();
        if (parallelDepth_ > 0) err(s.span, "return cannot appear inside a parallel loop");
        TypeRef t{TypeKind::Void};
        if (r.value) t = checkExpr(*r.value);
        if (sawReturn_ && !(returnType_ == t))
            err(s.span, "conflicting return types in one function");
        returnType_ = t;
        sawReturn_ = true;
    }

    void maybeWarnScalarRace(const Expr& target, SourceSpan span) {
        if (parallelDepth_ == 0) return;
        if (!target.is<VarRef>()) return;
        const Symbol& sym = result_.symbols.at(target.symbol);
        if (sym.kind != SymbolKind::Scalar) return;
        if (sym.declRegion >= 0) return;  // local to the parallel body
        warn(span, "plain write to shared scalar '" + sym.name +
                       "' inside a parallel loop has an unspecified winner (DataRaceWarning); "
                       "use a reduction operator");
    }

    // ---- expressions ----

    TypeRef checkExpr(Expr& e, bool asStatement = false) {
        if (e.is<IntLit>()) return e.type = TypeRef{TypeKind::Int};
        if (e.is<FloatLit>()) return e.type = TypeRef{TypeKind::Float};
        if (e.is<BoolLit>()) return e.type = TypeRef{TypeKind::Bool};
        if (e.is<InfLit>()) return e.type = TypeRef{TypeKind::Int};
        if (e.is<VarRef>()) {
            const Symbol& sym = resolve(e.as<VarRef>().name, e.span);
            if (sym.kind == SymbolKind::NodeProperty || sym.kind == SymbolKind::EdgeProperty)
                err(e.span, "property '" + sym.name +
                                "' must be accessed through a node or edge (v." + sym.name + ")");
            e.symbol = sym.id;
            switch (sym.kind) {
                case SymbolKind::Graph: return e.type = TypeRef{TypeKind::Graph};
                case SymbolKind::Node: return e.type = TypeRef{TypeKind::Node};
                case SymbolKind::Edge: return e.type = TypeRef{TypeKind::Edge};
                case SymbolKind::NodeSet: return e.type = sym.type;
                default: return e.type = sym.type;
            }
        }
        if (e.is<PropAccess>()) {
            auto& p = e.as<PropAccess>();
            TypeRef obj = checkExpr(*p.object);
            const Symbol* prop = lookup(p.property);
            if (!prop) err(e.span, "use of undeclared property '" + p.property + "'");
            if (obj.kind == TypeKind::Node) {
                if (prop->kind != SymbolKind::NodeProperty)
                    err(e.span, "'" + p.property + "' is not a node property");
            } else if (obj.kind == TypeKind::Edge) {
                if (prop->kind != SymbolKind::EdgeProperty)
                    err(e.span, "'" + p.property + "' is not an edge property");
            } else {
                err(p.object->span, "properties attach to nodes or edges, not " + typeName(obj));
            }
            e.symbol = prop->id;
            return e.type = TypeRef{prop->type.element};
        }
        if (e.is<UnaryExpr>()) {
            auto& u = e.as<UnaryExpr>();
            TypeRef t = checkExpr(*u.operand);
            if (u.op == UnaryOp::Not) {
                if (t.kind != TypeKind::Bool) err(e.span, "'!' requires a bool operand");
                return e.type = TypeRef{TypeKind::Bool};
            }
            if (numericRank(t.kind) < 0) err(e.span, "unary '-' requires a numeric operand");
            return e.type = t;
        }
        if (e.is<BinaryExpr>()) {
            auto& b = e.as<BinaryExpr>();
            TypeRef lt = checkExpr(*b.lhs);
            TypeRef rt = checkExpr(*b.rhs);
            switch (b.op) {
                case BinaryOp::Add:
                case BinaryOp::Sub:
                case BinaryOp::Mul:
                case BinaryOp::Div:
                    if (numericRank(lt.kind) < 0 || numericRank(rt.kind) < 0)
                        err(e.span, std::string("'") + binaryOpToken(b.op) +
                                        "' requires numeric operands, got " + typeName(lt) +
                                        " and " + typeName(rt));
                    return e.type = TypeRef{promote(lt.kind, rt.kind)};
                case BinaryOp::Lt:
                case BinaryOp::Le:
                case BinaryOp::Gt:
                case BinaryOp::Ge:
                    if (!((numericRank(lt.kind) >= 0 && numericRank(rt.kind) >= 0) ||
                          (lt.kind == TypeKind::Node && rt.kind == TypeKind::Node)))
                        err(e.span, std::string("'") + binaryOpToken(b.op) +
                                        "' cannot compare " + typeName(lt) + " and " + typeName(rt));
                    return e.type = TypeRef{TypeKind::Bool};
                case BinaryOp::Eq:
                case BinaryOp::Ne: {
                    bool ok = (numericRank(lt.kind) >= 0 && numericRank(rt.kind) >= 0) ||
                              (lt.kind == rt.kind &&
                               (lt.kind == TypeKind::Bool || lt.kind == TypeKind::Node ||
                                lt.kind == TypeKind::Edge));
                    if (!ok)
                        err(e.span, std::string("'") + binaryOpToken(b.op) +
                                        "' cannot compare " + typeName(lt) + " and " + typeName(rt));
                    return e.type = TypeRef{TypeKind::Bool};
                }
                case BinaryOp::And:
                case BinaryOp::Or:
                    if (lt.kind != TypeKind::Bool || rt.kind != TypeKind::Bool)
                        err(e.span, std::string("'") + binaryOpToken(b.op) +
                                        "' requires bool operands");
                    return e.type = TypeRef{TypeKind::Bool};
            }
        }
        if (e.is<MethodCall>()) return checkMethodCall(e, asStatement);
        err(e.span, "unsupported expression");
    }

    TypeRef checkMethodCall(Expr& e, bool asStatement) {
        auto& m = e.as<MethodCall>();
        if (!m.object) err(e.span, "free functions are not supported");
        TypeRef obj = checkExpr(*m.object);
        if (obj.kind != TypeKind::Graph)
            err(m.object->span, "methods are only available on Graph values");

        auto expectArgs = [&](size_t n) {
            if (m.args.size() != n)
                err(e.span, "g." + m.method + " expects " + std::to_string(n) + " argument(s)");
            for (const auto& name : m.argNames)
                if (!name.empty())
                    err(e.span, "g." + m.method + " does not take named arguments");
        };
        auto nodeArg = [&](size_t i) {
            TypeRef t = checkExpr(*m.args[i]);
            if (t.kind != TypeKind::Node)
                err(m.args[i]->span, "argument of g." + m.method + " must be a node");
        };

        if (m.method == "num_nodes") {
            expectArgs(0);
            return e.type = TypeRef{TypeKind::Int};
        }
        if (m.method == "count_outNbrs") {
            expectArgs(1);
            nodeArg(0);
            return e.type = TypeRef{TypeKind::Int};
        }
        if (m.method == "is_an_edge") {
            expectArgs(2);
            nodeArg(0);
            nodeArg(1);
            return e.type = TypeRef{TypeKind::Bool};
        }
        if (m.method == "get_edge") {
            expectArgs(2);
            nodeArg(0);
            nodeArg(1);
            return e.type = TypeRef{TypeKind::Edge};
        }
        if (m.method == "minWt" || m.method == "maxWt") {
            expectArgs(0);
            return e.type = TypeRef{TypeKind::Int};
        }
        if (m.method == "attachNodeProperty") {
            if (!asStatement)
                err(e.span, "attachNodeProperty is a statement, not an expression");
            if (m.args.empty()) err(e.span, "attachNodeProperty needs at least one property");
            if (parallelDepth_ > 0)
                err(e.span, "attachNodeProperty cannot appear inside a parallel loop");
            m.argSymbols.clear();
            for (size_t i = 0; i < m.args.size(); ++i) {
                if (i >= m.argNames.size() || m.argNames[i].empty())
                    err(m.args[i]->span, "attachNodeProperty arguments must be 'prop = value'");
                const Symbol* prop = lookup(m.argNames[i]);
                if (!prop || prop->kind != SymbolKind::NodeProperty)
                    err(m.args[i]->span,
                        "attachNodeProperty: '" + m.argNames[i] + "' is not a declared node property");
                TypeRef v = checkExpr(*m.args[i]);
                if (!assignable(prop->type.element, v.kind))
                    err(m.args[i]->span, "cannot initialize " + typeName(prop->type) + " '" +
                                             m.argNames[i] + "' with " + typeName(v));
                m.argSymbols.push_back(prop->id);
            }
            return e.type = TypeRef{TypeKind::Void};
        }
        if (m.method == "nodes" || m.method == "neighbors" || m.method == "nodes_to")
            err(e.span, "g." + m.method + " can only be used as an iteration domain");
        err(e.span, "unknown graph method '" + m.method + "'");
    }
};

}  // namespace

AnnotatedProgram typeCheck(Program program, const std::string& sourceName) {
    return Checker(std::move(program), sourceName).run();
}

}  // namespace graphdsl::sema
