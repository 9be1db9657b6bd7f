#include <algorithm>
#include <cctype>

#include "codegen_internal.hpp"

namespace graphdsl::codegen {

using namespace ast;
using sema::Symbol;
using sema::SymbolKind;

const char* backendName(BackendKind b) {
    switch (b) {
        case BackendKind::Cuda: return "cuda";
        case BackendKind::OpenAcc: return "openacc";
        case BackendKind::Sycl: return "sycl";
        case BackendKind::OpenCl: return "opencl";
    }
    return "?";
}

BackendKind backendFromName(const std::string& name) {
    if (name == "cuda") return BackendKind::Cuda;
    if (name == "openacc") return BackendKind::OpenAcc;
    if (name == "sycl") return BackendKind::Sycl;
    if (name == "opencl") return BackendKind::OpenCl;
    throw std::invalid_argument("unknown backend '" + name +
                                "' (expected cuda|openacc|sycl|opencl)");
}

Analyses analyzeAll(sema::AnnotatedProgram& program) {
    Analyses a;
    a.transfers = sema::analyzeTransfers(program);
    a.reductions = sema::detectReductions(program, a.transfers);
    return a;
}

EmitUnit generate(const sema::AnnotatedProgram& program, const Analyses& analyses,
                  BackendKind backend, const CodegenConfig& cfg, const std::string& unitName) {
    CodegenConfig effective = cfg;
    if (backend == BackendKind::OpenCl) effective.floatAtomicsEmulation = true;
    if (effective.numThreads <= 0)
        throw std::invalid_argument("NUM_THREADS must be positive");
    std::string name = unitName.empty() ? loweredName(program.entry().name) : unitName;
    LoweringPlan plan = buildPlan(program, analyses, name);
    switch (backend) {
        case BackendKind::Cuda: return generateCuda(program, analyses, effective, plan);
        case BackendKind::OpenAcc: return generateOpenAcc(program, analyses, effective, plan);
        case BackendKind::Sycl: return generateSycl(program, analyses, effective, plan);
        case BackendKind::OpenCl: return generateOpenCl(program, analyses, effective, plan);
    }
    throw std::logic_error("unreachable backend");
}

std::string loweredName(const std::string& name) {
    std::string out;
    for (char c : name) {
        if (std::isalnum(static_cast<unsigned char>(c)) || c == '_')
            out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    if (out.empty()) out = "program";
    return out;
}

std::string cType(TypeKind kind, bool boolAsInt) {
    switch (kind) {
        case TypeKind::Int: return "int";
        case TypeKind::Long: return "long long";
        case TypeKind::Float:
        case TypeKind::Double: return "double";
        case TypeKind::Bool: return boolAsInt ? "int" : "bool";
        case TypeKind::Node:
        case TypeKind::Edge: return "int";
        default: return "int";
    }
}

bool isFloatElem(TypeKind k) { return k == TypeKind::Float || k == TypeKind::Double; }

std::string floatLitText(const FloatLit& f) {
    if (!f.text.empty()) return f.text;
    std::ostringstream os;
    os.precision(17);
    os << f.value;
    std::string s = os.str();
    if (s.find('.') == std::string::npos && s.find('e') == std::string::npos) s += ".0";
    return s;
}

std::string ExprEmitter::emit(const Expr& e, int minPrec) {
    if (e.is<IntLit>()) return std::to_string(e.as<IntLit>().value);
    if (e.is<FloatLit>()) return floatLitText(e.as<FloatLit>());
    if (e.is<BoolLit>()) return boolLit(e.as<BoolLit>().value);
    if (e.is<InfLit>()) return infLit();
    if (e.is<VarRef>()) return scalarRef(e.symbol);
    if (e.is<PropAccess>()) {
        const auto& p = e.as<PropAccess>();
        std::string obj = emit(*p.object, 10);
        const Symbol& ps = prog->symbols.at(e.symbol);
        if (ps.kind == SymbolKind::EdgeProperty) return edgeWeightRef(obj);
        return propRef(e.symbol, obj);
    }
    if (e.is<UnaryExpr>()) {
        const auto& u = e.as<UnaryExpr>();
        std::string inner = std::string(unaryOpToken(u.op)) + emit(*u.operand, 7);
        return minPrec > 7 ? "(" + inner + ")" : inner;
    }
    if (e.is<BinaryExpr>()) {
        const auto& b = e.as<BinaryExpr>();
        int prec = binaryOpPrecedence(b.op);
        std::string inner =
            emit(*b.lhs, prec) + " " + binaryOpToken(b.op) + " " + emit(*b.rhs, prec + 1);
        return prec < minPrec ? "(" + inner + ")" : inner;
    }
    const auto& m = e.as<MethodCall>();
    return graphMethod(m, e);
}

namespace {

// Host-side reads/writes of store symbols inside a statement subtree,
// EXCLUDING parallel-region subtrees (those run on the device).
class HostTouchCollector {
public:
    explicit HostTouchCollector(const sema::AnnotatedProgram& prog) : prog_(prog) {}

    std::set<int> touched(const Block& b) {
        touched_.clear();
        block(b);
        return touched_;
    }

private:
    const sema::AnnotatedProgram& prog_;
    std::set<int> touched_;

    bool isRegionStmt(const Stmt& s) const {
        if (s.is<IterateBfsStmt>()) return true;
        if (s.is<ForAllStmt>()) {
            const auto& f = s.as<ForAllStmt>();
            return f.parallel && f.domain.kind != IterDomainKind::Container;
        }
        return false;
    }

    void expr(const Expr& e) {
        if (e.is<VarRef>() && e.symbol >= 0) touched_.insert(e.symbol);
        if (e.is<PropAccess>()) {
            if (e.symbol >= 0) touched_.insert(e.symbol);
            expr(*e.as<PropAccess>().object);
        }
        if (e.is<UnaryExpr>()) expr(*e.as<UnaryExpr>().operand);
        if (e.is<BinaryExpr>()) {
            expr(*e.as<BinaryExpr>().lhs);
            expr(*e.as<BinaryExpr>().rhs);
        }
        if (e.is<MethodCall>()) {
            const auto& m = e.as<MethodCall>();
            for (size_t i = 0; i < m.args.size(); ++i) expr(*m.args[i]);
            for (int s : m.argSymbols) touched_.insert(s);
        }
    }

    void block(const Block& b) {
        for (const auto& sp : b.stmts) stmt(*sp);
    }

    void stmt(const Stmt& s) {
        if (isRegionStmt(s)) return;  // device side
        if (s.is<DeclStmt>()) {
            const auto& d = s.as<DeclStmt>();
            touched_.insert(d.symbol);
            if (d.init) expr(*d.init);
        } else if (s.is<AssignStmt>()) {
            expr(*s.as<AssignStmt>().target);
            expr(*s.as<AssignStmt>().value);
        } else if (s.is<ReduceAssignStmt>()) {
            expr(*s.as<ReduceAssignStmt>().target);
            if (s.as<ReduceAssignStmt>().value) expr(*s.as<ReduceAssignStmt>().value);
        } else if (s.is<MinMaxAssignStmt>()) {
            const auto& m = s.as<MinMaxAssignStmt>();
            for (const auto& t : m.targets) expr(*t);
            expr(*m.compareCandidate);
            for (const auto& v : m.attachedValues) expr(*v);
        } else if (s.is<ForAllStmt>()) {
            const auto& f = s.as<ForAllStmt>();
            touched_.insert(f.varSymbol);
            if (f.domain.source) expr(*f.domain.source);
            if (f.filter) expr(*f.filter);
            block(f.body);
        } else if (s.is<FixedPointStmt>()) {
            const auto& f = s.as<FixedPointStmt>();
            touched_.insert(f.flagSymbol);  // reset + loop condition
            block(f.body);
        } else if (s.is<IfStmt>()) {
            expr(*s.as<IfStmt>().cond);
            block(s.as<IfStmt>().thenBlock);
            if (s.as<IfStmt>().elseBlock) block(*s.as<IfStmt>().elseBlock);
        } else if (s.is<CallStmt>()) {
            expr(*s.as<CallStmt>().call);
        } else if (s.is<ReturnStmt>()) {
            if (s.as<ReturnStmt>().value) expr(*s.as<ReturnStmt>().value);
        }
    }
};

struct ScopeSite {
    const Stmt* firstStmt;                 // first region statement of the scope
    const sema::TransferScope* scope;
    std::vector<const Stmt*> loopChain;    // innermost-first enclosing host loops
};

// Finds each scope's first statement and the chain of enclosing host loops.
class ScopeLocator {
public:
    ScopeLocator(const sema::AnnotatedProgram& prog, const sema::TransferAnalysis& ta)
        : prog_(prog), ta_(ta) {}

    std::vector<ScopeSite> locate() {
        block(prog_.entry().body);
        return std::move(sites_);
    }

private:
    const sema::AnnotatedProgram& prog_;
    const sema::TransferAnalysis& ta_;
    std::vector<const Stmt*> loops_;
    std::vector<ScopeSite> sites_;

    void block(const Block& b) {
        for (const auto& sp : b.stmts) {
            const Stmt& s = *sp;
            for (const auto& scope : ta_.scopes) {
                if (ta_.regions[scope.regions.front()].stmt == &s) {
                    ScopeSite site;
                    site.firstStmt = &s;
                    site.scope = &scope;
                    site.loopChain.assign(loops_.rbegin(), loops_.rend());
                    sites_.push_back(site);
                }
            }
            if (s.is<ForAllStmt>()) {
                const auto& f = s.as<ForAllStmt>();
                bool isRegion = f.parallel && f.domain.kind != IterDomainKind::Container;
                if (!isRegion) {
                    loops_.push_back(&s);
                    block(f.body);
                    loops_.pop_back();
                }
            } else if (s.is<FixedPointStmt>()) {
                loops_.push_back(&s);
                block(s.as<FixedPointStmt>().body);
                loops_.pop_back();
            }
            // If blocks act as hoist barriers; no descent for planning.
        }
    }
};

}  // namespace

LoweringPlan buildPlan(const sema::AnnotatedProgram& program, const Analyses& analyses,
                       const std::string& unitName) {
    LoweringPlan plan;
    plan.unitName = unitName;
    plan.functionName = loweredName(program.entry().name);
    const auto& ta = analyses.transfers;
    const auto& syms = program.symbols;

    // Flag-only convergence properties have no arrays anywhere.
    std::set<int> elidedProps;
    for (size_t i = 0; i < ta.fixedPoints.size(); ++i) {
        if (ta.fixedPoints[i].flagOnly)
            elidedProps.insert(ta.fixedPoints[i].propertySymbol);
        else
            plan.bufferedFixedPoints.insert(static_cast<int>(i));
    }

    auto byName = [&](int a, int b) {
        if (syms.at(a).name != syms.at(b).name) return syms.at(a).name < syms.at(b).name;
        return a < b;
    };

    // Region plans with deterministic kernel naming and parameter order.
    int kernelIndex = 0;
    for (const auto& r : ta.regions) {
        RegionPlan rp;
        rp.info = &r;
        rp.kernelName = plan.functionName + "_kernel_" + std::to_string(kernelIndex++);
        for (int id : r.copyIn) {
            const Symbol& s = syms.at(id);
            if (elidedProps.count(id)) continue;
            if (s.kind == SymbolKind::NodeProperty) {
                rp.arrayParams.push_back(id);
            } else if (r.copyOut.count(id)) {
                rp.writtenScalars.push_back(id);
            } else {
                rp.scalarParams.push_back(id);
            }
        }
        std::sort(rp.scalarParams.begin(), rp.scalarParams.end(), byName);
        std::sort(rp.arrayParams.begin(), rp.arrayParams.end(), byName);
        std::sort(rp.writtenScalars.begin(), rp.writtenScalars.end(), byName);
        if (r.kind == sema::RegionKind::BfsForward || r.kind == sema::RegionKind::BfsReverse)
            plan.hasBfs = true;
        plan.regions.push_back(std::move(rp));
    }

    // Device allocations: union over scopes.
    std::set<int> arrays, scalars;
    for (const auto& scope : ta.scopes) {
        for (int id : scope.copyIn) {
            if (elidedProps.count(id)) continue;
            const Symbol& s = syms.at(id);
            if (s.kind == SymbolKind::NodeProperty)
                arrays.insert(id);
            else if (scope.copyOut.count(id))
                scalars.insert(id);
        }
    }
    plan.deviceArrays.assign(arrays.begin(), arrays.end());
    std::sort(plan.deviceArrays.begin(), plan.deviceArrays.end(), byName);
    plan.deviceScalars.assign(scalars.begin(), scalars.end());
    std::sort(plan.deviceScalars.begin(), plan.deviceScalars.end(), byName);

    // Transfer anchors: hoist out of loops the host never touches inside.
    HostTouchCollector collector(program);
    std::map<const Stmt*, std::set<int>> loopTouches;
    auto touchesOf = [&](const Stmt* loop) -> const std::set<int>& {
        auto it = loopTouches.find(loop);
        if (it != loopTouches.end()) return it->second;
        std::set<int> t;
        if (loop->is<ForAllStmt>())
            t = collector.touched(loop->as<ForAllStmt>().body);
        else if (loop->is<FixedPointStmt>()) {
            t = collector.touched(loop->as<FixedPointStmt>().body);
            t.insert(loop->as<FixedPointStmt>().flagSymbol);
        }
        if (loop->is<ForAllStmt>()) t.insert(loop->as<ForAllStmt>().varSymbol);
        return loopTouches.emplace(loop, std::move(t)).first->second;
    };

    // fixedPoint flags ping-pong inside their loops; the loop emitters own
    // those copies, so the generic planner skips them.
    std::set<int> fpFlags;
    for (const auto& fp : ta.fixedPoints) fpFlags.insert(fp.flagSymbol);

    std::vector<ScopeSite> sites = ScopeLocator(program, ta).locate();
    for (const auto& site : sites) {
        for (int id : site.scope->copyIn) {
            if (elidedProps.count(id) || fpFlags.count(id)) continue;
            const Symbol& s = syms.at(id);
            bool isArray = s.kind == SymbolKind::NodeProperty;
            bool written = site.scope->copyOut.count(id) > 0;
            if (!isArray && !written) continue;  // read-only scalar: launch arg
            const Stmt* anchor = site.firstStmt;
            for (const Stmt* loop : site.loopChain) {
                if (touchesOf(loop).count(id)) break;
                anchor = loop;
            }
            plan.before[anchor].insert({id, TransferDir::HostToDevice});
        }
        for (int id : site.scope->copyOut) {
            if (elidedProps.count(id) || fpFlags.count(id)) continue;
            const Stmt* anchor = site.firstStmt;
            for (const Stmt* loop : site.loopChain) {
                if (touchesOf(loop).count(id)) break;
                anchor = loop;
            }
            plan.after[anchor].insert({id, TransferDir::DeviceToHost});
        }
    }

    for (const auto& red : analyses.reductions) {
        if (red.targetIsRegionLocal || red.isFixedPointFlag) continue;
        const Symbol& s = syms.at(red.targetSymbol);
        TypeKind elem = s.kind == SymbolKind::NodeProperty ? s.type.element : s.type.kind;
        if ((red.op == ReduceOp::Sum || red.op == ReduceOp::Product) && isFloatElem(elem))
            plan.anyFloatReduction = true;
    }

    assignNames(program, ta, plan);
    scanHelperUsage(program, plan);
    return plan;
}

namespace {

const std::set<std::string>& reservedNames() {
    static const std::set<std::string> kReserved = {
        // prelude / machinery identifiers
        "V", "E", "g", "q", "offsets", "dests", "weights", "rev_offsets", "rev_srcs", "rev_eid",
        "graphdsl_load_graph", "graphdsl_free_graph", "graphdsl_is_edge", "graphdsl_edge_index",
        "GraphCsr", "NUM_THREADS", "main", "argc", "argv",
        // C/C++ keywords that are valid DSL identifiers
        "auto", "break", "case", "char", "const", "continue", "default", "do", "else", "enum",
        "extern", "for", "goto", "inline", "register", "restrict", "return", "short", "signed",
        "sizeof", "static", "struct", "switch", "typedef", "union", "unsigned", "void",
        "volatile", "while", "new", "delete", "class", "template", "typename", "namespace",
    };
    return kReserved;
}

}  // namespace

void assignNames(const sema::AnnotatedProgram& program, const sema::TransferAnalysis& ta,
                 LoweringPlan& plan) {
    std::set<std::string> used = reservedNames();
    std::map<std::string, int> seen;
    for (const auto& s : program.symbols.all()) seen[s.name]++;
    for (const auto& s : program.symbols.all()) {
        std::string name = s.name;
        if (seen[s.name] > 1 || used.count(name)) name = s.name + "_" + std::to_string(s.id);
        while (used.count(name)) name += "_x";
        used.insert(name);
        plan.names[s.id] = name;
    }
    auto fresh = [&](const std::string& base) {
        std::string name = base;
        int k = 1;
        while (used.count(name)) name = base + "_" + std::to_string(k++);
        used.insert(name);
        return name;
    };
    // Construct-internal names in deterministic region order.
    for (const auto& r : ta.regions) {
        if (r.kind == sema::RegionKind::BfsForward) {
            BfsNames names;
            names.level = fresh("level");
            names.hops = fresh("hops");
            names.finished = fresh("bfs_finished");
            plan.bfsNames[r.stmt] = names;
        }
    }
    for (size_t i = 0; i < ta.fixedPoints.size(); ++i) {
        const auto& fp = ta.fixedPoints[i];
        if (fp.flagOnly) continue;
        plan.fpNextName[fp.stmt] =
            fresh(plan.names.at(fp.propertySymbol) + "_next");
    }
}

namespace {

// Detects which prelude device helpers the program needs: binary-search edge
// lookups and float Min/Max CAS loops.
class HelperUsageScanner {
public:
    HelperUsageScanner(const sema::AnnotatedProgram& prog, LoweringPlan& plan)
        : prog_(prog), plan_(plan) {}

    void run() { block(prog_.entry().body); }

private:
    const sema::AnnotatedProgram& prog_;
    LoweringPlan& plan_;
    std::vector<std::pair<int, int>> nbrLoops_;  // (source symbol, iter var)

    bool edgeLoopMatched(const MethodCall& m) const {
        if (m.args.size() != 2 || !m.args[0]->is<VarRef>() || !m.args[1]->is<VarRef>())
            return false;
        for (const auto& [src, var] : nbrLoops_)
            if (m.args[0]->symbol == src && m.args[1]->symbol == var) return true;
        return false;
    }

    void expr(const Expr& e) {
        if (e.is<PropAccess>()) return expr(*e.as<PropAccess>().object);
        if (e.is<UnaryExpr>()) return expr(*e.as<UnaryExpr>().operand);
        if (e.is<BinaryExpr>()) {
            expr(*e.as<BinaryExpr>().lhs);
            expr(*e.as<BinaryExpr>().rhs);
            return;
        }
        if (e.is<MethodCall>()) {
            const auto& m = e.as<MethodCall>();
            for (const auto& a : m.args) expr(*a);
            if (m.method == "is_an_edge") plan_.usesIsEdgeHelper = true;
            if (m.method == "get_edge" && !edgeLoopMatched(m)) plan_.usesEdgeIndexHelper = true;
            if (m.method == "minWt") plan_.usesMinWt = true;
            if (m.method == "maxWt") plan_.usesMaxWt = true;
        }
    }

    void block(const Block& b) {
        for (const auto& sp : b.stmts) stmt(*sp);
    }

    void stmt(const Stmt& s) {
        if (s.is<DeclStmt>()) {
            if (s.as<DeclStmt>().init) expr(*s.as<DeclStmt>().init);
        } else if (s.is<AssignStmt>()) {
            expr(*s.as<AssignStmt>().target);
            expr(*s.as<AssignStmt>().value);
        } else if (s.is<ReduceAssignStmt>()) {
            expr(*s.as<ReduceAssignStmt>().target);
            if (s.as<ReduceAssignStmt>().value) expr(*s.as<ReduceAssignStmt>().value);
        } else if (s.is<MinMaxAssignStmt>()) {
            const auto& m = s.as<MinMaxAssignStmt>();
            for (const auto& t : m.targets) expr(*t);
            expr(*m.compareCandidate);
            for (const auto& v : m.attachedValues) expr(*v);
            const Symbol& t0 = prog_.symbols.at(m.targets[0]->symbol);
            TypeKind elem =
                t0.kind == SymbolKind::NodeProperty ? t0.type.element : t0.type.kind;
            if (isFloatElem(elem)) plan_.anyFloatMinMax = true;
        } else if (s.is<ForAllStmt>()) {
            const auto& f = s.as<ForAllStmt>();
            if (f.domain.source) expr(*f.domain.source);
            bool nbrLoop = f.domain.kind == IterDomainKind::Neighbors &&
                           f.domain.source && f.domain.source->is<VarRef>();
            if (nbrLoop) nbrLoops_.push_back({f.domain.source->symbol, f.varSymbol});
            if (f.filter) expr(*f.filter);
            block(f.body);
            if (nbrLoop) nbrLoops_.pop_back();
        } else if (s.is<FixedPointStmt>()) {
            block(s.as<FixedPointStmt>().body);
        } else if (s.is<IterateBfsStmt>()) {
            expr(*s.as<IterateBfsStmt>().root);
            block(s.as<IterateBfsStmt>().body);
        } else if (s.is<IterateRevStmt>()) {
            if (s.as<IterateRevStmt>().filter) expr(*s.as<IterateRevStmt>().filter);
            block(s.as<IterateRevStmt>().body);
        } else if (s.is<IfStmt>()) {
            expr(*s.as<IfStmt>().cond);
            block(s.as<IfStmt>().thenBlock);
            if (s.as<IfStmt>().elseBlock) block(*s.as<IfStmt>().elseBlock);
        } else if (s.is<CallStmt>()) {
            expr(*s.as<CallStmt>().call);
        } else if (s.is<ReturnStmt>()) {
            if (s.as<ReturnStmt>().value) expr(*s.as<ReturnStmt>().value);
        }
    }
};

}  // namespace

void scanHelperUsage(const sema::AnnotatedProgram& program, LoweringPlan& plan) {
    HelperUsageScanner(program, plan).run();
}

}  // namespace graphdsl::codegen
