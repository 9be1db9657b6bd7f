#include <cassert>
#include <optional>

#include "codegen_internal.hpp"

namespace graphdsl::codegen {

using namespace ast;
using sema::RegionKind;
using sema::Symbol;
using sema::SymbolKind;

void unsupported(BackendKind backend, const std::string& construct, SourceSpan span) {
    throw CompileError("UnsupportedConstruct", span,
                       std::string(backendName(backend)) + " backend has no template for " +
                           construct);
}

namespace {

struct PendingTransfer {
    std::string symbol;
    TransferDir dir;
    int line;
    bool graphArray;
};

struct PendingLoop {
    std::string flagName;
    int beginLine;
    int endLine;
    bool isBfs;
};

class CudaEmitter {
public:
    CudaEmitter(const sema::AnnotatedProgram& prog, const Analyses& an, const CodegenConfig& cfg,
                const LoweringPlan& plan)
        : prog_(prog), an_(an), cfg_(cfg), plan_(plan), kernels_(cfg.indent), host_(cfg.indent) {}

    EmitUnit run();

private:
    const sema::AnnotatedProgram& prog_;
    const Analyses& an_;
    const CodegenConfig& cfg_;
    const LoweringPlan& plan_;
    CodeWriter kernels_;
    CodeWriter host_;

    EmitUnit unit_;
    std::vector<PendingTransfer> transfers_;
    std::vector<PendingLoop> loops_;
    std::vector<KernelMeta> kernelMeta_;
    const sema::FixedPointInfo* fpActive_ = nullptr;
    std::string fpNextName_;
    bool needFloatMinMax_ = false;
    bool needAtomicMul_ = false;

    struct KernelCtx {
        const RegionPlan* rp = nullptr;
        std::set<int> locals;
        int fpProp = -1;
        std::string fpNextDev;
        std::string fpFlagDev;
        bool fpFlagOnly = false;
        bool fpConvergedValue = false;
        int bfsVar = -1;
        std::string levelDev;
        std::string hopsParam;
        std::vector<std::tuple<int, int, std::string>> edgeLoops;
        int loopDepth = 0;
    };
    KernelCtx* kctx_ = nullptr;

    // ---- naming & types ----

    const std::string& nm(int s) const { return plan_.names.at(s); }
    std::string dev(int s) const { return cfg_.deviceVarPrefix + nm(s); }
    const Symbol& sym(int id) const { return prog_.symbols.at(id); }
    std::string ctype(TypeKind k) const { return cType(k, false); }
    std::string elemType(int id) const {
        const Symbol& s = sym(id);
        if (s.kind == SymbolKind::NodeProperty || s.kind == SymbolKind::EdgeProperty)
            return ctype(s.type.element);
        if (s.kind == SymbolKind::Node || s.kind == SymbolKind::Edge) return "int";
        return ctype(s.type.kind);
    }

    // Buffered next-array appended after the convergence property parameter.
    std::optional<std::string> fpNextFor(int id) const {
        if (fpActive_ && !fpActive_->flagOnly && id == fpActive_->propertySymbol)
            return cfg_.deviceVarPrefix + fpNextName_;
        return std::nullopt;
    }

    friend struct CudaHostExpr;
    friend struct CudaDeviceExpr;
    std::string hostExpr(const Expr& e, int minPrec = 0);
    std::string deviceExpr(const Expr& e, int minPrec = 0);

    // ---- transfer helpers ----

    void recordTransfer(const std::string& symbol, TransferDir dir, bool graph) {
        transfers_.push_back({symbol, dir, host_.nextLine() - 1, graph});
    }
    void emitH2D(int id) {
        const std::string t = elemType(id);
        if (sym(id).kind == SymbolKind::NodeProperty)
            host_.line("cudaMemcpy(" + dev(id) + ", " + nm(id) + ", sizeof(" + t +
                       ") * V, cudaMemcpyHostToDevice);");
        else
            host_.line("cudaMemcpy(" + dev(id) + ", &" + nm(id) + ", sizeof(" + t +
                       "), cudaMemcpyHostToDevice);");
        recordTransfer(nm(id), TransferDir::HostToDevice, false);
    }
    void emitD2H(int id) {
        const std::string t = elemType(id);
        if (sym(id).kind == SymbolKind::NodeProperty)
            host_.line("cudaMemcpy(" + nm(id) + ", " + dev(id) + ", sizeof(" + t +
                       ") * V, cudaMemcpyDeviceToHost);");
        else
            host_.line("cudaMemcpy(&" + nm(id) + ", " + dev(id) + ", sizeof(" + t +
                       "), cudaMemcpyDeviceToHost);");
        recordTransfer(nm(id), TransferDir::DeviceToHost, false);
    }
    void emitPlanned(const std::map<const Stmt*, std::set<PlannedXfer>>& table, const Stmt* s) {
        auto it = table.find(s);
        if (it == table.end()) return;
        std::vector<int> ids;
        for (const auto& x : it->second) ids.push_back(x.symbol);
        std::sort(ids.begin(), ids.end(), [&](int a, int b) { return nm(a) < nm(b); });
        for (int id : ids) {
            if (it->second.count({id, TransferDir::HostToDevice}))
                emitH2D(id);
            else
                emitD2H(id);
        }
    }

    // ---- host side ----

    void hostBlock(const Block& b) {
        for (const auto& s : b.stmts) hostStmt(*s);
    }
    void hostStmt(const Stmt& s);
    void hostAssign(const Expr& target, const std::string& valueText);
    void emitAttach(const CallStmt& c);
    void emitFixedPoint(const Stmt& s);
    void emitBfs(const Stmt& s);
    void emitForAllRegion(const Stmt& s);
    void launchKernel(const RegionPlan& rp, const std::vector<std::string>& extraArgs);
    void emitHostDecls(const FunctionDecl& fn);
    void collectHostDecls(const Block& b, std::vector<int>& out) const;
    std::vector<sema::GraphArray> collectGraphArrays() const;
    std::string hostGraphArraySource(sema::GraphArray a) const;
    void emitCleanup();
    bool isElided(int propSym) const {
        for (const auto& fp : an_.transfers.fixedPoints)
            if (fp.flagOnly && fp.propertySymbol == propSym) return true;
        return false;
    }

    // ---- device side ----

    void emitKernelHeader(const RegionPlan& rp, const std::vector<std::string>& extraParams);
    void emitForAllKernel(const RegionPlan& rp, const ForAllStmt& f);
    void emitBfsForwardKernel(const RegionPlan& rp, const IterateBfsStmt& b, const BfsNames& nmm);
    void emitBfsReverseKernel(const RegionPlan& rp, const IterateBfsStmt& b,
                              const IterateRevStmt& rev, const BfsNames& nmm);
    void deviceBlock(const Block& b);
    void deviceStmt(const Stmt& s);
    void deviceAssignProp(int propSym, const std::string& objText, const Expr& value);
    void deviceAttachedAssign(const Expr& target, const Expr& value);
    void deviceReduce(const ReduceAssignStmt& r, SourceSpan span);
    void deviceMinMax(const MinMaxAssignStmt& m);
    void deviceForAll(const ForAllStmt& f);

    const RegionPlan& regionPlan(int regionId) const {
        for (const auto& rp : plan_.regions)
            if (rp.info->id == regionId) return rp;
        throw std::logic_error("no plan for region " + std::to_string(regionId));
    }
};

// ---------------------------------------------------------------------------
// Expression emitters
// ---------------------------------------------------------------------------

struct CudaHostExpr : ExprEmitter {
    CudaEmitter* e;
    const sema::AnnotatedProgram& p;
    const LoweringPlan& plan;
    explicit CudaHostExpr(CudaEmitter* em, const sema::AnnotatedProgram& pr,
                          const LoweringPlan& pl)
        : e(em), p(pr), plan(pl) {
        prog = &pr;
    }

    std::string scalarRef(int symbol) override { return plan.names.at(symbol); }
    std::string propRef(int symbol, const std::string& obj) override {
        return plan.names.at(symbol) + "[" + obj + "]";
    }
    std::string edgeWeightRef(const std::string& edge) override {
        for (const auto& s : p.symbols.all())
            if (s.kind == SymbolKind::EdgeProperty && s.isParam)
                return plan.names.at(s.id) + "[" + edge + "]";
        return "g.weights[" + edge + "]";
    }
    std::string graphMethod(const MethodCall& m, const Expr& expr) override {
        if (m.method == "num_nodes") return "V";
        if (m.method == "count_outNbrs") {
            std::string x = emit(*m.args[0], 10);
            return "(g.offsets[" + x + " + 1] - g.offsets[" + x + "])";
        }
        if (m.method == "is_an_edge")
            return "graphdsl_is_edge(g.offsets, g.dests, " + emit(*m.args[0]) + ", " +
                   emit(*m.args[1]) + ")";
        if (m.method == "get_edge")
            return "graphdsl_edge_index(g.offsets, g.dests, " + emit(*m.args[0]) + ", " +
                   emit(*m.args[1]) + ")";
        if (m.method == "minWt") return "graphdsl_min_weight(&g)";
        if (m.method == "maxWt") return "graphdsl_max_weight(&g)";
        unsupported(BackendKind::Cuda, "host method " + m.method, expr.span);
    }
};

struct CudaDeviceExpr : ExprEmitter {
    CudaEmitter* e;
    const LoweringPlan& plan;
    const CodegenConfig& cfg;
    CudaEmitter::KernelCtx* k;
    CudaDeviceExpr(CudaEmitter* em, const sema::AnnotatedProgram& pr, const LoweringPlan& pl,
                   const CodegenConfig& c, CudaEmitter::KernelCtx* ctx)
        : e(em), plan(pl), cfg(c), k(ctx) {
        prog = &pr;
    }

    std::string scalarRef(int symbol) override {
        if (k->locals.count(symbol)) return plan.names.at(symbol);
        for (int id : k->rp->writtenScalars)
            if (id == symbol) return "(*" + cfg.deviceVarPrefix + plan.names.at(symbol) + ")";
        return plan.names.at(symbol);
    }
    std::string propRef(int symbol, const std::string& obj) override {
        return cfg.deviceVarPrefix + plan.names.at(symbol) + "[" + obj + "]";
    }
    std::string edgeWeightRef(const std::string& edge) override {
        return cfg.deviceVarPrefix + "weights[" + edge + "]";
    }
    std::string graphMethod(const MethodCall& m, const Expr& expr) override {
        const std::string p = cfg.deviceVarPrefix;
        if (m.method == "num_nodes") return "V";
        if (m.method == "count_outNbrs") {
            std::string x = emit(*m.args[0], 10);
            return "(" + p + "offsets[" + x + " + 1] - " + p + "offsets[" + x + "])";
        }
        if (m.method == "is_an_edge")
            return "graphdsl_is_edge(" + p + "offsets, " + p + "dests, " + emit(*m.args[0]) +
                   ", " + emit(*m.args[1]) + ")";
        if (m.method == "get_edge") {
            if (m.args[0]->is<VarRef>() && m.args[1]->is<VarRef>()) {
                for (const auto& [src, var, edgeVar] : k->edgeLoops)
                    if (m.args[0]->symbol == src && m.args[1]->symbol == var) return edgeVar;
            }
            return "graphdsl_edge_index(" + p + "offsets, " + p + "dests, " + emit(*m.args[0]) +
                   ", " + emit(*m.args[1]) + ")";
        }
        unsupported(BackendKind::Cuda, "device method " + m.method, expr.span);
    }
};

std::string CudaEmitter::hostExpr(const Expr& e, int minPrec) {
    CudaHostExpr he(this, prog_, plan_);
    return he.emit(e, minPrec);
}

std::string CudaEmitter::deviceExpr(const Expr& e, int minPrec) {
    CudaDeviceExpr de(this, prog_, plan_, cfg_, kctx_);
    return de.emit(e, minPrec);
}

// ---------------------------------------------------------------------------
// Host statements
// ---------------------------------------------------------------------------

void CudaEmitter::hostAssign(const Expr& target, const std::string& valueText) {
    if (target.is<VarRef>()) {
        host_.line(nm(target.symbol) + " = " + valueText + ";");
        return;
    }
    const auto& p = target.as<PropAccess>();
    if (sym(target.symbol).kind == SymbolKind::EdgeProperty)
        unsupported(BackendKind::Cuda, "edge property writes", target.span);
    if (isElided(target.symbol)) return;  // flag-only property, value unobservable
    host_.line(nm(target.symbol) + "[" + hostExpr(*p.object, 10) + "] = " + valueText + ";");
}

void CudaEmitter::emitAttach(const CallStmt& c) {
    const auto& m = c.call->as<MethodCall>();
    for (size_t i = 0; i < m.args.size(); ++i) {
        int propSym = m.argSymbols.at(i);
        if (isElided(propSym)) continue;
        host_.open("for (int i = 0; i < V; i++) {");
        host_.line(nm(propSym) + "[i] = " + hostExpr(*m.args[i]) + ";");
        host_.close();
    }
}

void CudaEmitter::hostStmt(const Stmt& s) {
    emitPlanned(plan_.before, &s);

    if (s.is<DeclStmt>()) {
        const auto& d = s.as<DeclStmt>();
        const Symbol& ds = sym(d.symbol);
        if (ds.kind != SymbolKind::NodeProperty && ds.kind != SymbolKind::EdgeProperty && d.init)
            host_.line(nm(d.symbol) + " = " + hostExpr(*d.init) + ";");
    } else if (s.is<AssignStmt>()) {
        const auto& a = s.as<AssignStmt>();
        hostAssign(*a.target, hostExpr(*a.value));
    } else if (s.is<ReduceAssignStmt>()) {
        const auto& r = s.as<ReduceAssignStmt>();
        std::string t = r.target->is<VarRef>()
                            ? nm(r.target->symbol)
                            : nm(r.target->symbol) + "[" +
                                  hostExpr(*r.target->as<PropAccess>().object, 10) + "]";
        switch (r.op) {
            case ReduceOp::Sum: host_.line(t + " += " + hostExpr(*r.value) + ";"); break;
            case ReduceOp::Product: host_.line(t + " *= " + hostExpr(*r.value) + ";"); break;
            case ReduceOp::Count: host_.line(t + " += 1;"); break;
            case ReduceOp::All:
                host_.line(t + " = " + t + " && " + hostExpr(*r.value, 3) + ";");
                break;
            case ReduceOp::Any:
                host_.line(t + " = " + t + " || " + hostExpr(*r.value, 2) + ";");
                break;
        }
    } else if (s.is<MinMaxAssignStmt>()) {
        const auto& m = s.as<MinMaxAssignStmt>();
        host_.open("{");
        host_.line(ctype(m.compareCandidate->type.kind) + " cand = " +
                   hostExpr(*m.compareCandidate) + ";");
        host_.open(std::string("if (") + (m.isMin ? "cand < " : "cand > ") +
                   hostExpr(*m.compareCurrent, 10) + ") {");
        hostAssign(*m.targets[0], "cand");
        for (size_t i = 0; i < m.attachedValues.size(); ++i)
            hostAssign(*m.targets[i + 1], hostExpr(*m.attachedValues[i]));
        host_.close();
        host_.close();
    } else if (s.is<IfStmt>()) {
        const auto& i = s.as<IfStmt>();
        host_.open("if (" + hostExpr(*i.cond) + ") {");
        hostBlock(i.thenBlock);
        if (i.elseBlock) {
            host_.closeOpen("} else {");
            hostBlock(*i.elseBlock);
        }
        host_.close();
    } else if (s.is<CallStmt>()) {
        emitAttach(s.as<CallStmt>());
    } else if (s.is<ReturnStmt>()) {
        const auto& r = s.as<ReturnStmt>();
        emitPlanned(plan_.after, &s);
        std::string value = r.value ? hostExpr(*r.value) : "";
        emitCleanup();
        host_.line(value.empty() ? "return;" : "return " + value + ";");
        return;
    } else if (s.is<ForAllStmt>()) {
        const auto& f = s.as<ForAllStmt>();
        bool isRegion = f.parallel && f.domain.kind != IterDomainKind::Container;
        if (isRegion) {
            emitForAllRegion(s);
        } else if (f.domain.kind == IterDomainKind::Container) {
            const Symbol& set = sym(f.domain.containerSymbol);
            std::string var = nm(f.varSymbol);
            host_.open("for (int " + var + "_i = 0; " + var + "_i < " + nm(set.id) + "_count; " +
                       var + "_i++) {");
            host_.line("int " + var + " = " + nm(set.id) + "[" + var + "_i];");
            if (f.filter) host_.open("if (" + hostExpr(*f.filter) + ") {");
            hostBlock(f.body);
            if (f.filter) host_.close();
            host_.close();
        } else {
            std::string var = nm(f.varSymbol);
            if (f.domain.kind == IterDomainKind::Nodes) {
                host_.open("for (int " + var + " = 0; " + var + " < V; " + var + "++) {");
            } else {
                std::string srcText = hostExpr(*f.domain.source, 10);
                const char* off =
                    f.domain.kind == IterDomainKind::Neighbors ? "offsets" : "rev_offsets";
                const char* arr =
                    f.domain.kind == IterDomainKind::Neighbors ? "dests" : "rev_srcs";
                host_.open("for (int edge = g." + std::string(off) + "[" + srcText +
                           "]; edge < g." + off + "[" + srcText + " + 1]; edge++) {");
                host_.line("int " + var + " = g." + std::string(arr) + "[edge];");
            }
            if (f.filter) host_.open("if (" + hostExpr(*f.filter) + ") {");
            hostBlock(f.body);
            if (f.filter) host_.close();
            host_.close();
        }
    } else if (s.is<FixedPointStmt>()) {
        emitFixedPoint(s);
    } else if (s.is<IterateBfsStmt>()) {
        emitBfs(s);
    }

    emitPlanned(plan_.after, &s);
}

// ---------------------------------------------------------------------------
// Regions and convergence loops
// ---------------------------------------------------------------------------

void CudaEmitter::launchKernel(const RegionPlan& rp, const std::vector<std::string>& extraArgs) {
    std::string args = "V";
    for (auto a : rp.info->graphArrays) args += ", " + cfg_.deviceVarPrefix + graphArrayName(a);
    for (int id : rp.scalarParams) args += ", " + nm(id);
    for (int id : rp.arrayParams) {
        args += ", " + dev(id);
        if (auto next = fpNextFor(id)) args += ", " + *next;
    }
    for (int id : rp.writtenScalars) args += ", " + dev(id);
    for (const auto& x : extraArgs) args += ", " + x;
    int line = host_.nextLine();
    host_.line(rp.kernelName + "<<<numBlocks, threadsPerBlock>>>(" + args + ");");
    host_.line("cudaDeviceSynchronize();");
    for (auto& km : kernelMeta_)
        if (km.name == rp.kernelName) km.launchLines.push_back(line);
}

void CudaEmitter::emitForAllRegion(const Stmt& s) {
    const auto& f = s.as<ForAllStmt>();
    if (f.domain.kind != IterDomainKind::Nodes)
        unsupported(BackendKind::Cuda, "parallel regions over neighbor domains", s.span);
    const RegionPlan& rp = regionPlan(f.regionId);
    emitForAllKernel(rp, f);
    launchKernel(rp, {});
}

void CudaEmitter::emitFixedPoint(const Stmt& s) {
    const auto& f = s.as<FixedPointStmt>();
    const sema::FixedPointInfo* info = nullptr;
    for (const auto& fp : an_.transfers.fixedPoints)
        if (fp.stmt == &s) info = &fp;
    assert(info);

    std::string flag = nm(f.flagSymbol);
    bool buffered = !info->flagOnly;
    std::string nextDev = buffered ? cfg_.deviceVarPrefix + plan_.fpNextName.at(&s) : "";
    std::string propDev = buffered ? dev(info->propertySymbol) : "";

    int begin = host_.nextLine();
    host_.open("while (!" + flag + ") {");
    host_.line(flag + " = true;");
    emitH2D(f.flagSymbol);
    if (buffered)
        host_.line("cudaMemset(" + nextDev + ", " + (info->convergedWhenAllFalse ? "0" : "1") +
                   ", sizeof(bool) * V);");

    fpActive_ = info;
    fpNextName_ = buffered ? plan_.fpNextName.at(&s) : "";
    hostBlock(f.body);
    fpActive_ = nullptr;

    emitD2H(f.flagSymbol);
    if (buffered) {
        host_.line("bool* graphdsl_swap = " + propDev + ";");
        host_.line(propDev + " = " + nextDev + ";");
        host_.line(nextDev + " = graphdsl_swap;");
    }
    host_.close();
    loops_.push_back({flag, begin, host_.nextLine() - 1, false});
}

void CudaEmitter::emitBfs(const Stmt& s) {
    const auto& b = s.as<IterateBfsStmt>();
    const BfsNames& names = plan_.bfsNames.at(&s);
    const RegionPlan& fwd = regionPlan(b.regionId);

    emitBfsForwardKernel(fwd, b, names);
    std::vector<std::pair<const RegionPlan*, const IterateRevStmt*>> reverses;
    for (const auto& inner : b.body.stmts) {
        if (!inner->is<IterateRevStmt>()) continue;
        const auto& rev = inner->as<IterateRevStmt>();
        const RegionPlan& rp = regionPlan(rev.regionId);
        emitBfsReverseKernel(rp, b, rev, names);
        reverses.push_back({&rp, &rev});
    }

    const std::string levelDev = cfg_.deviceVarPrefix + names.level;
    const std::string finDev = cfg_.deviceVarPrefix + names.finished;

    host_.open("for (int i = 0; i < V; i++) {");
    host_.line(names.level + "[i] = -1;");
    host_.close();
    host_.line(names.level + "[" + hostExpr(*b.root, 10) + "] = 0;");
    host_.line("cudaMemcpy(" + levelDev + ", " + names.level +
               ", sizeof(int) * V, cudaMemcpyHostToDevice);");
    host_.line(names.hops + " = 0;");
    int begin = host_.nextLine();
    host_.open("do {");
    host_.line(names.finished + " = true;");
    host_.line("cudaMemcpy(" + finDev + ", &" + names.finished +
               ", sizeof(bool), cudaMemcpyHostToDevice);");
    launchKernel(fwd, {levelDev, names.hops, finDev});
    host_.line("cudaMemcpy(&" + names.finished + ", " + finDev +
               ", sizeof(bool), cudaMemcpyDeviceToHost);");
    host_.line(names.hops + " = " + names.hops + " + 1;");
    host_.close("} while (!" + names.finished + ");");
    loops_.push_back({names.finished, begin, host_.nextLine() - 1, true});

    // Reverse pass: walk the recorded levels from the deepest one back down.
    host_.line(names.hops + " = " + names.hops + " - 1;");
    for (auto& [rp, rev] : reverses) {
        host_.open("while (" + names.hops + " >= 0) {");
        launchKernel(*rp, {levelDev, names.hops});
        host_.line(names.hops + " = " + names.hops + " - 1;");
        host_.close();
    }
}

// ---------------------------------------------------------------------------
// Kernels
// ---------------------------------------------------------------------------

void CudaEmitter::emitKernelHeader(const RegionPlan& rp,
                                   const std::vector<std::string>& extraParams) {
    std::string params = "int V";
    std::vector<std::string> names{"V"};
    for (auto a : rp.info->graphArrays) {
        params += ", const int* " + cfg_.deviceVarPrefix + graphArrayName(a);
        names.push_back(cfg_.deviceVarPrefix + graphArrayName(a));
    }
    for (int id : rp.scalarParams) {
        params += ", " + elemType(id) + " " + nm(id);
        names.push_back(nm(id));
    }
    for (int id : rp.arrayParams) {
        params += ", " + elemType(id) + "* " + dev(id);
        names.push_back(dev(id));
        if (auto next = fpNextFor(id)) {
            params += ", bool* " + *next;
            names.push_back(*next);
        }
    }
    for (int id : rp.writtenScalars) {
        params += ", " + elemType(id) + "* " + dev(id);
        names.push_back(dev(id));
    }
    for (const auto& x : extraParams) {
        params += ", " + x;
        names.push_back(x.substr(x.rfind(' ') + 1));
    }
    KernelMeta meta;
    meta.name = rp.kernelName;
    meta.params = names;
    meta.regionId = rp.info->id;
    meta.defLine = kernels_.nextLine();
    kernelMeta_.push_back(meta);
    kernels_.open("__global__ void " + rp.kernelName + "(" + params + ") {");
}

void CudaEmitter::emitForAllKernel(const RegionPlan& rp, const ForAllStmt& f) {
    KernelCtx ctx;
    ctx.rp = &rp;
    ctx.locals.insert(f.varSymbol);
    if (fpActive_) {
        ctx.fpProp = fpActive_->propertySymbol;
        ctx.fpFlagOnly = fpActive_->flagOnly;
        ctx.fpNextDev = fpActive_->flagOnly ? "" : cfg_.deviceVarPrefix + fpNextName_;
        ctx.fpFlagDev = dev(fpActive_->flagSymbol);
        ctx.fpConvergedValue = !fpActive_->convergedWhenAllFalse;
    }
    kctx_ = &ctx;
    emitKernelHeader(rp, {});
    std::string var = nm(f.varSymbol);
    kernels_.line("unsigned " + var + " = blockIdx.x * blockDim.x + threadIdx.x;");
    kernels_.line("if (" + var + " >= V) return;");
    if (f.filter) {
        kernels_.open("if (" + deviceExpr(*f.filter) + ") {");
        deviceBlock(f.body);
        kernels_.close();
    } else {
        deviceBlock(f.body);
    }
    kernels_.close();
    kernels_.blank();
    kctx_ = nullptr;
}

void CudaEmitter::emitBfsForwardKernel(const RegionPlan& rp, const IterateBfsStmt& b,
                                       const BfsNames& nmm) {
    KernelCtx ctx;
    ctx.rp = &rp;
    ctx.locals.insert(b.varSymbol);
    ctx.bfsVar = b.varSymbol;
    ctx.levelDev = cfg_.deviceVarPrefix + nmm.level;
    ctx.hopsParam = nmm.hops;
    if (fpActive_) {
        ctx.fpProp = fpActive_->propertySymbol;
        ctx.fpFlagOnly = fpActive_->flagOnly;
        ctx.fpNextDev = fpActive_->flagOnly ? "" : cfg_.deviceVarPrefix + fpNextName_;
        ctx.fpFlagDev = dev(fpActive_->flagSymbol);
        ctx.fpConvergedValue = !fpActive_->convergedWhenAllFalse;
    }
    kctx_ = &ctx;
    emitKernelHeader(rp, {"int* " + ctx.levelDev, "int " + nmm.hops,
                          "bool* " + cfg_.deviceVarPrefix + nmm.finished});
    std::string var = nm(b.varSymbol);
    kernels_.line("unsigned " + var + " = blockIdx.x * blockDim.x + threadIdx.x;");
    kernels_.line("if (" + var + " >= V) return;");
    kernels_.line("if (" + ctx.levelDev + "[" + var + "] != " + nmm.hops + ") return;");
    // Frontier expansion: claim unvisited neighbors into the next level.
    kernels_.open("for (int bfs_edge = " + cfg_.deviceVarPrefix + "offsets[" + var +
                  "]; bfs_edge < " + cfg_.deviceVarPrefix + "offsets[" + var +
                  " + 1]; bfs_edge++) {");
    kernels_.line("int bfs_nbr = " + cfg_.deviceVarPrefix + "dests[bfs_edge];");
    kernels_.open("if (" + ctx.levelDev + "[bfs_nbr] == -1) {");
    kernels_.line(ctx.levelDev + "[bfs_nbr] = " + nmm.hops + " + 1;");
    kernels_.line("*" + cfg_.deviceVarPrefix + nmm.finished + " = false;");
    kernels_.close();
    kernels_.close();
    for (const auto& inner : b.body.stmts)
        if (!inner->is<IterateRevStmt>()) deviceStmt(*inner);
    kernels_.close();
    kernels_.blank();
    kctx_ = nullptr;
}

void CudaEmitter::emitBfsReverseKernel(const RegionPlan& rp, const IterateBfsStmt& b,
                                       const IterateRevStmt& rev, const BfsNames& nmm) {
    KernelCtx ctx;
    ctx.rp = &rp;
    ctx.locals.insert(b.varSymbol);
    ctx.bfsVar = b.varSymbol;
    ctx.levelDev = cfg_.deviceVarPrefix + nmm.level;
    ctx.hopsParam = nmm.hops;
    kctx_ = &ctx;
    emitKernelHeader(rp, {"int* " + ctx.levelDev, "int " + nmm.hops});
    std::string var = nm(b.varSymbol);
    kernels_.line("unsigned " + var + " = blockIdx.x * blockDim.x + threadIdx.x;");
    kernels_.line("if (" + var + " >= V) return;");
    kernels_.line("if (" + ctx.levelDev + "[" + var + "] != " + nmm.hops + ") return;");
    if (rev.filter) {
        kernels_.open("if (" + deviceExpr(*rev.filter) + ") {");
        deviceBlock(rev.body);
        kernels_.close();
    } else {
        deviceBlock(rev.body);
    }
    kernels_.close();
    kernels_.blank();
    kctx_ = nullptr;
}

// ---------------------------------------------------------------------------
// Device statements
// ---------------------------------------------------------------------------

void CudaEmitter::deviceBlock(const Block& b) {
    for (const auto& s : b.stmts) deviceStmt(*s);
}

void CudaEmitter::deviceAssignProp(int propSym, const std::string& objText, const Expr& value) {
    KernelCtx& k = *kctx_;
    std::string valueText = deviceExpr(value);
    if (propSym == k.fpProp) {
        bool isLit = value.is<BoolLit>();
        bool litVal = isLit && value.as<BoolLit>().value;
        if (!k.fpFlagOnly)
            kernels_.line(k.fpNextDev + "[" + objText + "] = " + valueText + ";");
        if (isLit) {
            if (litVal != k.fpConvergedValue) kernels_.line("*" + k.fpFlagDev + " = false;");
        } else {
            kernels_.open("if (" + valueText +
                          (k.fpConvergedValue ? " == false) {" : " == true) {"));
            kernels_.line("*" + k.fpFlagDev + " = false;");
            kernels_.close();
        }
        return;
    }
    kernels_.line(dev(propSym) + "[" + objText + "] = " + valueText + ";");
}

void CudaEmitter::deviceAttachedAssign(const Expr& target, const Expr& value) {
    KernelCtx& k = *kctx_;
    if (target.is<VarRef>()) {
        if (k.locals.count(target.symbol))
            kernels_.line(nm(target.symbol) + " = " + deviceExpr(value) + ";");
        else
            kernels_.line("*" + dev(target.symbol) + " = " + deviceExpr(value) + ";");
        return;
    }
    deviceAssignProp(target.symbol, deviceExpr(*target.as<PropAccess>().object, 10), value);
}

void CudaEmitter::deviceStmt(const Stmt& s) {
    KernelCtx& k = *kctx_;
    if (s.is<DeclStmt>()) {
        const auto& d = s.as<DeclStmt>();
        k.locals.insert(d.symbol);
        std::string init = "0";
        if (sym(d.symbol).type.kind == TypeKind::Bool) init = "false";
        if (d.init) init = deviceExpr(*d.init);
        kernels_.line(elemType(d.symbol) + " " + nm(d.symbol) + " = " + init + ";");
        return;
    }
    if (s.is<AssignStmt>()) {
        const auto& a = s.as<AssignStmt>();
        if (a.target->is<VarRef>()) {
            int t = a.target->symbol;
            if (k.locals.count(t))
                kernels_.line(nm(t) + " = " + deviceExpr(*a.value) + ";");
            else
                kernels_.line("*" + dev(t) + " = " + deviceExpr(*a.value) + ";");
        } else {
            if (sym(a.target->symbol).kind == SymbolKind::EdgeProperty)
                unsupported(BackendKind::Cuda, "edge property writes", s.span);
            deviceAssignProp(a.target->symbol,
                             deviceExpr(*a.target->as<PropAccess>().object, 10), *a.value);
        }
        return;
    }
    if (s.is<ReduceAssignStmt>()) return deviceReduce(s.as<ReduceAssignStmt>(), s.span);
    if (s.is<MinMaxAssignStmt>()) return deviceMinMax(s.as<MinMaxAssignStmt>());
    if (s.is<IfStmt>()) {
        const auto& i = s.as<IfStmt>();
        kernels_.open("if (" + deviceExpr(*i.cond) + ") {");
        deviceBlock(i.thenBlock);
        if (i.elseBlock) {
            kernels_.closeOpen("} else {");
            deviceBlock(*i.elseBlock);
        }
        kernels_.close();
        return;
    }
    if (s.is<ForAllStmt>()) return deviceForAll(s.as<ForAllStmt>());
    if (s.is<CallStmt>())
        unsupported(BackendKind::Cuda, "attachNodeProperty inside kernels", s.span);
    unsupported(BackendKind::Cuda, "host constructs inside kernels", s.span);
}

void CudaEmitter::deviceForAll(const ForAllStmt& f) {
    KernelCtx& k = *kctx_;
    std::string var = nm(f.varSymbol);
    k.locals.insert(f.varSymbol);
    std::string edgeVar =
        k.loopDepth == 0 ? "edge" : "edge_" + std::to_string(k.loopDepth);
    bool pushedEdgeLoop = false;
    const std::string p = cfg_.deviceVarPrefix;

    switch (f.domain.kind) {
        case IterDomainKind::Nodes:
            kernels_.open("for (int " + var + " = 0; " + var + " < V; " + var + "++) {");
            break;
        case IterDomainKind::Neighbors: {
            std::string src = deviceExpr(*f.domain.source, 10);
            kernels_.open("for (int " + edgeVar + " = " + p + "offsets[" + src + "]; " + edgeVar +
                          " < " + p + "offsets[" + src + " + 1]; " + edgeVar + "++) {");
            kernels_.line("int " + var + " = " + p + "dests[" + edgeVar + "];");
            if (f.domain.source->is<VarRef>()) {
                k.edgeLoops.push_back({f.domain.source->symbol, f.varSymbol, edgeVar});
                pushedEdgeLoop = true;
                if (k.bfsVar >= 0 && f.domain.source->symbol == k.bfsVar)
                    kernels_.line("if (" + k.levelDev + "[" + var + "] != " + k.hopsParam +
                                  " + 1) continue;");
            }
            break;
        }
        case IterDomainKind::NodesTo: {
            std::string src = deviceExpr(*f.domain.source, 10);
            kernels_.open("for (int " + edgeVar + " = " + p + "rev_offsets[" + src + "]; " +
                          edgeVar + " < " + p + "rev_offsets[" + src + " + 1]; " + edgeVar +
                          "++) {");
            kernels_.line("int " + var + " = " + p + "rev_srcs[" + edgeVar + "];");
            break;
        }
        case IterDomainKind::Container:
            unsupported(BackendKind::Cuda, "node-set iteration inside kernels", SourceSpan{});
    }
    ++k.loopDepth;
    if (f.filter) kernels_.line("if (!(" + deviceExpr(*f.filter) + ")) continue;");
    deviceBlock(f.body);
    --k.loopDepth;
    if (pushedEdgeLoop) k.edgeLoops.pop_back();
    kernels_.close();
}

void CudaEmitter::deviceReduce(const ReduceAssignStmt& r, SourceSpan span) {
    KernelCtx& k = *kctx_;
    std::string value = r.value ? deviceExpr(*r.value) : "1";

    if (r.target->is<VarRef>() && k.locals.count(r.target->symbol)) {
        std::string t = nm(r.target->symbol);
        switch (r.op) {
            case ReduceOp::Sum: kernels_.line(t + " += " + value + ";"); break;
            case ReduceOp::Product: kernels_.line(t + " *= " + value + ";"); break;
            case ReduceOp::Count: kernels_.line(t + " += 1;"); break;
            case ReduceOp::All: kernels_.line(t + " = " + t + " && " + value + ";"); break;
            case ReduceOp::Any: kernels_.line(t + " = " + t + " || " + value + ";"); break;
        }
        return;
    }

    int targetSym = r.target->symbol;
    const Symbol& ts = sym(targetSym);
    TypeKind elem = ts.kind == SymbolKind::NodeProperty ? ts.type.element : ts.type.kind;

    // Bool reductions use flag-style conditional stores: byte stores are
    // atomic in hardware and the reduction is monotone.
    auto boolStore = [&](const std::string& cond, const std::string& store) {
        kernels_.open("if (" + cond + ") {");
        kernels_.line(store);
        kernels_.close();
    };

    if (r.target->is<PropAccess>()) {
        std::string obj = deviceExpr(*r.target->as<PropAccess>().object, 10);
        if (targetSym == k.fpProp) {
            std::string cell = k.fpFlagOnly ? "" : k.fpNextDev + "[" + obj + "] = ";
            if (r.op == ReduceOp::Any) {
                kernels_.open("if (" + value + ") {");
                if (!k.fpFlagOnly) kernels_.line(k.fpNextDev + "[" + obj + "] = true;");
                if (!k.fpConvergedValue) kernels_.line("*" + k.fpFlagDev + " = false;");
                kernels_.close();
            } else if (r.op == ReduceOp::All) {
                kernels_.open("if (!(" + value + ")) {");
                if (!k.fpFlagOnly) kernels_.line(k.fpNextDev + "[" + obj + "] = false;");
                if (k.fpConvergedValue) kernels_.line("*" + k.fpFlagDev + " = false;");
                kernels_.close();
            } else {
                unsupported(BackendKind::Cuda, "numeric reduction on a convergence property",
                            span);
            }
            (void)cell;
            return;
        }
        std::string ref = "&" + dev(targetSym) + "[" + obj + "]";
        std::string cellText = dev(targetSym) + "[" + obj + "]";
        switch (r.op) {
            case ReduceOp::Sum:
            case ReduceOp::Count: {
                std::string v = r.op == ReduceOp::Count ? "1" : value;
                if (elem == TypeKind::Long)
                    kernels_.line("atomicAdd((unsigned long long*)(" + ref +
                                  "), (unsigned long long)(" + v + "));");
                else
                    kernels_.line("atomicAdd(" + ref + ", (" + ctype(elem) + ")(" + v + "));");
                break;
            }
            case ReduceOp::Product:
                needAtomicMul_ = true;
                kernels_.line("graphdsl_atomic_mul(" + ref + ", (" + ctype(elem) + ")(" + value +
                              "));");
                break;
            case ReduceOp::All: boolStore("!(" + value + ")", cellText + " = false;"); break;
            case ReduceOp::Any: boolStore(value, cellText + " = true;"); break;
        }
        return;
    }

    // Shared scalar cell.
    std::string ref = dev(targetSym);
    switch (r.op) {
        case ReduceOp::Sum:
        case ReduceOp::Count: {
            std::string v = r.op == ReduceOp::Count ? "1" : value;
            if (elem == TypeKind::Long)
                kernels_.line("atomicAdd((unsigned long long*)" + ref +
                              ", (unsigned long long)(" + v + "));");
            else
                kernels_.line("atomicAdd(" + ref + ", (" + ctype(elem) + ")(" + v + "));");
            break;
        }
        case ReduceOp::Product:
            needAtomicMul_ = true;
            kernels_.line("graphdsl_atomic_mul(" + ref + ", (" + ctype(elem) + ")(" + value +
                          "));");
            break;
        case ReduceOp::All: boolStore("!(" + value + ")", "*" + ref + " = false;"); break;
        case ReduceOp::Any: boolStore(value, "*" + ref + " = true;"); break;
    }
}

void CudaEmitter::deviceMinMax(const MinMaxAssignStmt& m) {
    KernelCtx& k = *kctx_;
    const Expr& t0 = *m.targets[0];
    const Symbol& ts = sym(t0.symbol);
    TypeKind elem = ts.kind == SymbolKind::NodeProperty ? ts.type.element : ts.type.kind;

    if (t0.is<VarRef>() && k.locals.count(t0.symbol)) {
        std::string t = nm(t0.symbol);
        kernels_.open("{");
        kernels_.line(ctype(elem) + " cand = " + deviceExpr(*m.compareCandidate) + ";");
        kernels_.open(std::string("if (") + (m.isMin ? "cand < " : "cand > ") + t + ") {");
        kernels_.line(t + " = cand;");
        for (size_t i = 0; i < m.attachedValues.size(); ++i)
            deviceAttachedAssign(*m.targets[i + 1], *m.attachedValues[i]);
        kernels_.close();
        kernels_.close();
        return;
    }

    std::string curRef, curExpr;
    if (t0.is<VarRef>()) {
        curRef = dev(t0.symbol);
        curExpr = "(*" + dev(t0.symbol) + ")";
    } else {
        std::string obj = deviceExpr(*t0.as<PropAccess>().object, 10);
        curRef = "&" + dev(t0.symbol) + "[" + obj + "]";
        curExpr = dev(t0.symbol) + "[" + obj + "]";
    }

    kernels_.open("{");
    kernels_.line(ctype(elem) + " cand = " + deviceExpr(*m.compareCandidate) + ";");
    kernels_.open("if (" + curExpr + (m.isMin ? " > cand) {" : " < cand) {"));
    if (isFloatElem(elem)) {
        needFloatMinMax_ = true;
        kernels_.line(std::string("graphdsl_atomic_") + (m.isMin ? "min" : "max") + "_double(" +
                      curRef + ", cand);");
    } else {
        kernels_.line(std::string(m.isMin ? "atomicMin" : "atomicMax") + "(" + curRef +
                      ", cand);");
    }
    for (size_t i = 0; i < m.attachedValues.size(); ++i)
        deviceAttachedAssign(*m.targets[i + 1], *m.attachedValues[i]);
    kernels_.close();
    kernels_.close();
}

// ---------------------------------------------------------------------------
// Declarations, cleanup, assembly
// ---------------------------------------------------------------------------

void CudaEmitter::collectHostDecls(const Block& b, std::vector<int>& out) const {
    for (const auto& sp : b.stmts) {
        const Stmt& s = *sp;
        if (s.is<DeclStmt>()) {
            const auto& d = s.as<DeclStmt>();
            const Symbol& ds = sym(d.symbol);
            if (ds.kind == SymbolKind::EdgeProperty) continue;
            if (ds.kind == SymbolKind::NodeProperty && isElided(d.symbol)) continue;
            out.push_back(d.symbol);
        } else if (s.is<ForAllStmt>()) {
            const auto& f = s.as<ForAllStmt>();
            bool isRegion = f.parallel && f.domain.kind != IterDomainKind::Container;
            if (!isRegion) collectHostDecls(f.body, out);
        } else if (s.is<FixedPointStmt>()) {
            collectHostDecls(s.as<FixedPointStmt>().body, out);
        } else if (s.is<IfStmt>()) {
            collectHostDecls(s.as<IfStmt>().thenBlock, out);
            if (s.as<IfStmt>().elseBlock) collectHostDecls(*s.as<IfStmt>().elseBlock, out);
        }
    }
}

void CudaEmitter::emitHostDecls(const FunctionDecl& fn) {
    std::vector<int> decls;
    collectHostDecls(fn.body, decls);
    if (decls.empty()) return;
    host_.line("// host state");
    for (int id : decls) {
        const Symbol& s = sym(id);
        if (s.kind == SymbolKind::NodeProperty) {
            std::string t = ctype(s.type.element);
            host_.line(t + "* " + nm(id) + " = (" + t + "*)calloc(V, sizeof(" + t + "));");
        } else {
            std::string init = s.type.kind == TypeKind::Bool ? "false" : "0";
            host_.line(elemType(id) + " " + nm(id) + " = " + init + ";");
        }
    }
}

std::vector<sema::GraphArray> CudaEmitter::collectGraphArrays() const {
    std::set<sema::GraphArray> set;
    for (const auto& rp : plan_.regions)
        set.insert(rp.info->graphArrays.begin(), rp.info->graphArrays.end());
    return {set.begin(), set.end()};
}

std::string CudaEmitter::hostGraphArraySource(sema::GraphArray a) const {
    if (a == sema::GraphArray::Weights) {
        for (const auto& s : prog_.symbols.all())
            if (s.kind == SymbolKind::EdgeProperty && s.isParam) return nm(s.id);
    }
    return std::string("g.") + graphArrayName(a);
}

void CudaEmitter::emitCleanup() {
    for (auto a : collectGraphArrays())
        host_.line("cudaFree(" + cfg_.deviceVarPrefix + graphArrayName(a) + ");");
    for (int id : plan_.deviceArrays) host_.line("cudaFree(" + dev(id) + ");");
    for (int id : plan_.deviceScalars) host_.line("cudaFree(" + dev(id) + ");");
    for (const auto& [stmt, next] : plan_.fpNextName)
        host_.line("cudaFree(" + cfg_.deviceVarPrefix + next + ");");
    for (const auto& [stmt, names] : plan_.bfsNames) {
        host_.line("cudaFree(" + cfg_.deviceVarPrefix + names.level + ");");
        host_.line("cudaFree(" + cfg_.deviceVarPrefix + names.finished + ");");
        host_.line("free(" + names.level + ");");
    }
    std::vector<int> decls;
    collectHostDecls(prog_.entry().body, decls);
    for (int id : decls)
        if (sym(id).kind == SymbolKind::NodeProperty) host_.line("free(" + nm(id) + ");");
}

EmitUnit CudaEmitter::run() {
    const FunctionDecl& fn = prog_.entry();

    bool returns = false;
    TypeKind retKind = TypeKind::Void;
    for (const auto& st : fn.body.stmts)
        if (st->is<ReturnStmt>() && st->as<ReturnStmt>().value) {
            returns = true;
            retKind = st->as<ReturnStmt>().value->type.kind;
        }

    std::string sig = (returns ? ctype(retKind) : std::string("void")) + " " +
                      plan_.functionName + "(const GraphCsr& g";
    for (const auto& p : fn.params) {
        const Symbol& s = sym(p.symbol);
        switch (s.kind) {
            case SymbolKind::Graph: break;
            case SymbolKind::NodeProperty:
                sig += ", " + ctype(s.type.element) + "* " + nm(p.symbol);
                break;
            case SymbolKind::EdgeProperty: sig += ", const int* " + nm(p.symbol); break;
            case SymbolKind::NodeSet:
                sig += ", const int* " + nm(p.symbol) + ", int " + nm(p.symbol) + "_count";
                break;
            default: sig += ", " + elemType(p.symbol) + " " + nm(p.symbol); break;
        }
    }
    sig += ")";

    host_.open(sig + " {");
    host_.line("int V = g.n;");
    host_.line("int E = g.m;");
    host_.line("(void)E;");
    host_.line("const int threadsPerBlock = " + std::to_string(cfg_.numThreads) + ";");
    host_.line("int numBlocks = (V + threadsPerBlock - 1) / threadsPerBlock;");
    host_.line("(void)numBlocks;");
    host_.blank();

    host_.line("// device graph (static: copied in once, never copied back)");
    for (auto a : collectGraphArrays()) {
        std::string name = cfg_.deviceVarPrefix + graphArrayName(a);
        std::string size = (a == sema::GraphArray::Offsets || a == sema::GraphArray::RevOffsets)
                               ? "(V + 1)"
                               : "E";
        host_.line("int* " + name + ";");
        host_.line("cudaMalloc(&" + name + ", sizeof(int) * " + size + ");");
        host_.line("cudaMemcpy(" + name + ", " + hostGraphArraySource(a) + ", sizeof(int) * " +
                   size + ", cudaMemcpyHostToDevice);");
        recordTransfer(graphArrayName(a), TransferDir::HostToDevice, true);
    }

    emitHostDecls(fn);

    host_.line("// device state");
    for (int id : plan_.deviceArrays) {
        host_.line(elemType(id) + "* " + dev(id) + ";");
        host_.line("cudaMalloc(&" + dev(id) + ", sizeof(" + elemType(id) + ") * V);");
    }
    for (int id : plan_.deviceScalars) {
        host_.line(elemType(id) + "* " + dev(id) + ";");
        host_.line("cudaMalloc(&" + dev(id) + ", sizeof(" + elemType(id) + "));");
    }
    for (const auto& [stmt, next] : plan_.fpNextName) {
        host_.line("bool* " + cfg_.deviceVarPrefix + next + ";");
        host_.line("cudaMalloc(&" + cfg_.deviceVarPrefix + next + ", sizeof(bool) * V);");
    }
    for (const auto& [stmt, names] : plan_.bfsNames) {
        host_.line("int* " + names.level + " = (int*)malloc(sizeof(int) * V);");
        host_.line("int* " + cfg_.deviceVarPrefix + names.level + ";");
        host_.line("cudaMalloc(&" + cfg_.deviceVarPrefix + names.level + ", sizeof(int) * V);");
        host_.line("int " + names.hops + " = 0;");
        host_.line("bool " + names.finished + " = false;");
        host_.line("bool* " + cfg_.deviceVarPrefix + names.finished + ";");
        host_.line("cudaMalloc(&" + cfg_.deviceVarPrefix + names.finished + ", sizeof(bool));");
    }
    host_.blank();

    hostBlock(fn.body);

    bool tailReturn = !fn.body.stmts.empty() && fn.body.stmts.back()->is<ReturnStmt>();
    if (!tailReturn) emitCleanup();
    host_.close();

    std::string header = "// Generated " + plan_.unitName + " (CUDA backend)\n";
    std::string includes =
        "#include <cstdio>\n#include <cstdlib>\n#include <cstring>\n#include <climits>\n"
        "#include <cuda_runtime.h>\n\n";
    std::string prelude = preludeGraphRuntime();
    if (plan_.usesIsEdgeHelper)
        prelude += "\n" + preludeIsEdge("__host__ __device__ static inline");
    if (plan_.usesEdgeIndexHelper)
        prelude += "\n" + preludeEdgeIndex("__host__ __device__ static inline");
    if (plan_.usesMinWt)
        prelude +=
            "\nstatic int graphdsl_min_weight(const GraphCsr* g) {\n"
            "  int best = g->m > 0 ? g->weights[0] : 0;\n"
            "  for (int i = 1; i < g->m; i++) if (g->weights[i] < best) best = g->weights[i];\n"
            "  return best;\n}\n";
    if (plan_.usesMaxWt)
        prelude +=
            "\nstatic int graphdsl_max_weight(const GraphCsr* g) {\n"
            "  int best = g->m > 0 ? g->weights[0] : 0;\n"
            "  for (int i = 1; i < g->m; i++) if (g->weights[i] > best) best = g->weights[i];\n"
            "  return best;\n}\n";
    if (needFloatMinMax_)
        prelude +=
            "\n__device__ static inline void graphdsl_atomic_min_double(double* addr, double value) {\n"
            "  unsigned long long* cell = (unsigned long long*)addr;\n"
            "  unsigned long long old = *cell;\n"
            "  while (__longlong_as_double(old) > value) {\n"
            "    unsigned long long prev = atomicCAS(cell, old, __double_as_longlong(value));\n"
            "    if (prev == old) break;\n"
            "    old = prev;\n"
            "  }\n}\n"
            "\n__device__ static inline void graphdsl_atomic_max_double(double* addr, double value) {\n"
            "  unsigned long long* cell = (unsigned long long*)addr;\n"
            "  unsigned long long old = *cell;\n"
            "  while (__longlong_as_double(old) < value) {\n"
            "    unsigned long long prev = atomicCAS(cell, old, __double_as_longlong(value));\n"
            "    if (prev == old) break;\n"
            "    old = prev;\n"
            "  }\n}\n";
    if (needAtomicMul_)
        prelude +=
            "\n__device__ static inline void graphdsl_atomic_mul(double* addr, double value) {\n"
            "  unsigned long long* cell = (unsigned long long*)addr;\n"
            "  unsigned long long old = *cell, assumed;\n"
            "  do {\n"
            "    assumed = old;\n"
            "    old = atomicCAS(cell, assumed, __double_as_longlong(__longlong_as_double(assumed) * value));\n"
            "  } while (assumed != old);\n}\n"
            "\n__device__ static inline void graphdsl_atomic_mul(int* addr, int value) {\n"
            "  int old = *addr, assumed;\n"
            "  do {\n"
            "    assumed = old;\n"
            "    old = atomicCAS(addr, assumed, assumed * value);\n"
            "  } while (assumed != old);\n}\n"
            "\n__device__ static inline void graphdsl_atomic_mul(long long* addr, long long value) {\n"
            "  unsigned long long* cell = (unsigned long long*)addr;\n"
            "  unsigned long long old = *cell, assumed;\n"
            "  do {\n"
            "    assumed = old;\n"
            "    old = atomicCAS(cell, assumed, (unsigned long long)((long long)assumed * value));\n"
            "  } while (assumed != old);\n}\n";
    prelude += "\n";

    std::string mainText = buildMainDriver(prog_, plan_, "", false);

    int kernelOffset = countLines(header) + countLines(includes) + countLines(prelude);
    int hostOffset = kernelOffset + countLines(kernels_.text());

    std::string full =
        header + includes + prelude + kernels_.text() + host_.text() + "\n" + mainText;
    std::string fileName = plan_.unitName + "_cuda.cu";

    unit_.programName = plan_.unitName;
    unit_.backend = BackendKind::Cuda;
    unit_.files.push_back({fileName, full});
    unit_.lineCounts[fileName] = countLines(full);
    unit_.bodyLineCount = countNonBlank(kernels_.text()) + countNonBlank(host_.text());

    for (auto km : kernelMeta_) {
        km.file = fileName;
        km.defLine += kernelOffset;
        for (int& l : km.launchLines) l += hostOffset;
        unit_.kernels.push_back(km);
    }
    for (const auto& t : transfers_)
        unit_.transfers.push_back({t.symbol, t.dir, fileName, t.line + hostOffset, t.graphArray});
    for (const auto& l : loops_)
        unit_.loops.push_back(
            {l.flagName, fileName, l.beginLine + hostOffset, l.endLine + hostOffset, l.isBfs});
    return std::move(unit_);
}

}  // namespace

EmitUnit generateCuda(const sema::AnnotatedProgram& program, const Analyses& analyses,
                      const CodegenConfig& cfg, const LoweringPlan& plan) {
    return CudaEmitter(program, analyses, cfg, plan).run();
}

}  // namespace graphdsl::codegen
