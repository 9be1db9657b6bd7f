#include <cassert>
#include <optional>

#include "codegen_internal.hpp"

namespace graphdsl::codegen {

using namespace ast;
using sema::RegionKind;
using sema::Symbol;
using sema::SymbolKind;

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

// SYCL lowering: one source file; device state allocated once up front with
// malloc_device; each region is a named parallel_for over NUM_THREADS work
// items with a strided node loop; reductions and Min/Max use atomic_ref with
// relaxed ordering.
class SyclEmitter {
public:
    SyclEmitter(const sema::AnnotatedProgram& prog, const Analyses& an, const CodegenConfig& cfg,
                const LoweringPlan& plan)
        : prog_(prog), an_(an), cfg_(cfg), plan_(plan), out_(cfg.indent) {}

    EmitUnit run();

private:
    const sema::AnnotatedProgram& prog_;
    const Analyses& an_;
    const CodegenConfig& cfg_;
    const LoweringPlan& plan_;
    CodeWriter out_;

    EmitUnit unit_;
    std::vector<PendingTransfer> transfers_;
    std::vector<PendingLoop> loops_;
    std::vector<KernelMeta> kernelMeta_;
    const sema::FixedPointInfo* fpActive_ = nullptr;
    std::string fpNextName_;

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
    bool isElided(int propSym) const {
        for (const auto& fp : an_.transfers.fixedPoints)
            if (fp.flagOnly && fp.propertySymbol == propSym) return true;
        return false;
    }
    std::optional<std::string> fpNextFor(int id) const {
        if (fpActive_ && !fpActive_->flagOnly && id == fpActive_->propertySymbol)
            return cfg_.deviceVarPrefix + fpNextName_;
        return std::nullopt;
    }
    const RegionPlan& regionPlan(int regionId) const {
        for (const auto& rp : plan_.regions)
            if (rp.info->id == regionId) return rp;
        throw std::logic_error("no plan for region " + std::to_string(regionId));
    }

    friend struct SyclHostExpr;
    friend struct SyclDeviceExpr;
    std::string hostExpr(const Expr& e, int minPrec = 0);
    std::string deviceExpr(const Expr& e, int minPrec = 0);

    void recordTransfer(const std::string& symbol, TransferDir dir, bool graph) {
        transfers_.push_back({symbol, dir, out_.nextLine() - 1, graph});
    }
    void emitH2D(int id) {
        const std::string t = elemType(id);
        if (sym(id).kind == SymbolKind::NodeProperty)
            out_.line("q.memcpy(" + dev(id) + ", " + nm(id) + ", sizeof(" + t + ") * V).wait();");
        else
            out_.line("q.memcpy(" + dev(id) + ", &" + nm(id) + ", sizeof(" + t + ")).wait();");
        recordTransfer(nm(id), TransferDir::HostToDevice, false);
    }
    void emitD2H(int id) {
        const std::string t = elemType(id);
        if (sym(id).kind == SymbolKind::NodeProperty)
            out_.line("q.memcpy(" + nm(id) + ", " + dev(id) + ", sizeof(" + t + ") * V).wait();");
        else
            out_.line("q.memcpy(&" + nm(id) + ", " + dev(id) + ", sizeof(" + t + ")).wait();");
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

    void hostBlock(const Block& b) {
        for (const auto& s : b.stmts) hostStmt(*s);
    }
    void hostStmt(const Stmt& s);
    void hostAssign(const Expr& target, const std::string& valueText);
    void emitAttach(const CallStmt& c);
    void emitFixedPoint(const Stmt& s);
    void emitBfs(const Stmt& s);
    void emitForAllRegion(const Stmt& s);
    void emitHostDecls(const FunctionDecl& fn);
    void collectHostDecls(const Block& b, std::vector<int>& out) const;
    std::vector<sema::GraphArray> collectGraphArrays() const;
    std::string hostGraphArraySource(sema::GraphArray a) const;
    void emitCleanup();

    // Opens the submit/parallel_for scaffold with a strided node loop; the
    // caller emits the per-node body and calls closeKernel().
    void openKernel(const RegionPlan& rp, const std::string& nodeVar);
    void closeKernel();

    void deviceBlock(const Block& b);
    void deviceStmt(const Stmt& s);
    void deviceAssignProp(int propSym, const std::string& objText, const Expr& value);
    void deviceAttachedAssign(const Expr& target, const Expr& value);
    void deviceReduce(const ReduceAssignStmt& r, SourceSpan span);
    void deviceMinMax(const MinMaxAssignStmt& m);
    void deviceForAll(const ForAllStmt& f);
};

struct SyclHostExpr : ExprEmitter {
    SyclEmitter* e;
    const LoweringPlan& plan;
    SyclHostExpr(SyclEmitter* em, const sema::AnnotatedProgram& pr, const LoweringPlan& pl)
        : e(em), plan(pl) {
        prog = &pr;
    }
    std::string scalarRef(int symbol) override { return plan.names.at(symbol); }
    std::string propRef(int symbol, const std::string& obj) override {
        return plan.names.at(symbol) + "[" + obj + "]";
    }
    std::string edgeWeightRef(const std::string& edge) override {
        for (const auto& s : prog->symbols.all())
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
        unsupported(BackendKind::Sycl, "host method " + m.method, expr.span);
    }
};

struct SyclDeviceExpr : ExprEmitter {
    SyclEmitter* e;
    const LoweringPlan& plan;
    const CodegenConfig& cfg;
    SyclEmitter::KernelCtx* k;
    SyclDeviceExpr(SyclEmitter* em, const sema::AnnotatedProgram& pr, const LoweringPlan& pl,
                   const CodegenConfig& c, SyclEmitter::KernelCtx* ctx)
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
        unsupported(BackendKind::Sycl, "device method " + m.method, expr.span);
    }
};

std::string SyclEmitter::hostExpr(const Expr& e, int minPrec) {
    SyclHostExpr he(this, prog_, plan_);
    return he.emit(e, minPrec);
}
std::string SyclEmitter::deviceExpr(const Expr& e, int minPrec) {
    SyclDeviceExpr de(this, prog_, plan_, cfg_, kctx_);
    return de.emit(e, minPrec);
}

// ---------------------------------------------------------------------------
// Host statements (mirrors the CUDA host walk with SYCL runtime calls)
// ---------------------------------------------------------------------------

void SyclEmitter::hostAssign(const Expr& target, const std::string& valueText) {
    if (target.is<VarRef>()) {
        out_.line(nm(target.symbol) + " = " + valueText + ";");
        return;
    }
    if (sym(target.symbol).kind == SymbolKind::EdgeProperty)
        unsupported(BackendKind::Sycl, "edge property writes", target.span);
    if (isElided(target.symbol)) return;
    out_.line(nm(target.symbol) + "[" + hostExpr(*target.as<PropAccess>().object, 10) +
              "] = " + valueText + ";");
}

void SyclEmitter::emitAttach(const CallStmt& c) {
    const auto& m = c.call->as<MethodCall>();
    for (size_t i = 0; i < m.args.size(); ++i) {
        int propSym = m.argSymbols.at(i);
        if (isElided(propSym)) continue;
        out_.open("for (int i = 0; i < V; i++) {");
        out_.line(nm(propSym) + "[i] = " + hostExpr(*m.args[i]) + ";");
        out_.close();
    }
}

void SyclEmitter::hostStmt(const Stmt& s) {
    emitPlanned(plan_.before, &s);

    if (s.is<DeclStmt>()) {
        const auto& d = s.as<DeclStmt>();
        const Symbol& ds = sym(d.symbol);
        if (ds.kind != SymbolKind::NodeProperty && ds.kind != SymbolKind::EdgeProperty && d.init)
            out_.line(nm(d.symbol) + " = " + hostExpr(*d.init) + ";");
    } else if (s.is<AssignStmt>()) {
        hostAssign(*s.as<AssignStmt>().target, hostExpr(*s.as<AssignStmt>().value));
    } else if (s.is<ReduceAssignStmt>()) {
        const auto& r = s.as<ReduceAssignStmt>();
        std::string t = r.target->is<VarRef>()
                            ? nm(r.target->symbol)
                            : nm(r.target->symbol) + "[" +
                                  hostExpr(*r.target->as<PropAccess>().object, 10) + "]";
        switch (r.op) {
            case ReduceOp::Sum: out_.line(t + " += " + hostExpr(*r.value) + ";"); break;
            case ReduceOp::Product: out_.line(t + " *= " + hostExpr(*r.value) + ";"); break;
            case ReduceOp::Count: out_.line(t + " += 1;"); break;
            case ReduceOp::All:
                out_.line(t + " = " + t + " && " + hostExpr(*r.value, 3) + ";");
                break;
            case ReduceOp::Any:
                out_.line(t + " = " + t + " || " + hostExpr(*r.value, 2) + ";");
                break;
        }
    } else if (s.is<MinMaxAssignStmt>()) {
        const auto& m = s.as<MinMaxAssignStmt>();
        out_.open("{");
        out_.line(ctype(m.compareCandidate->type.kind) + " cand = " +
                  hostExpr(*m.compareCandidate) + ";");
        out_.open(std::string("if (") + (m.isMin ? "cand < " : "cand > ") +
                  hostExpr(*m.compareCurrent, 10) + ") {");
        hostAssign(*m.targets[0], "cand");
        for (size_t i = 0; i < m.attachedValues.size(); ++i)
            hostAssign(*m.targets[i + 1], hostExpr(*m.attachedValues[i]));
        out_.close();
        out_.close();
    } else if (s.is<IfStmt>()) {
        const auto& i = s.as<IfStmt>();
        out_.open("if (" + hostExpr(*i.cond) + ") {");
        hostBlock(i.thenBlock);
        if (i.elseBlock) {
            out_.closeOpen("} else {");
            hostBlock(*i.elseBlock);
        }
        out_.close();
    } else if (s.is<CallStmt>()) {
        emitAttach(s.as<CallStmt>());
    } else if (s.is<ReturnStmt>()) {
        const auto& r = s.as<ReturnStmt>();
        emitPlanned(plan_.after, &s);
        std::string value = r.value ? hostExpr(*r.value) : "";
        emitCleanup();
        out_.line(value.empty() ? "return;" : "return " + value + ";");
        return;
    } else if (s.is<ForAllStmt>()) {
        const auto& f = s.as<ForAllStmt>();
        bool isRegion = f.parallel && f.domain.kind != IterDomainKind::Container;
        if (isRegion) {
            emitForAllRegion(s);
        } else if (f.domain.kind == IterDomainKind::Container) {
            const Symbol& set = sym(f.domain.containerSymbol);
            std::string var = nm(f.varSymbol);
            out_.open("for (int " + var + "_i = 0; " + var + "_i < " + nm(set.id) + "_count; " +
                      var + "_i++) {");
            out_.line("int " + var + " = " + nm(set.id) + "[" + var + "_i];");
            if (f.filter) out_.open("if (" + hostExpr(*f.filter) + ") {");
            hostBlock(f.body);
            if (f.filter) out_.close();
            out_.close();
        } else {
            std::string var = nm(f.varSymbol);
            if (f.domain.kind == IterDomainKind::Nodes) {
                out_.open("for (int " + var + " = 0; " + var + " < V; " + var + "++) {");
            } else {
                std::string srcText = hostExpr(*f.domain.source, 10);
                const char* off =
                    f.domain.kind == IterDomainKind::Neighbors ? "offsets" : "rev_offsets";
                const char* arr =
                    f.domain.kind == IterDomainKind::Neighbors ? "dests" : "rev_srcs";
                out_.open("for (int edge = g." + std::string(off) + "[" + srcText +
                          "]; edge < g." + off + "[" + srcText + " + 1]; edge++) {");
                out_.line("int " + var + " = g." + std::string(arr) + "[edge];");
            }
            if (f.filter) out_.open("if (" + hostExpr(*f.filter) + ") {");
            hostBlock(f.body);
            if (f.filter) out_.close();
            out_.close();
        }
    } else if (s.is<FixedPointStmt>()) {
        emitFixedPoint(s);
    } else if (s.is<IterateBfsStmt>()) {
        emitBfs(s);
    }

    emitPlanned(plan_.after, &s);
}

// ---------------------------------------------------------------------------
// Regions
// ---------------------------------------------------------------------------

void SyclEmitter::openKernel(const RegionPlan& rp, const std::string& nodeVar) {
    KernelMeta meta;
    meta.name = rp.kernelName;
    meta.regionId = rp.info->id;
    meta.defLine = out_.nextLine();
    meta.launchLines.push_back(out_.nextLine());
    kernelMeta_.push_back(meta);
    out_.open("q.submit([&](sycl::handler& h) {");
    out_.open("h.parallel_for<class " + rp.kernelName + ">(sycl::range<1>(NUM_THREADS), [=](sycl::id<1> graphdsl_tid) {");
    out_.open("for (int " + nodeVar + " = graphdsl_tid[0]; " + nodeVar + " < V; " + nodeVar +
              " += NUM_THREADS) {");
}

void SyclEmitter::closeKernel() {
    out_.close();
    out_.close("});");
    out_.close("}).wait();");
}

void SyclEmitter::emitForAllRegion(const Stmt& s) {
    const auto& f = s.as<ForAllStmt>();
    if (f.domain.kind != IterDomainKind::Nodes)
        unsupported(BackendKind::Sycl, "parallel regions over neighbor domains", s.span);
    const RegionPlan& rp = regionPlan(f.regionId);

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
    openKernel(rp, nm(f.varSymbol));
    if (f.filter) {
        out_.open("if (" + deviceExpr(*f.filter) + ") {");
        deviceBlock(f.body);
        out_.close();
    } else {
        deviceBlock(f.body);
    }
    closeKernel();
    kctx_ = nullptr;
}

void SyclEmitter::emitFixedPoint(const Stmt& s) {
    const auto& f = s.as<FixedPointStmt>();
    const sema::FixedPointInfo* info = nullptr;
    for (const auto& fp : an_.transfers.fixedPoints)
        if (fp.stmt == &s) info = &fp;
    assert(info);

    std::string flag = nm(f.flagSymbol);
    bool buffered = !info->flagOnly;
    std::string nextDev = buffered ? cfg_.deviceVarPrefix + plan_.fpNextName.at(&s) : "";
    std::string propDev = buffered ? dev(info->propertySymbol) : "";

    int begin = out_.nextLine();
    out_.open("while (!" + flag + ") {");
    out_.line(flag + " = true;");
    emitH2D(f.flagSymbol);
    if (buffered)
        out_.line("q.fill(" + nextDev + ", " +
                  (info->convergedWhenAllFalse ? "false" : "true") + ", V).wait();");

    fpActive_ = info;
    fpNextName_ = buffered ? plan_.fpNextName.at(&s) : "";
    hostBlock(f.body);
    fpActive_ = nullptr;

    emitD2H(f.flagSymbol);
    if (buffered) {
        out_.line("bool* graphdsl_swap = " + propDev + ";");
        out_.line(propDev + " = " + nextDev + ";");
        out_.line(nextDev + " = graphdsl_swap;");
    }
    out_.close();
    loops_.push_back({flag, begin, out_.nextLine() - 1, false});
}

void SyclEmitter::emitBfs(const Stmt& s) {
    const auto& b = s.as<IterateBfsStmt>();
    const BfsNames& names = plan_.bfsNames.at(&s);
    const RegionPlan& fwd = regionPlan(b.regionId);

    const std::string levelDev = cfg_.deviceVarPrefix + names.level;
    const std::string finDev = cfg_.deviceVarPrefix + names.finished;

    out_.open("for (int i = 0; i < V; i++) {");
    out_.line(names.level + "[i] = -1;");
    out_.close();
    out_.line(names.level + "[" + hostExpr(*b.root, 10) + "] = 0;");
    out_.line("q.memcpy(" + levelDev + ", " + names.level + ", sizeof(int) * V).wait();");
    out_.line(names.hops + " = 0;");
    int begin = out_.nextLine();
    out_.open("do {");
    out_.line(names.finished + " = true;");
    out_.line("q.memcpy(" + finDev + ", &" + names.finished + ", sizeof(bool)).wait();");
    transfers_.push_back({names.finished, TransferDir::HostToDevice, out_.nextLine() - 1, false});

    KernelCtx ctx;
    ctx.rp = &fwd;
    ctx.locals.insert(b.varSymbol);
    ctx.bfsVar = b.varSymbol;
    ctx.levelDev = levelDev;
    ctx.hopsParam = names.hops;
    if (fpActive_) {
        ctx.fpProp = fpActive_->propertySymbol;
        ctx.fpFlagOnly = fpActive_->flagOnly;
        ctx.fpNextDev = fpActive_->flagOnly ? "" : cfg_.deviceVarPrefix + fpNextName_;
        ctx.fpFlagDev = dev(fpActive_->flagSymbol);
        ctx.fpConvergedValue = !fpActive_->convergedWhenAllFalse;
    }
    kctx_ = &ctx;
    std::string var = nm(b.varSymbol);
    openKernel(fwd, var);
    out_.open("if (" + levelDev + "[" + var + "] == " + names.hops + ") {");
    out_.open("for (int bfs_edge = " + cfg_.deviceVarPrefix + "offsets[" + var +
              "]; bfs_edge < " + cfg_.deviceVarPrefix + "offsets[" + var + " + 1]; bfs_edge++) {");
    out_.line("int bfs_nbr = " + cfg_.deviceVarPrefix + "dests[bfs_edge];");
    out_.open("if (" + levelDev + "[bfs_nbr] == -1) {");
    out_.line(levelDev + "[bfs_nbr] = " + names.hops + " + 1;");
    out_.line("*" + finDev + " = false;");
    out_.close();
    out_.close();
    for (const auto& inner : b.body.stmts)
        if (!inner->is<IterateRevStmt>()) deviceStmt(*inner);
    out_.close();
    closeKernel();
    kctx_ = nullptr;

    out_.line("q.memcpy(&" + names.finished + ", " + finDev + ", sizeof(bool)).wait();");
    transfers_.push_back({names.finished, TransferDir::DeviceToHost, out_.nextLine() - 1, false});
    out_.line(names.hops + " = " + names.hops + " + 1;");
    out_.close("} while (!" + names.finished + ");");
    loops_.push_back({names.finished, begin, out_.nextLine() - 1, true});

    out_.line(names.hops + " = " + names.hops + " - 1;");
    for (const auto& inner : b.body.stmts) {
        if (!inner->is<IterateRevStmt>()) continue;
        const auto& rev = inner->as<IterateRevStmt>();
        const RegionPlan& rp = regionPlan(rev.regionId);
        out_.open("while (" + names.hops + " >= 0) {");
        KernelCtx rctx;
        rctx.rp = &rp;
        rctx.locals.insert(b.varSymbol);
        rctx.bfsVar = b.varSymbol;
        rctx.levelDev = levelDev;
        rctx.hopsParam = names.hops;
        kctx_ = &rctx;
        openKernel(rp, var);
        out_.open("if (" + levelDev + "[" + var + "] == " + names.hops + ") {");
        if (rev.filter) {
            out_.open("if (" + deviceExpr(*rev.filter) + ") {");
            deviceBlock(rev.body);
            out_.close();
        } else {
            deviceBlock(rev.body);
        }
        out_.close();
        closeKernel();
        kctx_ = nullptr;
        out_.line(names.hops + " = " + names.hops + " - 1;");
        out_.close();
    }
}

// ---------------------------------------------------------------------------
// Device statements
// ---------------------------------------------------------------------------

void SyclEmitter::deviceBlock(const Block& b) {
    for (const auto& s : b.stmts) deviceStmt(*s);
}

void SyclEmitter::deviceAssignProp(int propSym, const std::string& objText, const Expr& value) {
    KernelCtx& k = *kctx_;
    std::string valueText = deviceExpr(value);
    if (propSym == k.fpProp) {
        bool isLit = value.is<BoolLit>();
        bool litVal = isLit && value.as<BoolLit>().value;
        if (!k.fpFlagOnly) out_.line(k.fpNextDev + "[" + objText + "] = " + valueText + ";");
        if (isLit) {
            if (litVal != k.fpConvergedValue) out_.line("*" + k.fpFlagDev + " = false;");
        } else {
            out_.open("if (" + valueText + (k.fpConvergedValue ? " == false) {" : " == true) {"));
            out_.line("*" + k.fpFlagDev + " = false;");
            out_.close();
        }
        return;
    }
    out_.line(dev(propSym) + "[" + objText + "] = " + valueText + ";");
}

void SyclEmitter::deviceAttachedAssign(const Expr& target, const Expr& value) {
    KernelCtx& k = *kctx_;
    if (target.is<VarRef>()) {
        if (k.locals.count(target.symbol))
            out_.line(nm(target.symbol) + " = " + deviceExpr(value) + ";");
        else
            out_.line("*" + dev(target.symbol) + " = " + deviceExpr(value) + ";");
        return;
    }
    deviceAssignProp(target.symbol, deviceExpr(*target.as<PropAccess>().object, 10), value);
}

void SyclEmitter::deviceStmt(const Stmt& s) {
    KernelCtx& k = *kctx_;
    if (s.is<DeclStmt>()) {
        const auto& d = s.as<DeclStmt>();
        k.locals.insert(d.symbol);
        std::string init = "0";
        if (sym(d.symbol).type.kind == TypeKind::Bool) init = "false";
        if (d.init) init = deviceExpr(*d.init);
        out_.line(elemType(d.symbol) + " " + nm(d.symbol) + " = " + init + ";");
        return;
    }
    if (s.is<AssignStmt>()) {
        const auto& a = s.as<AssignStmt>();
        if (a.target->is<VarRef>()) {
            int t = a.target->symbol;
            if (k.locals.count(t))
                out_.line(nm(t) + " = " + deviceExpr(*a.value) + ";");
            else
                out_.line("*" + dev(t) + " = " + deviceExpr(*a.value) + ";");
        } else {
            if (sym(a.target->symbol).kind == SymbolKind::EdgeProperty)
                unsupported(BackendKind::Sycl, "edge property writes", s.span);
            deviceAssignProp(a.target->symbol,
                             deviceExpr(*a.target->as<PropAccess>().object, 10), *a.value);
        }
        return;
    }
    if (s.is<ReduceAssignStmt>()) return deviceReduce(s.as<ReduceAssignStmt>(), s.span);
    if (s.is<MinMaxAssignStmt>()) return deviceMinMax(s.as<MinMaxAssignStmt>());
    if (s.is<IfStmt>()) {
        const auto& i = s.as<IfStmt>();
        out_.open("if (" + deviceExpr(*i.cond) + ") {");
        deviceBlock(i.thenBlock);
        if (i.elseBlock) {
            out_.closeOpen("} else {");
            deviceBlock(*i.elseBlock);
        }
        out_.close();
        return;
    }
    if (s.is<ForAllStmt>()) return deviceForAll(s.as<ForAllStmt>());
    if (s.is<CallStmt>())
        unsupported(BackendKind::Sycl, "attachNodeProperty inside kernels", s.span);
    unsupported(BackendKind::Sycl, "host constructs inside kernels", s.span);
}

void SyclEmitter::deviceForAll(const ForAllStmt& f) {
    KernelCtx& k = *kctx_;
    std::string var = nm(f.varSymbol);
    k.locals.insert(f.varSymbol);
    std::string edgeVar = k.loopDepth == 0 ? "edge" : "edge_" + std::to_string(k.loopDepth);
    bool pushedEdgeLoop = false;
    const std::string p = cfg_.deviceVarPrefix;

    switch (f.domain.kind) {
        case IterDomainKind::Nodes:
            out_.open("for (int " + var + " = 0; " + var + " < V; " + var + "++) {");
            break;
        case IterDomainKind::Neighbors: {
            std::string src = deviceExpr(*f.domain.source, 10);
            out_.open("for (int " + edgeVar + " = " + p + "offsets[" + src + "]; " + edgeVar +
                      " < " + p + "offsets[" + src + " + 1]; " + edgeVar + "++) {");
            out_.line("int " + var + " = " + p + "dests[" + edgeVar + "];");
            if (f.domain.source->is<VarRef>()) {
                k.edgeLoops.push_back({f.domain.source->symbol, f.varSymbol, edgeVar});
                pushedEdgeLoop = true;
                if (k.bfsVar >= 0 && f.domain.source->symbol == k.bfsVar)
                    out_.line("if (" + k.levelDev + "[" + var + "] != " + k.hopsParam +
                              " + 1) continue;");
            }
            break;
        }
        case IterDomainKind::NodesTo: {
            std::string src = deviceExpr(*f.domain.source, 10);
            out_.open("for (int " + edgeVar + " = " + p + "rev_offsets[" + src + "]; " + edgeVar +
                      " < " + p + "rev_offsets[" + src + " + 1]; " + edgeVar + "++) {");
            out_.line("int " + var + " = " + p + "rev_srcs[" + edgeVar + "];");
            break;
        }
        case IterDomainKind::Container:
            unsupported(BackendKind::Sycl, "node-set iteration inside kernels", SourceSpan{});
    }
    ++k.loopDepth;
    if (f.filter) out_.line("if (!(" + deviceExpr(*f.filter) + ")) continue;");
    deviceBlock(f.body);
    --k.loopDepth;
    if (pushedEdgeLoop) k.edgeLoops.pop_back();
    out_.close();
}

void SyclEmitter::deviceReduce(const ReduceAssignStmt& r, SourceSpan span) {
    KernelCtx& k = *kctx_;
    std::string value = r.value ? deviceExpr(*r.value) : "1";

    if (r.target->is<VarRef>() && k.locals.count(r.target->symbol)) {
        std::string t = nm(r.target->symbol);
        switch (r.op) {
            case ReduceOp::Sum: out_.line(t + " += " + value + ";"); break;
            case ReduceOp::Product: out_.line(t + " *= " + value + ";"); break;
            case ReduceOp::Count: out_.line(t + " += 1;"); break;
            case ReduceOp::All: out_.line(t + " = " + t + " && " + value + ";"); break;
            case ReduceOp::Any: out_.line(t + " = " + t + " || " + value + ";"); break;
        }
        return;
    }

    int targetSym = r.target->symbol;
    const Symbol& ts = sym(targetSym);
    TypeKind elem = ts.kind == SymbolKind::NodeProperty ? ts.type.element : ts.type.kind;
    std::string atomicType = ctype(elem);

    if (r.target->is<PropAccess>()) {
        std::string obj = deviceExpr(*r.target->as<PropAccess>().object, 10);
        if (targetSym == k.fpProp) {
            if (r.op == ReduceOp::Any) {
                out_.open("if (" + value + ") {");
                if (!k.fpFlagOnly) out_.line(k.fpNextDev + "[" + obj + "] = true;");
                if (!k.fpConvergedValue) out_.line("*" + k.fpFlagDev + " = false;");
                out_.close();
            } else if (r.op == ReduceOp::All) {
                out_.open("if (!(" + value + ")) {");
                if (!k.fpFlagOnly) out_.line(k.fpNextDev + "[" + obj + "] = false;");
                if (k.fpConvergedValue) out_.line("*" + k.fpFlagDev + " = false;");
                out_.close();
            } else {
                unsupported(BackendKind::Sycl, "numeric reduction on a convergence property",
                            span);
            }
            return;
        }
        std::string cell = dev(targetSym) + "[" + obj + "]";
        switch (r.op) {
            case ReduceOp::Sum:
                out_.line("graphdsl_atomic<" + atomicType + ">(" + cell + ").fetch_add((" +
                          atomicType + ")(" + value + "));");
                break;
            case ReduceOp::Count:
                out_.line("graphdsl_atomic<" + atomicType + ">(" + cell + ").fetch_add((" +
                          atomicType + ")1);");
                break;
            case ReduceOp::Product:
                unsupported(BackendKind::Sycl, "product reductions on properties", span);
            case ReduceOp::All:
                out_.open("if (!(" + value + ")) {");
                out_.line(cell + " = false;");
                out_.close();
                break;
            case ReduceOp::Any:
                out_.open("if (" + value + ") {");
                out_.line(cell + " = true;");
                out_.close();
                break;
        }
        return;
    }

    std::string cell = "*" + dev(targetSym);
    switch (r.op) {
        case ReduceOp::Sum:
            out_.line("graphdsl_atomic<" + atomicType + ">(" + cell + ").fetch_add((" +
                      atomicType + ")(" + value + "));");
            break;
        case ReduceOp::Count:
            out_.line("graphdsl_atomic<" + atomicType + ">(" + cell + ").fetch_add((" +
                      atomicType + ")1);");
            break;
        case ReduceOp::Product:
            unsupported(BackendKind::Sycl, "product reductions on shared scalars", span);
        case ReduceOp::All:
            out_.open("if (!(" + value + ")) {");
            out_.line(cell + " = false;");
            out_.close();
            break;
        case ReduceOp::Any:
            out_.open("if (" + value + ") {");
            out_.line(cell + " = true;");
            out_.close();
            break;
    }
}

void SyclEmitter::deviceMinMax(const MinMaxAssignStmt& m) {
    KernelCtx& k = *kctx_;
    const Expr& t0 = *m.targets[0];
    const Symbol& ts = sym(t0.symbol);
    TypeKind elem = ts.kind == SymbolKind::NodeProperty ? ts.type.element : ts.type.kind;

    if (t0.is<VarRef>() && k.locals.count(t0.symbol)) {
        std::string t = nm(t0.symbol);
        out_.open("{");
        out_.line(ctype(elem) + " cand = " + deviceExpr(*m.compareCandidate) + ";");
        out_.open(std::string("if (") + (m.isMin ? "cand < " : "cand > ") + t + ") {");
        out_.line(t + " = cand;");
        for (size_t i = 0; i < m.attachedValues.size(); ++i)
            deviceAttachedAssign(*m.targets[i + 1], *m.attachedValues[i]);
        out_.close();
        out_.close();
        return;
    }

    std::string cell;
    if (t0.is<VarRef>())
        cell = "*" + dev(t0.symbol);
    else
        cell = dev(t0.symbol) + "[" + deviceExpr(*t0.as<PropAccess>().object, 10) + "]";

    out_.open("{");
    out_.line(ctype(elem) + " cand = " + deviceExpr(*m.compareCandidate) + ";");
    out_.open("if (" + cell + (m.isMin ? " > cand) {" : " < cand) {"));
    out_.line("graphdsl_atomic<" + ctype(elem) + ">(" + cell + ")." +
              (m.isMin ? "fetch_min" : "fetch_max") + "(cand);");
    for (size_t i = 0; i < m.attachedValues.size(); ++i)
        deviceAttachedAssign(*m.targets[i + 1], *m.attachedValues[i]);
    out_.close();
    out_.close();
}

// ---------------------------------------------------------------------------
// Declarations, cleanup, assembly
// ---------------------------------------------------------------------------

void SyclEmitter::collectHostDecls(const Block& b, std::vector<int>& out) const {
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

void SyclEmitter::emitHostDecls(const FunctionDecl& fn) {
    std::vector<int> decls;
    collectHostDecls(fn.body, decls);
    if (decls.empty()) return;
    out_.line("// host state");
    for (int id : decls) {
        const Symbol& s = sym(id);
        if (s.kind == SymbolKind::NodeProperty) {
            std::string t = ctype(s.type.element);
            out_.line(t + "* " + nm(id) + " = (" + t + "*)calloc(V, sizeof(" + t + "));");
        } else {
            std::string init = s.type.kind == TypeKind::Bool ? "false" : "0";
            out_.line(elemType(id) + " " + nm(id) + " = " + init + ";");
        }
    }
}

std::vector<sema::GraphArray> SyclEmitter::collectGraphArrays() const {
    std::set<sema::GraphArray> set;
    for (const auto& rp : plan_.regions)
        set.insert(rp.info->graphArrays.begin(), rp.info->graphArrays.end());
    return {set.begin(), set.end()};
}

std::string SyclEmitter::hostGraphArraySource(sema::GraphArray a) const {
    if (a == sema::GraphArray::Weights) {
        for (const auto& s : prog_.symbols.all())
            if (s.kind == SymbolKind::EdgeProperty && s.isParam) return nm(s.id);
    }
    return std::string("g.") + graphArrayName(a);
}

void SyclEmitter::emitCleanup() {
    for (auto a : collectGraphArrays())
        out_.line("sycl::free(" + cfg_.deviceVarPrefix + graphArrayName(a) + ", q);");
    for (int id : plan_.deviceArrays) out_.line("sycl::free(" + dev(id) + ", q);");
    for (int id : plan_.deviceScalars) out_.line("sycl::free(" + dev(id) + ", q);");
    for (const auto& [stmt, next] : plan_.fpNextName)
        out_.line("sycl::free(" + cfg_.deviceVarPrefix + next + ", q);");
    for (const auto& [stmt, names] : plan_.bfsNames) {
        out_.line("sycl::free(" + cfg_.deviceVarPrefix + names.level + ", q);");
        out_.line("sycl::free(" + cfg_.deviceVarPrefix + names.finished + ", q);");
        out_.line("free(" + names.level + ");");
    }
    std::vector<int> decls;
    collectHostDecls(prog_.entry().body, decls);
    for (int id : decls)
        if (sym(id).kind == SymbolKind::NodeProperty) out_.line("free(" + nm(id) + ");");
}

EmitUnit SyclEmitter::run() {
    const FunctionDecl& fn = prog_.entry();

    bool returns = false;
    TypeKind retKind = TypeKind::Void;
    for (const auto& st : fn.body.stmts)
        if (st->is<ReturnStmt>() && st->as<ReturnStmt>().value) {
            returns = true;
            retKind = st->as<ReturnStmt>().value->type.kind;
        }

    std::string sig = (returns ? ctype(retKind) : std::string("void")) + " " +
                      plan_.functionName + "(sycl::queue& q, const GraphCsr& g";
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

    out_.open(sig + " {");
    out_.line("int V = g.n;");
    out_.line("int E = g.m;");
    out_.line("(void)E;");
    out_.line("const int NUM_THREADS = " + std::to_string(cfg_.numThreads) + ";");
    out_.blank();

    // Device state allocated once up front with malloc_device; the static
    // graph is copied in at function start and never copied back.
    out_.line("// device graph (static)");
    for (auto a : collectGraphArrays()) {
        std::string name = cfg_.deviceVarPrefix + graphArrayName(a);
        std::string size = (a == sema::GraphArray::Offsets || a == sema::GraphArray::RevOffsets)
                               ? "(V + 1)"
                               : "E";
        out_.line("int* " + name + " = sycl::malloc_device<int>(" + size + ", q);");
        out_.line("q.memcpy(" + name + ", " + hostGraphArraySource(a) + ", sizeof(int) * " +
                  size + ").wait();");
        recordTransfer(graphArrayName(a), TransferDir::HostToDevice, true);
    }

    emitHostDecls(fn);

    out_.line("// device state");
    for (int id : plan_.deviceArrays)
        out_.line(elemType(id) + "* " + dev(id) + " = sycl::malloc_device<" + elemType(id) +
                  ">(V, q);");
    for (int id : plan_.deviceScalars)
        out_.line(elemType(id) + "* " + dev(id) + " = sycl::malloc_device<" + elemType(id) +
                  ">(1, q);");
    for (const auto& [stmt, next] : plan_.fpNextName)
        out_.line("bool* " + cfg_.deviceVarPrefix + next + " = sycl::malloc_device<bool>(V, q);");
    for (const auto& [stmt, names] : plan_.bfsNames) {
        out_.line("int* " + names.level + " = (int*)malloc(sizeof(int) * V);");
        out_.line("int* " + cfg_.deviceVarPrefix + names.level +
                  " = sycl::malloc_device<int>(V, q);");
        out_.line("int " + names.hops + " = 0;");
        out_.line("bool " + names.finished + " = false;");
        out_.line("bool* " + cfg_.deviceVarPrefix + names.finished +
                  " = sycl::malloc_device<bool>(1, q);");
    }
    out_.blank();

    hostBlock(fn.body);

    bool tailReturn = !fn.body.stmts.empty() && fn.body.stmts.back()->is<ReturnStmt>();
    if (!tailReturn) emitCleanup();
    out_.close();

    std::string header = "// Generated " + plan_.unitName + " (SYCL backend)\n";
    std::string includes =
        "#include <cstdio>\n#include <cstdlib>\n#include <cstring>\n#include <climits>\n"
        "#include <sycl/sycl.hpp>\n\n";
    std::string prelude = preludeGraphRuntime();
    prelude +=
        "\ntemplate <typename T>\n"
        "using graphdsl_atomic = sycl::atomic_ref<T, sycl::memory_order::relaxed,\n"
        "                                         sycl::memory_scope::device,\n"
        "                                         sycl::access::address_space::global_space>;\n";
    if (plan_.usesIsEdgeHelper) prelude += "\n" + preludeIsEdge("static inline");
    if (plan_.usesEdgeIndexHelper) prelude += "\n" + preludeEdgeIndex("static inline");
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
    prelude += "\n";

    std::string mainText = buildMainDriver(prog_, plan_, "q", false);
    // The SYCL driver needs a queue before the call.
    std::string mainPrefix = "";
    size_t pos = mainText.find("  GraphCsr g");
    if (pos != std::string::npos)
        mainText.insert(pos, "  sycl::queue q{sycl::default_selector_v};\n");

    int bodyOffset = countLines(header) + countLines(includes) + countLines(prelude);
    std::string full = header + includes + prelude + out_.text() + "\n" + mainPrefix + mainText;
    std::string fileName = plan_.unitName + "_sycl.cpp";

    unit_.programName = plan_.unitName;
    unit_.backend = BackendKind::Sycl;
    unit_.files.push_back({fileName, full});
    unit_.lineCounts[fileName] = countLines(full);
    unit_.bodyLineCount = countNonBlank(out_.text());

    for (auto km : kernelMeta_) {
        km.file = fileName;
        km.defLine += bodyOffset;
        for (int& l : km.launchLines) l += bodyOffset;
        unit_.kernels.push_back(km);
    }
    for (const auto& t : transfers_)
        unit_.transfers.push_back({t.symbol, t.dir, fileName, t.line + bodyOffset, t.graphArray});
    for (const auto& l : loops_)
        unit_.loops.push_back(
            {l.flagName, fileName, l.beginLine + bodyOffset, l.endLine + bodyOffset, l.isBfs});
    return std::move(unit_);
}

}  // namespace

EmitUnit generateSycl(const sema::AnnotatedProgram& program, const Analyses& analyses,
                      const CodegenConfig& cfg, const LoweringPlan& plan) {
    return SyclEmitter(program, analyses, cfg, plan).run();
}

}  // namespace graphdsl::codegen
