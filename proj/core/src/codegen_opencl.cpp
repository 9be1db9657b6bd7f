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

// OpenCL lowering: split generation like CUDA, with the kernels in a sibling
// .cl file. bool lowers to int (OpenCL kernel ABI), integer atomics are
// native, float/double atomics are emulated with atom_cmpxchg.
class OclEmitter {
public:
    OclEmitter(const sema::AnnotatedProgram& prog, const Analyses& an, const CodegenConfig& cfg,
               const LoweringPlan& plan)
        : prog_(prog), an_(an), cfg_(cfg), plan_(plan), kernels_(cfg.indent), host_(cfg.indent) {}

    EmitUnit run();

private:
    const sema::AnnotatedProgram& prog_;
    const Analyses& an_;
    const CodegenConfig& cfg_;
    const LoweringPlan& plan_;
    CodeWriter kernels_;  // .cl file body
    CodeWriter host_;     // host function

    EmitUnit unit_;
    std::vector<PendingTransfer> transfers_;
    std::vector<PendingLoop> loops_;
    std::vector<KernelMeta> kernelMeta_;
    const sema::FixedPointInfo* fpActive_ = nullptr;
    std::string fpNextName_;
    bool needAtomicAddDouble_ = false;
    bool needAtomicMinMaxDouble_ = false;
    bool needLongAtomics_ = false;

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

    // Host-side C++ types (bool as int for device-shared data).
    std::string hostType(TypeKind k) const { return cType(k, true); }
    // OpenCL kernel types.
    std::string clType(TypeKind k) const {
        switch (k) {
            case TypeKind::Long: return "long";
            case TypeKind::Float:
            case TypeKind::Double: return "double";
            case TypeKind::Bool: return "int";
            default: return "int";
        }
    }
    TypeKind elemKind(int id) const {
        const Symbol& s = sym(id);
        if (s.kind == SymbolKind::NodeProperty || s.kind == SymbolKind::EdgeProperty)
            return s.type.element;
        if (s.kind == SymbolKind::Node || s.kind == SymbolKind::Edge) return TypeKind::Node;
        return s.type.kind;
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

    friend struct OclHostExpr;
    friend struct OclDeviceExpr;
    std::string hostExpr(const Expr& e, int minPrec = 0);
    std::string deviceExpr(const Expr& e, int minPrec = 0);

    void recordTransfer(const std::string& symbol, TransferDir dir, bool graph) {
        transfers_.push_back({symbol, dir, host_.nextLine() - 1, graph});
    }
    void emitH2D(int id) {
        std::string t = hostType(elemKind(id) == TypeKind::Node ? TypeKind::Int : elemKind(id));
        if (sym(id).kind == SymbolKind::NodeProperty)
            host_.line("clEnqueueWriteBuffer(graphdsl_queue, " + dev(id) + ", CL_TRUE, 0, sizeof(" +
                       t + ") * V, " + nm(id) + ", 0, NULL, NULL);");
        else
            host_.line("clEnqueueWriteBuffer(graphdsl_queue, " + dev(id) + ", CL_TRUE, 0, sizeof(" +
                       t + "), &" + nm(id) + ", 0, NULL, NULL);");
        recordTransfer(nm(id), TransferDir::HostToDevice, false);
    }
    void emitD2H(int id) {
        std::string t = hostType(elemKind(id) == TypeKind::Node ? TypeKind::Int : elemKind(id));
        if (sym(id).kind == SymbolKind::NodeProperty)
            host_.line("clEnqueueReadBuffer(graphdsl_queue, " + dev(id) + ", CL_TRUE, 0, sizeof(" +
                       t + ") * V, " + nm(id) + ", 0, NULL, NULL);");
        else
            host_.line("clEnqueueReadBuffer(graphdsl_queue, " + dev(id) + ", CL_TRUE, 0, sizeof(" +
                       t + "), &" + nm(id) + ", 0, NULL, NULL);");
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
    void launchKernel(const RegionPlan& rp, const std::vector<std::pair<std::string, std::string>>& extraArgs);
    void emitHostDecls(const FunctionDecl& fn);
    void collectHostDecls(const Block& b, std::vector<int>& out) const;
    std::vector<sema::GraphArray> collectGraphArrays() const;
    std::string hostGraphArraySource(sema::GraphArray a) const;
    void emitCleanup();

    void emitKernelHeader(const RegionPlan& rp,
                          const std::vector<std::pair<std::string, std::string>>& extraParams);
    void emitForAllKernel(const RegionPlan& rp, const ForAllStmt& f);
    void emitBfsForwardKernel(const RegionPlan& rp, const IterateBfsStmt& b, const BfsNames& nmm);
    void emitBfsReverseKernel(const RegionPlan& rp, const IterateBfsStmt& b,
                              const IterateRevStmt& rev, const BfsNames& nmm);
    void deviceBlock(const Block& b);
    void deviceStmt(const Stmt& s);
    void deviceAssignProp(int propSym, const std::string& objText, const Expr& value);
    void deviceAttachedAssign(const Expr& target, const Expr& value);
    void deviceReduce(const ReduceAssignStmt& r, SourceSpan span);
    void deviceMinMax(const MinMaxAssignStmt& m, SourceSpan span);
    void deviceForAll(const ForAllStmt& f);
};

struct OclHostExpr : ExprEmitter {
    OclEmitter* e;
    const LoweringPlan& plan;
    OclHostExpr(OclEmitter* em, const sema::AnnotatedProgram& pr, const LoweringPlan& pl)
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
        unsupported(BackendKind::OpenCl, "host method " + m.method, expr.span);
    }
};

struct OclDeviceExpr : ExprEmitter {
    OclEmitter* e;
    const LoweringPlan& plan;
    const CodegenConfig& cfg;
    OclEmitter::KernelCtx* k;
    OclDeviceExpr(OclEmitter* em, const sema::AnnotatedProgram& pr, const LoweringPlan& pl,
                  const CodegenConfig& c, OclEmitter::KernelCtx* ctx)
        : e(em), plan(pl), cfg(c), k(ctx) {
        prog = &pr;
    }
    std::string boolLit(bool v) override { return v ? "1" : "0"; }
    std::string scalarRef(int symbol) override {
        if (k->locals.count(symbol)) return plan.names.at(symbol);
        for (int id : k->rp->writtenScalars)
            if (id == symbol) return cfg.deviceVarPrefix + plan.names.at(symbol) + "[0]";
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
        unsupported(BackendKind::OpenCl, "device method " + m.method, expr.span);
    }
};

std::string OclEmitter::hostExpr(const Expr& e, int minPrec) {
    OclHostExpr he(this, prog_, plan_);
    return he.emit(e, minPrec);
}
std::string OclEmitter::deviceExpr(const Expr& e, int minPrec) {
    OclDeviceExpr de(this, prog_, plan_, cfg_, kctx_);
    return de.emit(e, minPrec);
}

// ---------------------------------------------------------------------------
// Host statements
// ---------------------------------------------------------------------------

void OclEmitter::hostAssign(const Expr& target, const std::string& valueText) {
    if (target.is<VarRef>()) {
        host_.line(nm(target.symbol) + " = " + valueText + ";");
        return;
    }
    if (sym(target.symbol).kind == SymbolKind::EdgeProperty)
        unsupported(BackendKind::OpenCl, "edge property writes", target.span);
    if (isElided(target.symbol)) return;
    host_.line(nm(target.symbol) + "[" + hostExpr(*target.as<PropAccess>().object, 10) +
               "] = " + valueText + ";");
}

void OclEmitter::emitAttach(const CallStmt& c) {
    const auto& m = c.call->as<MethodCall>();
    for (size_t i = 0; i < m.args.size(); ++i) {
        int propSym = m.argSymbols.at(i);
        if (isElided(propSym)) continue;
        host_.open("for (int i = 0; i < V; i++) {");
        host_.line(nm(propSym) + "[i] = " + hostExpr(*m.args[i]) + ";");
        host_.close();
    }
}

void OclEmitter::hostStmt(const Stmt& s) {
    emitPlanned(plan_.before, &s);

    if (s.is<DeclStmt>()) {
        const auto& d = s.as<DeclStmt>();
        const Symbol& ds = sym(d.symbol);
        if (ds.kind != SymbolKind::NodeProperty && ds.kind != SymbolKind::EdgeProperty && d.init)
            host_.line(nm(d.symbol) + " = " + hostExpr(*d.init) + ";");
    } else if (s.is<AssignStmt>()) {
        hostAssign(*s.as<AssignStmt>().target, hostExpr(*s.as<AssignStmt>().value));
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
        host_.line(hostType(m.compareCandidate->type.kind) + " cand = " +
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
// Regions
// ---------------------------------------------------------------------------

void OclEmitter::launchKernel(const RegionPlan& rp,
                              const std::vector<std::pair<std::string, std::string>>& extraArgs) {
    // clSetKernelArg sequence mirrors the kernel header parameter order.
    std::string kobj = rp.kernelName + "_kobj";
    int argIndex = 0;
    auto setArg = [&](const std::string& sizeExpr, const std::string& ref) {
        host_.line("clSetKernelArg(" + kobj + ", " + std::to_string(argIndex++) + ", " +
                   sizeExpr + ", " + ref + ");");
    };
    setArg("sizeof(int)", "&V");
    for (auto a : rp.info->graphArrays)
        setArg("sizeof(cl_mem)", "&" + cfg_.deviceVarPrefix + graphArrayName(a));
    for (int id : rp.scalarParams) {
        TypeKind k = elemKind(id);
        setArg("sizeof(" + hostType(k == TypeKind::Node ? TypeKind::Int : k) + ")", "&" + nm(id));
    }
    for (int id : rp.arrayParams) {
        setArg("sizeof(cl_mem)", "&" + dev(id));
        if (auto next = fpNextFor(id)) setArg("sizeof(cl_mem)", "&" + *next);
    }
    for (int id : rp.writtenScalars) setArg("sizeof(cl_mem)", "&" + dev(id));
    for (const auto& [sizeExpr, ref] : extraArgs) setArg(sizeExpr, ref);

    int line = host_.nextLine();
    host_.line("clEnqueueNDRangeKernel(graphdsl_queue, " + kobj +
               ", 1, NULL, &graphdsl_global, NULL, 0, NULL, &graphdsl_event);");
    host_.line("clWaitForEvents(1, &graphdsl_event);");
    host_.line("clReleaseEvent(graphdsl_event);");
    for (auto& km : kernelMeta_)
        if (km.name == rp.kernelName) km.launchLines.push_back(line);
}

void OclEmitter::emitForAllRegion(const Stmt& s) {
    const auto& f = s.as<ForAllStmt>();
    if (f.domain.kind != IterDomainKind::Nodes)
        unsupported(BackendKind::OpenCl, "parallel regions over neighbor domains", s.span);
    const RegionPlan& rp = regionPlan(f.regionId);
    emitForAllKernel(rp, f);
    launchKernel(rp, {});
}

void OclEmitter::emitFixedPoint(const Stmt& s) {
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
    host_.line(flag + " = 1;");
    emitH2D(f.flagSymbol);
    if (buffered) {
        host_.line("graphdsl_fill_value = " + std::string(info->convergedWhenAllFalse ? "0" : "1") +
                   ";");
        host_.line("clEnqueueFillBuffer(graphdsl_queue, " + nextDev +
                   ", &graphdsl_fill_value, sizeof(int), 0, sizeof(int) * V, 0, NULL, NULL);");
    }

    fpActive_ = info;
    fpNextName_ = buffered ? plan_.fpNextName.at(&s) : "";
    hostBlock(f.body);
    fpActive_ = nullptr;

    emitD2H(f.flagSymbol);
    if (buffered) {
        host_.line("cl_mem graphdsl_swap = " + propDev + ";");
        host_.line(propDev + " = " + nextDev + ";");
        host_.line(nextDev + " = graphdsl_swap;");
    }
    host_.close();
    loops_.push_back({flag, begin, host_.nextLine() - 1, false});
}

void OclEmitter::emitBfs(const Stmt& s) {
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
    host_.line("clEnqueueWriteBuffer(graphdsl_queue, " + levelDev + ", CL_TRUE, 0, sizeof(int) * V, " +
               names.level + ", 0, NULL, NULL);");
    host_.line(names.hops + " = 0;");
    int begin = host_.nextLine();
    host_.open("do {");
    host_.line(names.finished + " = 1;");
    host_.line("clEnqueueWriteBuffer(graphdsl_queue, " + finDev + ", CL_TRUE, 0, sizeof(int), &" +
               names.finished + ", 0, NULL, NULL);");
    transfers_.push_back({names.finished, TransferDir::HostToDevice, host_.nextLine() - 1, false});
    launchKernel(fwd, {{"sizeof(cl_mem)", "&" + levelDev},
                       {"sizeof(int)", "&" + names.hops},
                       {"sizeof(cl_mem)", "&" + finDev}});
    host_.line("clEnqueueReadBuffer(graphdsl_queue, " + finDev + ", CL_TRUE, 0, sizeof(int), &" +
               names.finished + ", 0, NULL, NULL);");
    transfers_.push_back({names.finished, TransferDir::DeviceToHost, host_.nextLine() - 1, false});
    host_.line(names.hops + " = " + names.hops + " + 1;");
    host_.close("} while (!" + names.finished + ");");
    loops_.push_back({names.finished, begin, host_.nextLine() - 1, true});

    host_.line(names.hops + " = " + names.hops + " - 1;");
    for (auto& [rp, rev] : reverses) {
        host_.open("while (" + names.hops + " >= 0) {");
        launchKernel(*rp, {{"sizeof(cl_mem)", "&" + levelDev}, {"sizeof(int)", "&" + names.hops}});
        host_.line(names.hops + " = " + names.hops + " - 1;");
        host_.close();
    }
}

// ---------------------------------------------------------------------------
// Kernels (.cl)
// ---------------------------------------------------------------------------

void OclEmitter::emitKernelHeader(
    const RegionPlan& rp, const std::vector<std::pair<std::string, std::string>>& extraParams) {
    std::string params = "int V";
    std::vector<std::string> names{"V"};
    for (auto a : rp.info->graphArrays) {
        params += ", __global const int* " + cfg_.deviceVarPrefix + graphArrayName(a);
        names.push_back(cfg_.deviceVarPrefix + graphArrayName(a));
    }
    for (int id : rp.scalarParams) {
        params += ", " + clType(elemKind(id) == TypeKind::Node ? TypeKind::Int : elemKind(id)) +
                  " " + nm(id);
        names.push_back(nm(id));
    }
    for (int id : rp.arrayParams) {
        params += ", __global " + clType(elemKind(id)) + "* " + dev(id);
        names.push_back(dev(id));
        if (auto next = fpNextFor(id)) {
            params += ", __global int* " + *next;
            names.push_back(*next);
        }
    }
    for (int id : rp.writtenScalars) {
        params += ", __global " + clType(elemKind(id)) + "* " + dev(id);
        names.push_back(dev(id));
    }
    for (const auto& [decl, name] : extraParams) {
        params += ", " + decl;
        names.push_back(name);
    }
    KernelMeta meta;
    meta.name = rp.kernelName;
    meta.params = names;
    meta.regionId = rp.info->id;
    meta.defLine = kernels_.nextLine();
    kernelMeta_.push_back(meta);
    kernels_.open("__kernel void " + rp.kernelName + "(" + params + ") {");
}

void OclEmitter::emitForAllKernel(const RegionPlan& rp, const ForAllStmt& f) {
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
    kernels_.open("for (int " + var + " = get_global_id(0); " + var + " < V; " + var +
                  " += get_global_size(0)) {");
    if (f.filter) {
        kernels_.open("if (" + deviceExpr(*f.filter) + ") {");
        deviceBlock(f.body);
        kernels_.close();
    } else {
        deviceBlock(f.body);
    }
    kernels_.close();
    kernels_.close();
    kernels_.blank();
    kctx_ = nullptr;
}

void OclEmitter::emitBfsForwardKernel(const RegionPlan& rp, const IterateBfsStmt& b,
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
    emitKernelHeader(rp, {{"__global int* " + ctx.levelDev, ctx.levelDev},
                          {"int " + nmm.hops, nmm.hops},
                          {"__global int* " + cfg_.deviceVarPrefix + nmm.finished,
                           cfg_.deviceVarPrefix + nmm.finished}});
    std::string var = nm(b.varSymbol);
    kernels_.open("for (int " + var + " = get_global_id(0); " + var + " < V; " + var +
                  " += get_global_size(0)) {");
    kernels_.line("if (" + ctx.levelDev + "[" + var + "] != " + nmm.hops + ") continue;");
    kernels_.open("for (int bfs_edge = " + cfg_.deviceVarPrefix + "offsets[" + var +
                  "]; bfs_edge < " + cfg_.deviceVarPrefix + "offsets[" + var +
                  " + 1]; bfs_edge++) {");
    kernels_.line("int bfs_nbr = " + cfg_.deviceVarPrefix + "dests[bfs_edge];");
    kernels_.open("if (" + ctx.levelDev + "[bfs_nbr] == -1) {");
    kernels_.line(ctx.levelDev + "[bfs_nbr] = " + nmm.hops + " + 1;");
    kernels_.line(cfg_.deviceVarPrefix + nmm.finished + "[0] = 0;");
    kernels_.close();
    kernels_.close();
    for (const auto& inner : b.body.stmts)
        if (!inner->is<IterateRevStmt>()) deviceStmt(*inner);
    kernels_.close();
    kernels_.close();
    kernels_.blank();
    kctx_ = nullptr;
}

void OclEmitter::emitBfsReverseKernel(const RegionPlan& rp, const IterateBfsStmt& b,
                                      const IterateRevStmt& rev, const BfsNames& nmm) {
    KernelCtx ctx;
    ctx.rp = &rp;
    ctx.locals.insert(b.varSymbol);
    ctx.bfsVar = b.varSymbol;
    ctx.levelDev = cfg_.deviceVarPrefix + nmm.level;
    ctx.hopsParam = nmm.hops;
    kctx_ = &ctx;
    emitKernelHeader(rp, {{"__global int* " + ctx.levelDev, ctx.levelDev},
                          {"int " + nmm.hops, nmm.hops}});
    std::string var = nm(b.varSymbol);
    kernels_.open("for (int " + var + " = get_global_id(0); " + var + " < V; " + var +
                  " += get_global_size(0)) {");
    kernels_.line("if (" + ctx.levelDev + "[" + var + "] != " + nmm.hops + ") continue;");
    if (rev.filter) {
        kernels_.open("if (" + deviceExpr(*rev.filter) + ") {");
        deviceBlock(rev.body);
        kernels_.close();
    } else {
        deviceBlock(rev.body);
    }
    kernels_.close();
    kernels_.close();
    kernels_.blank();
    kctx_ = nullptr;
}

// ---------------------------------------------------------------------------
// Device statements
// ---------------------------------------------------------------------------

void OclEmitter::deviceBlock(const Block& b) {
    for (const auto& s : b.stmts) deviceStmt(*s);
}

void OclEmitter::deviceAssignProp(int propSym, const std::string& objText, const Expr& value) {
    KernelCtx& k = *kctx_;
    std::string valueText = deviceExpr(value);
    if (propSym == k.fpProp) {
        bool isLit = value.is<BoolLit>();
        bool litVal = isLit && value.as<BoolLit>().value;
        if (!k.fpFlagOnly) kernels_.line(k.fpNextDev + "[" + objText + "] = " + valueText + ";");
        if (isLit) {
            if (litVal != k.fpConvergedValue) kernels_.line(k.fpFlagDev + "[0] = 0;");
        } else {
            kernels_.open("if (" + valueText + (k.fpConvergedValue ? " == 0) {" : " == 1) {"));
            kernels_.line(k.fpFlagDev + "[0] = 0;");
            kernels_.close();
        }
        return;
    }
    kernels_.line(dev(propSym) + "[" + objText + "] = " + valueText + ";");
}

void OclEmitter::deviceAttachedAssign(const Expr& target, const Expr& value) {
    KernelCtx& k = *kctx_;
    if (target.is<VarRef>()) {
        if (k.locals.count(target.symbol))
            kernels_.line(nm(target.symbol) + " = " + deviceExpr(value) + ";");
        else
            kernels_.line(dev(target.symbol) + "[0] = " + deviceExpr(value) + ";");
        return;
    }
    deviceAssignProp(target.symbol, deviceExpr(*target.as<PropAccess>().object, 10), value);
}

void OclEmitter::deviceStmt(const Stmt& s) {
    KernelCtx& k = *kctx_;
    if (s.is<DeclStmt>()) {
        const auto& d = s.as<DeclStmt>();
        k.locals.insert(d.symbol);
        std::string init = "0";
        if (d.init) init = deviceExpr(*d.init);
        kernels_.line(clType(elemKind(d.symbol)) + " " + nm(d.symbol) + " = " + init + ";");
        return;
    }
    if (s.is<AssignStmt>()) {
        const auto& a = s.as<AssignStmt>();
        if (a.target->is<VarRef>()) {
            int t = a.target->symbol;
            if (k.locals.count(t))
                kernels_.line(nm(t) + " = " + deviceExpr(*a.value) + ";");
            else
                kernels_.line(dev(t) + "[0] = " + deviceExpr(*a.value) + ";");
        } else {
            if (sym(a.target->symbol).kind == SymbolKind::EdgeProperty)
                unsupported(BackendKind::OpenCl, "edge property writes", s.span);
            deviceAssignProp(a.target->symbol,
                             deviceExpr(*a.target->as<PropAccess>().object, 10), *a.value);
        }
        return;
    }
    if (s.is<ReduceAssignStmt>()) return deviceReduce(s.as<ReduceAssignStmt>(), s.span);
    if (s.is<MinMaxAssignStmt>()) return deviceMinMax(s.as<MinMaxAssignStmt>(), s.span);
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
        unsupported(BackendKind::OpenCl, "attachNodeProperty inside kernels", s.span);
    unsupported(BackendKind::OpenCl, "host constructs inside kernels", s.span);
}

void OclEmitter::deviceForAll(const ForAllStmt& f) {
    KernelCtx& k = *kctx_;
    std::string var = nm(f.varSymbol);
    k.locals.insert(f.varSymbol);
    std::string edgeVar = k.loopDepth == 0 ? "edge" : "edge_" + std::to_string(k.loopDepth);
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
            unsupported(BackendKind::OpenCl, "node-set iteration inside kernels", SourceSpan{});
    }
    ++k.loopDepth;
    if (f.filter) kernels_.line("if (!(" + deviceExpr(*f.filter) + ")) continue;");
    deviceBlock(f.body);
    --k.loopDepth;
    if (pushedEdgeLoop) k.edgeLoops.pop_back();
    kernels_.close();
}

void OclEmitter::deviceReduce(const ReduceAssignStmt& r, SourceSpan span) {
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
    TypeKind elem = elemKind(targetSym);

    std::string ref;
    std::string cellText;
    if (r.target->is<PropAccess>()) {
        std::string obj = deviceExpr(*r.target->as<PropAccess>().object, 10);
        if (targetSym == k.fpProp) {
            if (r.op == ReduceOp::Any) {
                kernels_.open("if (" + value + ") {");
                if (!k.fpFlagOnly) kernels_.line(k.fpNextDev + "[" + obj + "] = 1;");
                if (!k.fpConvergedValue) kernels_.line(k.fpFlagDev + "[0] = 0;");
                kernels_.close();
            } else if (r.op == ReduceOp::All) {
                kernels_.open("if (!(" + value + ")) {");
                if (!k.fpFlagOnly) kernels_.line(k.fpNextDev + "[" + obj + "] = 0;");
                if (k.fpConvergedValue) kernels_.line(k.fpFlagDev + "[0] = 0;");
                kernels_.close();
            } else {
                unsupported(BackendKind::OpenCl, "numeric reduction on a convergence property",
                            span);
            }
            return;
        }
        ref = "&" + dev(targetSym) + "[" + obj + "]";
        cellText = dev(targetSym) + "[" + obj + "]";
    } else {
        ref = "&" + dev(targetSym) + "[0]";
        cellText = dev(targetSym) + "[0]";
    }

    switch (r.op) {
        case ReduceOp::Sum:
        case ReduceOp::Count: {
            std::string v = r.op == ReduceOp::Count ? "1" : value;
            if (isFloatElem(elem)) {
                needAtomicAddDouble_ = true;
                kernels_.line("graphdsl_atomic_add_double(" + ref + ", (double)(" + v + "));");
            } else if (elem == TypeKind::Long) {
                needLongAtomics_ = true;
                kernels_.line("atom_add((volatile __global long*)(" + ref + "), (long)(" + v +
                              "));");
            } else {
                kernels_.line("atomic_add((volatile __global int*)(" + ref + "), (int)(" + v +
                              "));");
            }
            break;
        }
        case ReduceOp::Product:
            unsupported(BackendKind::OpenCl, "product reductions", span);
        case ReduceOp::All:
            kernels_.open("if (!(" + value + ")) {");
            kernels_.line(cellText + " = 0;");
            kernels_.close();
            break;
        case ReduceOp::Any:
            kernels_.open("if (" + value + ") {");
            kernels_.line(cellText + " = 1;");
            kernels_.close();
            break;
    }
}

void OclEmitter::deviceMinMax(const MinMaxAssignStmt& m, SourceSpan span) {
    KernelCtx& k = *kctx_;
    const Expr& t0 = *m.targets[0];
    TypeKind elem = elemKind(t0.symbol);

    if (t0.is<VarRef>() && k.locals.count(t0.symbol)) {
        std::string t = nm(t0.symbol);
        kernels_.open("{");
        kernels_.line(clType(elem) + " cand = " + deviceExpr(*m.compareCandidate) + ";");
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
        curRef = "&" + dev(t0.symbol) + "[0]";
        curExpr = dev(t0.symbol) + "[0]";
    } else {
        std::string obj = deviceExpr(*t0.as<PropAccess>().object, 10);
        curRef = "&" + dev(t0.symbol) + "[" + obj + "]";
        curExpr = dev(t0.symbol) + "[" + obj + "]";
    }

    kernels_.open("{");
    kernels_.line(clType(elem) + " cand = " + deviceExpr(*m.compareCandidate) + ";");
    kernels_.open("if (" + curExpr + (m.isMin ? " > cand) {" : " < cand) {"));
    if (isFloatElem(elem)) {
        needAtomicMinMaxDouble_ = true;
        kernels_.line(std::string("graphdsl_atomic_") + (m.isMin ? "min" : "max") + "_double(" +
                      curRef + ", cand);");
    } else if (elem == TypeKind::Long) {
        needLongAtomics_ = true;
        kernels_.line(std::string(m.isMin ? "atom_min" : "atom_max") +
                      "((volatile __global long*)(" + curRef + "), cand);");
    } else {
        kernels_.line(std::string(m.isMin ? "atomic_min" : "atomic_max") +
                      "((volatile __global int*)(" + curRef + "), cand);");
    }
    for (size_t i = 0; i < m.attachedValues.size(); ++i)
        deviceAttachedAssign(*m.targets[i + 1], *m.attachedValues[i]);
    kernels_.close();
    kernels_.close();
    (void)span;
}

// ---------------------------------------------------------------------------
// Declarations, cleanup, assembly
// ---------------------------------------------------------------------------

void OclEmitter::collectHostDecls(const Block& b, std::vector<int>& out) const {
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

void OclEmitter::emitHostDecls(const FunctionDecl& fn) {
    std::vector<int> decls;
    collectHostDecls(fn.body, decls);
    if (decls.empty()) return;
    host_.line("// host state");
    for (int id : decls) {
        const Symbol& s = sym(id);
        if (s.kind == SymbolKind::NodeProperty) {
            std::string t = hostType(s.type.element);
            host_.line(t + "* " + nm(id) + " = (" + t + "*)calloc(V, sizeof(" + t + "));");
        } else {
            host_.line(hostType(elemKind(id) == TypeKind::Node ? TypeKind::Int : elemKind(id)) +
                       " " + nm(id) + " = 0;");
        }
    }
}

std::vector<sema::GraphArray> OclEmitter::collectGraphArrays() const {
    std::set<sema::GraphArray> set;
    for (const auto& rp : plan_.regions)
        set.insert(rp.info->graphArrays.begin(), rp.info->graphArrays.end());
    return {set.begin(), set.end()};
}

std::string OclEmitter::hostGraphArraySource(sema::GraphArray a) const {
    if (a == sema::GraphArray::Weights) {
        for (const auto& s : prog_.symbols.all())
            if (s.kind == SymbolKind::EdgeProperty && s.isParam) return nm(s.id);
    }
    return std::string("g.") + graphArrayName(a);
}

void OclEmitter::emitCleanup() {
    for (auto a : collectGraphArrays())
        host_.line("clReleaseMemObject(" + cfg_.deviceVarPrefix + graphArrayName(a) + ");");
    for (int id : plan_.deviceArrays) host_.line("clReleaseMemObject(" + dev(id) + ");");
    for (int id : plan_.deviceScalars) host_.line("clReleaseMemObject(" + dev(id) + ");");
    for (const auto& [stmt, next] : plan_.fpNextName)
        host_.line("clReleaseMemObject(" + cfg_.deviceVarPrefix + next + ");");
    for (const auto& [stmt, names] : plan_.bfsNames) {
        host_.line("clReleaseMemObject(" + cfg_.deviceVarPrefix + names.level + ");");
        host_.line("clReleaseMemObject(" + cfg_.deviceVarPrefix + names.finished + ");");
        host_.line("free(" + names.level + ");");
    }
    std::vector<int> decls;
    collectHostDecls(prog_.entry().body, decls);
    for (int id : decls)
        if (sym(id).kind == SymbolKind::NodeProperty) host_.line("free(" + nm(id) + ");");
    for (const auto& rp : plan_.regions)
        host_.line("clReleaseKernel(" + rp.kernelName + "_kobj);");
}

EmitUnit OclEmitter::run() {
    const FunctionDecl& fn = prog_.entry();

    bool returns = false;
    TypeKind retKind = TypeKind::Void;
    for (const auto& st : fn.body.stmts)
        if (st->is<ReturnStmt>() && st->as<ReturnStmt>().value) {
            returns = true;
            retKind = st->as<ReturnStmt>().value->type.kind;
        }

    std::string sig = (returns ? hostType(retKind) : std::string("void")) + " " +
                      plan_.functionName + "(const GraphCsr& g";
    for (const auto& p : fn.params) {
        const Symbol& s = sym(p.symbol);
        switch (s.kind) {
            case SymbolKind::Graph: break;
            case SymbolKind::NodeProperty:
                sig += ", " + hostType(s.type.element) + "* " + nm(p.symbol);
                break;
            case SymbolKind::EdgeProperty: sig += ", const int* " + nm(p.symbol); break;
            case SymbolKind::NodeSet:
                sig += ", const int* " + nm(p.symbol) + ", int " + nm(p.symbol) + "_count";
                break;
            default:
                sig += ", " +
                       hostType(elemKind(p.symbol) == TypeKind::Node ? TypeKind::Int
                                                                     : elemKind(p.symbol)) +
                       " " + nm(p.symbol);
                break;
        }
    }
    sig += ")";

    host_.open(sig + " {");
    host_.line("int V = g.n;");
    host_.line("int E = g.m;");
    host_.line("(void)E;");
    host_.line("graphdsl_cl_init(GRAPHDSL_KERNEL_SOURCE);");
    host_.line("size_t graphdsl_global = " + std::to_string(cfg_.numThreads) + ";");
    host_.line("cl_event graphdsl_event;");
    host_.line("int graphdsl_fill_value = 0;");
    host_.line("(void)graphdsl_fill_value;");
    host_.line("cl_int graphdsl_err = CL_SUCCESS;");
    host_.line("(void)graphdsl_err;");
    host_.blank();

    for (const auto& rp : plan_.regions)
        host_.line("cl_kernel " + rp.kernelName + "_kobj = clCreateKernel(graphdsl_program, \"" +
                   rp.kernelName + "\", &graphdsl_err);");
    host_.blank();

    host_.line("// device graph (static: written once, never read back)");
    for (auto a : collectGraphArrays()) {
        std::string name = cfg_.deviceVarPrefix + graphArrayName(a);
        std::string size = (a == sema::GraphArray::Offsets || a == sema::GraphArray::RevOffsets)
                               ? "(V + 1)"
                               : "E";
        host_.line("cl_mem " + name +
                   " = clCreateBuffer(graphdsl_context, CL_MEM_READ_ONLY, sizeof(int) * " + size +
                   ", NULL, &graphdsl_err);");
        host_.line("clEnqueueWriteBuffer(graphdsl_queue, " + name + ", CL_TRUE, 0, sizeof(int) * " +
                   size + ", " + hostGraphArraySource(a) + ", 0, NULL, NULL);");
        recordTransfer(graphArrayName(a), TransferDir::HostToDevice, true);
    }

    emitHostDecls(fn);

    host_.line("// device state");
    for (int id : plan_.deviceArrays)
        host_.line("cl_mem " + dev(id) +
                   " = clCreateBuffer(graphdsl_context, CL_MEM_READ_WRITE, sizeof(" +
                   hostType(elemKind(id)) + ") * V, NULL, &graphdsl_err);");
    for (int id : plan_.deviceScalars)
        host_.line("cl_mem " + dev(id) +
                   " = clCreateBuffer(graphdsl_context, CL_MEM_READ_WRITE, sizeof(" +
                   hostType(elemKind(id)) + "), NULL, &graphdsl_err);");
    for (const auto& [stmt, next] : plan_.fpNextName)
        host_.line("cl_mem " + cfg_.deviceVarPrefix + next +
                   " = clCreateBuffer(graphdsl_context, CL_MEM_READ_WRITE, sizeof(int) * V, NULL, "
                   "&graphdsl_err);");
    for (const auto& [stmt, names] : plan_.bfsNames) {
        host_.line("int* " + names.level + " = (int*)malloc(sizeof(int) * V);");
        host_.line("cl_mem " + cfg_.deviceVarPrefix + names.level +
                   " = clCreateBuffer(graphdsl_context, CL_MEM_READ_WRITE, sizeof(int) * V, NULL, "
                   "&graphdsl_err);");
        host_.line("int " + names.hops + " = 0;");
        host_.line("int " + names.finished + " = 0;");
        host_.line("cl_mem " + cfg_.deviceVarPrefix + names.finished +
                   " = clCreateBuffer(graphdsl_context, CL_MEM_READ_WRITE, sizeof(int), NULL, "
                   "&graphdsl_err);");
    }
    host_.blank();

    hostBlock(fn.body);

    bool tailReturn = !fn.body.stmts.empty() && fn.body.stmts.back()->is<ReturnStmt>();
    if (!tailReturn) emitCleanup();
    host_.close();

    // ---- .cl file assembly ----
    std::string clHeader = "// Generated " + plan_.unitName + " (OpenCL kernels)\n";
    std::string clPrelude;
    clPrelude += "#pragma OPENCL EXTENSION cl_khr_fp64 : enable\n";
    if (needLongAtomics_ || needAtomicAddDouble_ || needAtomicMinMaxDouble_)
        clPrelude += "#pragma OPENCL EXTENSION cl_khr_int64_base_atomics : enable\n";
    clPrelude += "\n";
    if (plan_.usesIsEdgeHelper)
        clPrelude +=
            "static inline int graphdsl_is_edge(__global const int* offsets, __global const int* "
            "dests, int u, int v) {\n"
            "  int lo = offsets[u];\n"
            "  int hi = offsets[u + 1] - 1;\n"
            "  while (lo <= hi) {\n"
            "    int mid = lo + (hi - lo) / 2;\n"
            "    if (dests[mid] == v) return 1;\n"
            "    if (dests[mid] < v) lo = mid + 1; else hi = mid - 1;\n"
            "  }\n"
            "  return 0;\n}\n\n";
    if (plan_.usesEdgeIndexHelper)
        clPrelude +=
            "static inline int graphdsl_edge_index(__global const int* offsets, __global const "
            "int* dests, int u, int v) {\n"
            "  int lo = offsets[u];\n"
            "  int hi = offsets[u + 1] - 1;\n"
            "  while (lo <= hi) {\n"
            "    int mid = lo + (hi - lo) / 2;\n"
            "    if (dests[mid] == v) return mid;\n"
            "    if (dests[mid] < v) lo = mid + 1; else hi = mid - 1;\n"
            "  }\n"
            "  return -1;\n}\n\n";
    if (needAtomicAddDouble_)
        clPrelude +=
            "// Doubles lack native atomics; emulate with atom_cmpxchg.\n"
            "static inline void graphdsl_atomic_add_double(volatile __global double* addr, double "
            "value) {\n"
            "  union { ulong u; double d; } oldv, newv;\n"
            "  do {\n"
            "    oldv.d = *addr;\n"
            "    newv.d = oldv.d + value;\n"
            "  } while (atom_cmpxchg((volatile __global ulong*)addr, oldv.u, newv.u) != oldv.u);\n"
            "}\n\n";
    if (needAtomicMinMaxDouble_)
        clPrelude +=
            "static inline void graphdsl_atomic_min_double(volatile __global double* addr, double "
            "value) {\n"
            "  union { ulong u; double d; } oldv, newv;\n"
            "  do {\n"
            "    oldv.d = *addr;\n"
            "    if (oldv.d <= value) return;\n"
            "    newv.d = value;\n"
            "  } while (atom_cmpxchg((volatile __global ulong*)addr, oldv.u, newv.u) != oldv.u);\n"
            "}\n\n"
            "static inline void graphdsl_atomic_max_double(volatile __global double* addr, double "
            "value) {\n"
            "  union { ulong u; double d; } oldv, newv;\n"
            "  do {\n"
            "    oldv.d = *addr;\n"
            "    if (oldv.d >= value) return;\n"
            "    newv.d = value;\n"
            "  } while (atom_cmpxchg((volatile __global ulong*)addr, oldv.u, newv.u) != oldv.u);\n"
            "}\n\n";

    std::string clFileName = plan_.unitName + "_opencl.cl";
    std::string clFull = clHeader + clPrelude + kernels_.text();
    int clOffset = countLines(clHeader) + countLines(clPrelude);

    // ---- host file assembly ----
    std::string header = "// Generated " + plan_.unitName + " (OpenCL host)\n";
    std::string includes =
        "#include <cstdio>\n#include <cstdlib>\n#include <cstring>\n#include <climits>\n"
        "#define CL_TARGET_OPENCL_VERSION 120\n#include <CL/cl.h>\n\n"
        "#ifndef GRAPHDSL_KERNEL_SOURCE\n#define GRAPHDSL_KERNEL_SOURCE \"" +
        clFileName + "\"\n#endif\n\n";
    std::string prelude = preludeGraphRuntime();
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
    prelude +=
        "\nstatic cl_context graphdsl_context;\n"
        "static cl_command_queue graphdsl_queue;\n"
        "static cl_program graphdsl_program;\n"
        "\nstatic char* graphdsl_load_text(const char* path) {\n"
        "  FILE* f = fopen(path, \"rb\");\n"
        "  if (!f) {\n"
        "    fprintf(stderr, \"cannot open kernel source: %s\\n\", path);\n"
        "    exit(1);\n"
        "  }\n"
        "  fseek(f, 0, SEEK_END);\n"
        "  long size = ftell(f);\n"
        "  fseek(f, 0, SEEK_SET);\n"
        "  char* text = (char*)malloc(size + 1);\n"
        "  size_t got = fread(text, 1, size, f);\n"
        "  text[got] = '\\0';\n"
        "  fclose(f);\n"
        "  return text;\n"
        "}\n"
        "\nstatic void graphdsl_cl_init(const char* kernel_path) {\n"
        "  cl_platform_id platform;\n"
        "  cl_device_id device;\n"
        "  cl_int err;\n"
        "  clGetPlatformIDs(1, &platform, NULL);\n"
        "  err = clGetDeviceIDs(platform, CL_DEVICE_TYPE_GPU, 1, &device, NULL);\n"
        "  if (err != CL_SUCCESS)\n"
        "    clGetDeviceIDs(platform, CL_DEVICE_TYPE_DEFAULT, 1, &device, NULL);\n"
        "  graphdsl_context = clCreateContext(NULL, 1, &device, NULL, NULL, &err);\n"
        "  graphdsl_queue = clCreateCommandQueue(graphdsl_context, device, 0, &err);\n"
        "  char* source = graphdsl_load_text(kernel_path);\n"
        "  graphdsl_program = clCreateProgramWithSource(graphdsl_context, 1, (const char**)&source, "
        "NULL, &err);\n"
        "  err = clBuildProgram(graphdsl_program, 1, &device, \"\", NULL, NULL);\n"
        "  if (err != CL_SUCCESS) {\n"
        "    char log[16384];\n"
        "    clGetProgramBuildInfo(graphdsl_program, device, CL_PROGRAM_BUILD_LOG, sizeof(log), "
        "log, NULL);\n"
        "    fprintf(stderr, \"kernel build failed:\\n%s\\n\", log);\n"
        "    exit(1);\n"
        "  }\n"
        "  free(source);\n"
        "}\n\n";

    std::string mainText = buildMainDriver(prog_, plan_, "", true);
    int hostOffset = countLines(header) + countLines(includes) + countLines(prelude);
    std::string hostFull = header + includes + prelude + host_.text() + "\n" + mainText;
    std::string hostFileName = plan_.unitName + "_opencl.cpp";

    unit_.programName = plan_.unitName;
    unit_.backend = BackendKind::OpenCl;
    unit_.files.push_back({hostFileName, hostFull});
    unit_.files.push_back({clFileName, clFull});
    unit_.lineCounts[hostFileName] = countLines(hostFull);
    unit_.lineCounts[clFileName] = countLines(clFull);
    unit_.bodyLineCount = countNonBlank(kernels_.text()) + countNonBlank(host_.text());

    for (auto km : kernelMeta_) {
        km.file = clFileName;
        km.defLine += clOffset;
        for (int& l : km.launchLines) l += hostOffset;
        unit_.kernels.push_back(km);
    }
    for (const auto& t : transfers_)
        unit_.transfers.push_back(
            {t.symbol, t.dir, hostFileName, t.line + hostOffset, t.graphArray});
    for (const auto& l : loops_)
        unit_.loops.push_back(
            {l.flagName, hostFileName, l.beginLine + hostOffset, l.endLine + hostOffset, l.isBfs});
    return std::move(unit_);
}

}  // namespace

EmitUnit generateOpenCl(const sema::AnnotatedProgram& program, const Analyses& analyses,
                        const CodegenConfig& cfg, const LoweringPlan& plan) {
    return OclEmitter(program, analyses, cfg, plan).run();
}

}  // namespace graphdsl::codegen
