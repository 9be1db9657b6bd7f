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

// OpenACC lowering: one source file; the static graph is promoted to a
// function-level `data copyin` region; per-anchor structured data regions
// realize the hoisted transfers; loops carry `parallel loop` pragmas with
// reduction clauses; Min/Max uses the guarded `acc atomic write` idiom.
class AccEmitter {
public:
    AccEmitter(const sema::AnnotatedProgram& prog, const Analyses& an, const CodegenConfig& cfg,
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

    struct LoopCtx {
        const RegionPlan* rp = nullptr;
        std::set<int> locals;
        int fpProp = -1;
        std::string fpNext;
        std::string fpFlag;
        bool fpFlagOnly = false;
        bool fpConvergedValue = false;
        int bfsVar = -1;
        std::string levelName;
        std::string hopsName;
        std::vector<std::tuple<int, int, std::string>> edgeLoops;
        int loopDepth = 0;
    };
    LoopCtx* lctx_ = nullptr;

    const std::string& nm(int s) const { return plan_.names.at(s); }
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
    const RegionPlan& regionPlan(int regionId) const {
        for (const auto& rp : plan_.regions)
            if (rp.info->id == regionId) return rp;
        throw std::logic_error("no plan for region " + std::to_string(regionId));
    }

    friend struct AccExpr;
    std::string expr(const Expr& e, int minPrec = 0);

    // ---- data regions ----

    struct AnchorClauses {
        std::vector<int> copy, copyin, copyout;
    };

    AnchorClauses anchorClauses(const Stmt* s) const {
        AnchorClauses c;
        std::set<int> in, outSet;
        auto bit = plan_.before.find(s);
        if (bit != plan_.before.end())
            for (const auto& x : bit->second) in.insert(x.symbol);
        auto ait = plan_.after.find(s);
        if (ait != plan_.after.end())
            for (const auto& x : ait->second) outSet.insert(x.symbol);
        for (int id : in) (outSet.count(id) ? c.copy : c.copyin).push_back(id);
        for (int id : outSet)
            if (!in.count(id)) c.copyout.push_back(id);
        auto byName = [&](int a, int b) { return nm(a) < nm(b); };
        std::sort(c.copy.begin(), c.copy.end(), byName);
        std::sort(c.copyin.begin(), c.copyin.end(), byName);
        std::sort(c.copyout.begin(), c.copyout.end(), byName);
        return c;
    }

    std::string clauseRef(int id) const {
        if (sym(id).kind == SymbolKind::NodeProperty) return nm(id) + "[0:V]";
        return nm(id);
    }

    // Opens a structured data region for the anchored symbols; returns true
    // when a region was opened (and must be closed after the statement).
    bool openAnchorRegion(const Stmt* s) {
        AnchorClauses c = anchorClauses(s);
        if (c.copy.empty() && c.copyin.empty() && c.copyout.empty()) return false;
        std::string pragma = "#pragma acc data";
        auto add = [&](const char* kind, const std::vector<int>& ids) {
            if (ids.empty()) return;
            pragma += std::string(" ") + kind + "(";
            for (size_t i = 0; i < ids.size(); ++i) {
                if (i) pragma += ", ";
                pragma += clauseRef(ids[i]);
            }
            pragma += ")";
        };
        add("copyin", c.copyin);
        add("copy", c.copy);
        add("copyout", c.copyout);
        int line = out_.nextLine();
        out_.line(pragma);
        out_.open("{");
        for (int id : c.copyin)
            transfers_.push_back({nm(id), TransferDir::HostToDevice, line, false});
        for (int id : c.copy) {
            transfers_.push_back({nm(id), TransferDir::HostToDevice, line, false});
            transfers_.push_back({nm(id), TransferDir::DeviceToHost, line, false});
        }
        for (int id : c.copyout)
            transfers_.push_back({nm(id), TransferDir::DeviceToHost, line, false});
        return true;
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
    void emitRegionLoop(const Stmt& s);
    void emitHostDecls(const FunctionDecl& fn);
    void collectHostDecls(const Block& b, std::vector<int>& out) const;
    std::vector<sema::GraphArray> collectGraphArrays() const;
    void emitCleanup();

    // ---- device side (loop bodies) ----

    std::string reductionClauses(const RegionPlan& rp) const;
    void parallelLoopHeader(const RegionPlan& rp);
    void deviceBlock(const Block& b);
    void deviceStmt(const Stmt& s);
    void deviceAssignProp(int propSym, const std::string& objText, const Expr& value);
    void deviceAttachedAssign(const Expr& target, const Expr& value);
    void deviceReduce(const ReduceAssignStmt& r, SourceSpan span);
    void deviceMinMax(const MinMaxAssignStmt& m);
    void deviceForAll(const ForAllStmt& f);
};

struct AccExpr : ExprEmitter {
    AccEmitter* e;
    const LoweringPlan& plan;
    AccEmitter::LoopCtx* k;  // may be null (host context)
    AccExpr(AccEmitter* em, const sema::AnnotatedProgram& pr, const LoweringPlan& pl,
            AccEmitter::LoopCtx* ctx)
        : e(em), plan(pl), k(ctx) {
        prog = &pr;
    }

    std::string scalarRef(int symbol) override { return plan.names.at(symbol); }
    std::string propRef(int symbol, const std::string& obj) override {
        return plan.names.at(symbol) + "[" + obj + "]";
    }
    std::string edgeWeightRef(const std::string& edge) override {
        return "weights[" + edge + "]";
    }
    std::string graphMethod(const MethodCall& m, const Expr& expr) override {
        if (m.method == "num_nodes") return "V";
        if (m.method == "count_outNbrs") {
            std::string x = emit(*m.args[0], 10);
            return "(offsets[" + x + " + 1] - offsets[" + x + "])";
        }
        if (m.method == "is_an_edge")
            return "graphdsl_is_edge(offsets, dests, " + emit(*m.args[0]) + ", " +
                   emit(*m.args[1]) + ")";
        if (m.method == "get_edge") {
            if (k && m.args[0]->is<VarRef>() && m.args[1]->is<VarRef>()) {
                for (const auto& [src, var, edgeVar] : k->edgeLoops)
                    if (m.args[0]->symbol == src && m.args[1]->symbol == var) return edgeVar;
            }
            return "graphdsl_edge_index(offsets, dests, " + emit(*m.args[0]) + ", " +
                   emit(*m.args[1]) + ")";
        }
        if (m.method == "minWt") return "graphdsl_min_weight(&g)";
        if (m.method == "maxWt") return "graphdsl_max_weight(&g)";
        unsupported(BackendKind::OpenAcc, "method " + m.method, expr.span);
    }
};

std::string AccEmitter::expr(const Expr& e, int minPrec) {
    AccExpr ee(this, prog_, plan_, lctx_);
    return ee.emit(e, minPrec);
}

// ---------------------------------------------------------------------------
// Host statements
// ---------------------------------------------------------------------------

void AccEmitter::hostAssign(const Expr& target, const std::string& valueText) {
    if (target.is<VarRef>()) {
        out_.line(nm(target.symbol) + " = " + valueText + ";");
        return;
    }
    if (sym(target.symbol).kind == SymbolKind::EdgeProperty)
        unsupported(BackendKind::OpenAcc, "edge property writes", target.span);
    if (isElided(target.symbol)) return;
    out_.line(nm(target.symbol) + "[" + expr(*target.as<PropAccess>().object, 10) +
              "] = " + valueText + ";");
}

void AccEmitter::emitAttach(const CallStmt& c) {
    const auto& m = c.call->as<MethodCall>();
    for (size_t i = 0; i < m.args.size(); ++i) {
        int propSym = m.argSymbols.at(i);
        if (isElided(propSym)) continue;
        out_.open("for (int i = 0; i < V; i++) {");
        out_.line(nm(propSym) + "[i] = " + expr(*m.args[i]) + ";");
        out_.close();
    }
}

void AccEmitter::hostStmt(const Stmt& s) {
    bool region = openAnchorRegion(&s);

    if (s.is<DeclStmt>()) {
        const auto& d = s.as<DeclStmt>();
        const Symbol& ds = sym(d.symbol);
        if (ds.kind != SymbolKind::NodeProperty && ds.kind != SymbolKind::EdgeProperty && d.init)
            out_.line(nm(d.symbol) + " = " + expr(*d.init) + ";");
    } else if (s.is<AssignStmt>()) {
        hostAssign(*s.as<AssignStmt>().target, expr(*s.as<AssignStmt>().value));
    } else if (s.is<ReduceAssignStmt>()) {
        const auto& r = s.as<ReduceAssignStmt>();
        std::string t = r.target->is<VarRef>()
                            ? nm(r.target->symbol)
                            : nm(r.target->symbol) + "[" +
                                  expr(*r.target->as<PropAccess>().object, 10) + "]";
        switch (r.op) {
            case ReduceOp::Sum: out_.line(t + " += " + expr(*r.value) + ";"); break;
            case ReduceOp::Product: out_.line(t + " *= " + expr(*r.value) + ";"); break;
            case ReduceOp::Count: out_.line(t + " += 1;"); break;
            case ReduceOp::All: out_.line(t + " = " + t + " && " + expr(*r.value, 3) + ";"); break;
            case ReduceOp::Any: out_.line(t + " = " + t + " || " + expr(*r.value, 2) + ";"); break;
        }
    } else if (s.is<MinMaxAssignStmt>()) {
        const auto& m = s.as<MinMaxAssignStmt>();
        out_.open("{");
        out_.line(ctype(m.compareCandidate->type.kind) + " cand = " + expr(*m.compareCandidate) +
                  ";");
        out_.open(std::string("if (") + (m.isMin ? "cand < " : "cand > ") +
                  expr(*m.compareCurrent, 10) + ") {");
        hostAssign(*m.targets[0], "cand");
        for (size_t i = 0; i < m.attachedValues.size(); ++i)
            hostAssign(*m.targets[i + 1], expr(*m.attachedValues[i]));
        out_.close();
        out_.close();
    } else if (s.is<IfStmt>()) {
        const auto& i = s.as<IfStmt>();
        out_.open("if (" + expr(*i.cond) + ") {");
        hostBlock(i.thenBlock);
        if (i.elseBlock) {
            out_.closeOpen("} else {");
            hostBlock(*i.elseBlock);
        }
        out_.close();
    } else if (s.is<CallStmt>()) {
        emitAttach(s.as<CallStmt>());
    } else if (s.is<ReturnStmt>()) {
        // Only tail returns are expressible: an early return would leave the
        // structured data regions. run() lowers the tail return itself.
        unsupported(BackendKind::OpenAcc, "early return inside data regions", s.span);
    } else if (s.is<ForAllStmt>()) {
        const auto& f = s.as<ForAllStmt>();
        bool isRegion = f.parallel && f.domain.kind != IterDomainKind::Container;
        if (isRegion) {
            emitRegionLoop(s);
        } else if (f.domain.kind == IterDomainKind::Container) {
            const Symbol& set = sym(f.domain.containerSymbol);
            std::string var = nm(f.varSymbol);
            out_.open("for (int " + var + "_i = 0; " + var + "_i < " + nm(set.id) + "_count; " +
                      var + "_i++) {");
            out_.line("int " + var + " = " + nm(set.id) + "[" + var + "_i];");
            if (f.filter) out_.open("if (" + expr(*f.filter) + ") {");
            hostBlock(f.body);
            if (f.filter) out_.close();
            out_.close();
        } else {
            std::string var = nm(f.varSymbol);
            if (f.domain.kind == IterDomainKind::Nodes) {
                out_.open("for (int " + var + " = 0; " + var + " < V; " + var + "++) {");
            } else {
                std::string srcText = expr(*f.domain.source, 10);
                const char* off =
                    f.domain.kind == IterDomainKind::Neighbors ? "offsets" : "rev_offsets";
                const char* arr =
                    f.domain.kind == IterDomainKind::Neighbors ? "dests" : "rev_srcs";
                out_.open("for (int edge = " + std::string(off) + "[" + srcText + "]; edge < " +
                          off + "[" + srcText + " + 1]; edge++) {");
                out_.line("int " + var + " = " + std::string(arr) + "[edge];");
            }
            if (f.filter) out_.open("if (" + expr(*f.filter) + ") {");
            hostBlock(f.body);
            if (f.filter) out_.close();
            out_.close();
        }
    } else if (s.is<FixedPointStmt>()) {
        emitFixedPoint(s);
    } else if (s.is<IterateBfsStmt>()) {
        emitBfs(s);
    }

    if (region) out_.close();
}

// ---------------------------------------------------------------------------
// Regions
// ---------------------------------------------------------------------------

std::string AccEmitter::reductionClauses(const RegionPlan& rp) const {
    // One clause per shared-scalar reduction in this region.
    std::map<std::string, std::set<std::string>> byOp;  // op token -> names
    for (const auto& red : an_.reductions) {
        if (red.regionId != rp.info->id || red.targetIsRegionLocal || red.isFixedPointFlag)
            continue;
        const Symbol& ts = sym(red.targetSymbol);
        if (ts.kind == SymbolKind::NodeProperty) continue;  // atomic update instead
        const char* op = nullptr;
        switch (red.op) {
            case ReduceOp::Sum:
            case ReduceOp::Count: op = "+"; break;
            case ReduceOp::Product: op = "*"; break;
            case ReduceOp::All: op = "&&"; break;
            case ReduceOp::Any: op = "||"; break;
        }
        byOp[op].insert(nm(red.targetSymbol));
    }
    std::string clauses;
    for (const auto& [op, names] : byOp) {
        clauses += " reduction(" + op + ":";
        bool first = true;
        for (const auto& n : names) {
            if (!first) clauses += ", ";
            clauses += n;
            first = false;
        }
        clauses += ")";
    }
    return clauses;
}

void AccEmitter::parallelLoopHeader(const RegionPlan& rp) {
    int line = out_.nextLine();
    out_.line("#pragma acc parallel loop" + reductionClauses(rp));
    for (auto& km : kernelMeta_)
        if (km.name == rp.kernelName) km.launchLines.push_back(line);
}

void AccEmitter::emitRegionLoop(const Stmt& s) {
    const auto& f = s.as<ForAllStmt>();
    if (f.domain.kind != IterDomainKind::Nodes)
        unsupported(BackendKind::OpenAcc, "parallel regions over neighbor domains", s.span);
    const RegionPlan& rp = regionPlan(f.regionId);

    LoopCtx ctx;
    ctx.rp = &rp;
    ctx.locals.insert(f.varSymbol);
    if (fpActive_) {
        ctx.fpProp = fpActive_->propertySymbol;
        ctx.fpFlagOnly = fpActive_->flagOnly;
        ctx.fpNext = fpActive_->flagOnly ? "" : fpNextName_;
        ctx.fpFlag = nm(fpActive_->flagSymbol);
        ctx.fpConvergedValue = !fpActive_->convergedWhenAllFalse;
    }
    lctx_ = &ctx;

    KernelMeta meta;
    meta.name = rp.kernelName;
    meta.regionId = rp.info->id;
    meta.file = plan_.unitName + "_openacc.cpp";
    meta.defLine = out_.nextLine();
    kernelMeta_.push_back(meta);

    parallelLoopHeader(rp);
    std::string var = nm(f.varSymbol);
    out_.open("for (int " + var + " = 0; " + var + " < V; " + var + "++) {");
    if (f.filter) {
        out_.open("if (" + expr(*f.filter) + ") {");
        deviceBlock(f.body);
        out_.close();
    } else {
        deviceBlock(f.body);
    }
    out_.close();
    lctx_ = nullptr;
}

void AccEmitter::emitFixedPoint(const Stmt& s) {
    const auto& f = s.as<FixedPointStmt>();
    const sema::FixedPointInfo* info = nullptr;
    for (const auto& fp : an_.transfers.fixedPoints)
        if (fp.stmt == &s) info = &fp;
    assert(info);

    std::string flag = nm(f.flagSymbol);
    bool buffered = !info->flagOnly;
    std::string next = buffered ? plan_.fpNextName.at(&s) : "";
    std::string prop = buffered ? nm(info->propertySymbol) : "";

    // The flag ping-pongs per iteration; the next-round buffer lives on the
    // device for the whole loop.
    std::string pragma = "#pragma acc data copy(" + flag + ")";
    if (buffered) pragma += " create(" + next + "[0:V])";
    out_.line(pragma);
    out_.open("{");
    int begin = out_.nextLine();
    out_.open("while (!" + flag + ") {");
    out_.line(flag + " = true;");
    out_.line("#pragma acc update device(" + flag + ")");
    transfers_.push_back({flag, TransferDir::HostToDevice, out_.nextLine() - 1, false});
    if (buffered) {
        out_.line("#pragma acc parallel loop");
        out_.open("for (int i = 0; i < V; i++) {");
        out_.line(next + "[i] = " + (info->convergedWhenAllFalse ? "false" : "true") + ";");
        out_.close();
    }

    fpActive_ = info;
    fpNextName_ = next;
    hostBlock(f.body);
    fpActive_ = nullptr;

    out_.line("#pragma acc update self(" + flag + ")");
    transfers_.push_back({flag, TransferDir::DeviceToHost, out_.nextLine() - 1, false});
    if (buffered) {
        out_.line("bool* graphdsl_swap = " + prop + ";");
        out_.line(prop + " = " + next + ";");
        out_.line(next + " = graphdsl_swap;");
    }
    out_.close();
    loops_.push_back({flag, begin, out_.nextLine() - 1, false});
    out_.close();
}

void AccEmitter::emitBfs(const Stmt& s) {
    const auto& b = s.as<IterateBfsStmt>();
    const BfsNames& names = plan_.bfsNames.at(&s);
    const RegionPlan& fwd = regionPlan(b.regionId);

    out_.open("for (int i = 0; i < V; i++) {");
    out_.line(names.level + "[i] = -1;");
    out_.close();
    out_.line(names.level + "[" + expr(*b.root, 10) + "] = 0;");
    out_.line(names.hops + " = 0;");
    out_.line("#pragma acc data copyin(" + names.level + "[0:V]) copy(" + names.finished + ")");
    transfers_.push_back({names.level, TransferDir::HostToDevice, out_.nextLine() - 1, false});
    out_.open("{");

    int begin = out_.nextLine();
    out_.open("do {");
    out_.line(names.finished + " = true;");
    out_.line("#pragma acc update device(" + names.finished + ")");
    transfers_.push_back({names.finished, TransferDir::HostToDevice, out_.nextLine() - 1, false});

    // Forward pass: frontier expansion plus the body statements.
    LoopCtx ctx;
    ctx.rp = &fwd;
    ctx.locals.insert(b.varSymbol);
    ctx.bfsVar = b.varSymbol;
    ctx.levelName = names.level;
    ctx.hopsName = names.hops;
    if (fpActive_) {
        ctx.fpProp = fpActive_->propertySymbol;
        ctx.fpFlagOnly = fpActive_->flagOnly;
        ctx.fpNext = fpActive_->flagOnly ? "" : fpNextName_;
        ctx.fpFlag = nm(fpActive_->flagSymbol);
        ctx.fpConvergedValue = !fpActive_->convergedWhenAllFalse;
    }
    lctx_ = &ctx;

    KernelMeta fwdMeta;
    fwdMeta.name = fwd.kernelName;
    fwdMeta.regionId = fwd.info->id;
    fwdMeta.file = plan_.unitName + "_openacc.cpp";
    fwdMeta.defLine = out_.nextLine();
    kernelMeta_.push_back(fwdMeta);
    parallelLoopHeader(fwd);
    std::string var = nm(b.varSymbol);
    out_.open("for (int " + var + " = 0; " + var + " < V; " + var + "++) {");
    out_.open("if (" + names.level + "[" + var + "] == " + names.hops + ") {");
    out_.open("for (int bfs_edge = offsets[" + var + "]; bfs_edge < offsets[" + var +
              " + 1]; bfs_edge++) {");
    out_.line("int bfs_nbr = dests[bfs_edge];");
    out_.open("if (" + names.level + "[bfs_nbr] == -1) {");
    out_.line(names.level + "[bfs_nbr] = " + names.hops + " + 1;");
    out_.line(names.finished + " = false;");
    out_.close();
    out_.close();
    for (const auto& inner : b.body.stmts)
        if (!inner->is<IterateRevStmt>()) deviceStmt(*inner);
    out_.close();
    out_.close();
    lctx_ = nullptr;

    out_.line("#pragma acc update self(" + names.finished + ")");
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
        LoopCtx rctx;
        rctx.rp = &rp;
        rctx.locals.insert(b.varSymbol);
        rctx.bfsVar = b.varSymbol;
        rctx.levelName = names.level;
        rctx.hopsName = names.hops;
        lctx_ = &rctx;
        KernelMeta revMeta;
        revMeta.name = rp.kernelName;
        revMeta.regionId = rp.info->id;
        revMeta.file = plan_.unitName + "_openacc.cpp";
        revMeta.defLine = out_.nextLine();
        kernelMeta_.push_back(revMeta);
        parallelLoopHeader(rp);
        out_.open("for (int " + var + " = 0; " + var + " < V; " + var + "++) {");
        out_.open("if (" + names.level + "[" + var + "] == " + names.hops + ") {");
        if (rev.filter) {
            out_.open("if (" + expr(*rev.filter) + ") {");
            deviceBlock(rev.body);
            out_.close();
        } else {
            deviceBlock(rev.body);
        }
        out_.close();
        out_.close();
        lctx_ = nullptr;
        out_.line(names.hops + " = " + names.hops + " - 1;");
        out_.close();
    }
    out_.close();  // data region
}

// ---------------------------------------------------------------------------
// Device (loop-body) statements
// ---------------------------------------------------------------------------

void AccEmitter::deviceBlock(const Block& b) {
    for (const auto& s : b.stmts) deviceStmt(*s);
}

void AccEmitter::deviceAssignProp(int propSym, const std::string& objText, const Expr& value) {
    LoopCtx& k = *lctx_;
    std::string valueText = expr(value);
    if (propSym == k.fpProp) {
        bool isLit = value.is<BoolLit>();
        bool litVal = isLit && value.as<BoolLit>().value;
        if (!k.fpFlagOnly) out_.line(k.fpNext + "[" + objText + "] = " + valueText + ";");
        if (isLit) {
            if (litVal != k.fpConvergedValue) out_.line(k.fpFlag + " = false;");
        } else {
            out_.open("if (" + valueText + (k.fpConvergedValue ? " == false) {" : " == true) {"));
            out_.line(k.fpFlag + " = false;");
            out_.close();
        }
        return;
    }
    out_.line(nm(propSym) + "[" + objText + "] = " + valueText + ";");
}

void AccEmitter::deviceAttachedAssign(const Expr& target, const Expr& value) {
    if (target.is<VarRef>()) {
        out_.line(nm(target.symbol) + " = " + expr(value) + ";");
        return;
    }
    deviceAssignProp(target.symbol, expr(*target.as<PropAccess>().object, 10), value);
}

void AccEmitter::deviceStmt(const Stmt& s) {
    LoopCtx& k = *lctx_;
    if (s.is<DeclStmt>()) {
        const auto& d = s.as<DeclStmt>();
        k.locals.insert(d.symbol);
        std::string init = "0";
        if (sym(d.symbol).type.kind == TypeKind::Bool) init = "false";
        if (d.init) init = expr(*d.init);
        out_.line(elemType(d.symbol) + " " + nm(d.symbol) + " = " + init + ";");
        return;
    }
    if (s.is<AssignStmt>()) {
        const auto& a = s.as<AssignStmt>();
        if (a.target->is<VarRef>()) {
            out_.line(nm(a.target->symbol) + " = " + expr(*a.value) + ";");
        } else {
            if (sym(a.target->symbol).kind == SymbolKind::EdgeProperty)
                unsupported(BackendKind::OpenAcc, "edge property writes", s.span);
            deviceAssignProp(a.target->symbol, expr(*a.target->as<PropAccess>().object, 10),
                             *a.value);
        }
        return;
    }
    if (s.is<ReduceAssignStmt>()) return deviceReduce(s.as<ReduceAssignStmt>(), s.span);
    if (s.is<MinMaxAssignStmt>()) return deviceMinMax(s.as<MinMaxAssignStmt>());
    if (s.is<IfStmt>()) {
        const auto& i = s.as<IfStmt>();
        out_.open("if (" + expr(*i.cond) + ") {");
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
        unsupported(BackendKind::OpenAcc, "attachNodeProperty inside parallel loops", s.span);
    unsupported(BackendKind::OpenAcc, "host constructs inside parallel loops", s.span);
}

void AccEmitter::deviceForAll(const ForAllStmt& f) {
    LoopCtx& k = *lctx_;
    std::string var = nm(f.varSymbol);
    k.locals.insert(f.varSymbol);
    std::string edgeVar = k.loopDepth == 0 ? "edge" : "edge_" + std::to_string(k.loopDepth);
    bool pushedEdgeLoop = false;

    switch (f.domain.kind) {
        case IterDomainKind::Nodes:
            out_.open("for (int " + var + " = 0; " + var + " < V; " + var + "++) {");
            break;
        case IterDomainKind::Neighbors: {
            std::string src = expr(*f.domain.source, 10);
            out_.open("for (int " + edgeVar + " = offsets[" + src + "]; " + edgeVar +
                      " < offsets[" + src + " + 1]; " + edgeVar + "++) {");
            out_.line("int " + var + " = dests[" + edgeVar + "];");
            if (f.domain.source->is<VarRef>()) {
                k.edgeLoops.push_back({f.domain.source->symbol, f.varSymbol, edgeVar});
                pushedEdgeLoop = true;
                if (k.bfsVar >= 0 && f.domain.source->symbol == k.bfsVar)
                    out_.line("if (" + k.levelName + "[" + var + "] != " + k.hopsName +
                              " + 1) continue;");
            }
            break;
        }
        case IterDomainKind::NodesTo: {
            std::string src = expr(*f.domain.source, 10);
            out_.open("for (int " + edgeVar + " = rev_offsets[" + src + "]; " + edgeVar +
                      " < rev_offsets[" + src + " + 1]; " + edgeVar + "++) {");
            out_.line("int " + var + " = rev_srcs[" + edgeVar + "];");
            break;
        }
        case IterDomainKind::Container:
            unsupported(BackendKind::OpenAcc, "node-set iteration inside parallel loops",
                        SourceSpan{});
    }
    ++k.loopDepth;
    if (f.filter) out_.line("if (!(" + expr(*f.filter) + ")) continue;");
    deviceBlock(f.body);
    --k.loopDepth;
    if (pushedEdgeLoop) k.edgeLoops.pop_back();
    out_.close();
}

void AccEmitter::deviceReduce(const ReduceAssignStmt& r, SourceSpan span) {
    LoopCtx& k = *lctx_;
    std::string value = r.value ? expr(*r.value) : "1";

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
    if (r.target->is<PropAccess>()) {
        std::string obj = expr(*r.target->as<PropAccess>().object, 10);
        if (targetSym == k.fpProp) {
            if (r.op == ReduceOp::Any) {
                out_.open("if (" + value + ") {");
                if (!k.fpFlagOnly) out_.line(k.fpNext + "[" + obj + "] = true;");
                if (!k.fpConvergedValue) out_.line(k.fpFlag + " = false;");
                out_.close();
            } else if (r.op == ReduceOp::All) {
                out_.open("if (!(" + value + ")) {");
                if (!k.fpFlagOnly) out_.line(k.fpNext + "[" + obj + "] = false;");
                if (k.fpConvergedValue) out_.line(k.fpFlag + " = false;");
                out_.close();
            } else {
                unsupported(BackendKind::OpenAcc, "numeric reduction on a convergence property",
                            span);
            }
            return;
        }
        std::string cell = nm(targetSym) + "[" + obj + "]";
        switch (r.op) {
            case ReduceOp::Sum:
                out_.line("#pragma acc atomic update");
                out_.line(cell + " += " + value + ";");
                break;
            case ReduceOp::Count:
                out_.line("#pragma acc atomic update");
                out_.line(cell + " += 1;");
                break;
            case ReduceOp::Product:
                out_.line("#pragma acc atomic update");
                out_.line(cell + " *= " + value + ";");
                break;
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

    // Shared scalars carry a reduction clause on the loop pragma; the body
    // uses the plain combined operator.
    std::string t = nm(targetSym);
    switch (r.op) {
        case ReduceOp::Sum: out_.line(t + " += " + value + ";"); break;
        case ReduceOp::Product: out_.line(t + " *= " + value + ";"); break;
        case ReduceOp::Count: out_.line(t + " += 1;"); break;
        case ReduceOp::All: out_.line(t + " = " + t + " && " + value + ";"); break;
        case ReduceOp::Any: out_.line(t + " = " + t + " || " + value + ";"); break;
    }
}

void AccEmitter::deviceMinMax(const MinMaxAssignStmt& m) {
    LoopCtx& k = *lctx_;
    const Expr& t0 = *m.targets[0];
    const Symbol& ts = sym(t0.symbol);
    TypeKind elem = ts.kind == SymbolKind::NodeProperty ? ts.type.element : ts.type.kind;

    std::string target;
    if (t0.is<VarRef>()) {
        target = nm(t0.symbol);
    } else {
        target = nm(t0.symbol) + "[" + expr(*t0.as<PropAccess>().object, 10) + "]";
    }

    out_.open("{");
    out_.line(ctype(elem) + " cand = " + expr(*m.compareCandidate) + ";");
    out_.open("if (" + target + (m.isMin ? " > cand) {" : " < cand) {"));
    if (t0.is<VarRef>() && k.locals.count(t0.symbol)) {
        out_.line(target + " = cand;");
    } else {
        out_.line("#pragma acc atomic write");
        out_.line(target + " = cand;");
    }
    for (size_t i = 0; i < m.attachedValues.size(); ++i)
        deviceAttachedAssign(*m.targets[i + 1], *m.attachedValues[i]);
    out_.close();
    out_.close();
}

// ---------------------------------------------------------------------------
// Declarations, cleanup, assembly
// ---------------------------------------------------------------------------

void AccEmitter::collectHostDecls(const Block& b, std::vector<int>& out) const {
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

void AccEmitter::emitHostDecls(const FunctionDecl& fn) {
    std::vector<int> decls;
    collectHostDecls(fn.body, decls);
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
    for (const auto& [stmt, next] : plan_.fpNextName)
        out_.line("bool* " + next + " = (bool*)calloc(V, sizeof(bool));");
    for (const auto& [stmt, names] : plan_.bfsNames) {
        out_.line("int* " + names.level + " = (int*)malloc(sizeof(int) * V);");
        out_.line("int " + names.hops + " = 0;");
        out_.line("bool " + names.finished + " = false;");
    }
}

std::vector<sema::GraphArray> AccEmitter::collectGraphArrays() const {
    std::set<sema::GraphArray> set;
    for (const auto& rp : plan_.regions)
        set.insert(rp.info->graphArrays.begin(), rp.info->graphArrays.end());
    return {set.begin(), set.end()};
}

void AccEmitter::emitCleanup() {
    std::vector<int> decls;
    collectHostDecls(prog_.entry().body, decls);
    for (int id : decls)
        if (sym(id).kind == SymbolKind::NodeProperty) out_.line("free(" + nm(id) + ");");
    for (const auto& [stmt, next] : plan_.fpNextName) out_.line("free(" + next + ");");
    for (const auto& [stmt, names] : plan_.bfsNames) out_.line("free(" + names.level + ");");
}

EmitUnit AccEmitter::run() {
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

    out_.open(sig + " {");
    out_.line("int V = g.n;");
    out_.line("int E = g.m;");
    out_.line("(void)E;");
    auto arrays = collectGraphArrays();
    std::string weightsSource = "g.weights";
    for (const auto& s : prog_.symbols.all())
        if (s.kind == SymbolKind::EdgeProperty && s.isParam) weightsSource = nm(s.id);
    for (auto a : arrays) {
        std::string src = a == sema::GraphArray::Weights ? weightsSource
                                                         : "g." + std::string(graphArrayName(a));
        out_.line("const int* " + std::string(graphArrayName(a)) + " = " + src + ";");
    }
    emitHostDecls(fn);
    out_.blank();

    // Static graph: promoted to one function-level copyin region.
    if (!arrays.empty()) {
        std::string pragma = "#pragma acc data copyin(";
        bool first = true;
        for (auto a : arrays) {
            if (!first) pragma += ", ";
            std::string size =
                (a == sema::GraphArray::Offsets || a == sema::GraphArray::RevOffsets) ? "0:V + 1"
                                                                                      : "0:E";
            pragma += std::string(graphArrayName(a)) + "[" + size + "]";
            first = false;
        }
        pragma += ")";
        int line = out_.nextLine();
        out_.line(pragma);
        for (auto a : arrays)
            transfers_.push_back({graphArrayName(a), TransferDir::HostToDevice, line, true});
        out_.open("{");
    }

    // A tail return must run after the data regions close; everything else
    // lowers in place.
    const Stmt* tailReturn = nullptr;
    if (!fn.body.stmts.empty() && fn.body.stmts.back()->is<ReturnStmt>())
        tailReturn = fn.body.stmts.back().get();
    for (const auto& sp : fn.body.stmts)
        if (sp.get() != tailReturn) hostStmt(*sp);

    if (!arrays.empty()) out_.close();
    emitCleanup();
    if (tailReturn) {
        const auto& r = tailReturn->as<ReturnStmt>();
        out_.line(r.value ? "return " + expr(*r.value) + ";" : "return;");
    }
    out_.close();

    std::string header = "// Generated " + plan_.unitName + " (OpenACC backend)\n";
    std::string includes =
        "#include <cstdio>\n#include <cstdlib>\n#include <cstring>\n#include <climits>\n\n";
    std::string prelude = preludeGraphRuntime();
    if (plan_.usesIsEdgeHelper)
        prelude += "\n#pragma acc routine seq\n" + preludeIsEdge("static inline");
    if (plan_.usesEdgeIndexHelper)
        prelude += "\n#pragma acc routine seq\n" + preludeEdgeIndex("static inline");
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

    std::string mainText = buildMainDriver(prog_, plan_, "", false);

    int bodyOffset = countLines(header) + countLines(includes) + countLines(prelude);
    std::string full = header + includes + prelude + out_.text() + "\n" + mainText;
    std::string fileName = plan_.unitName + "_openacc.cpp";

    unit_.programName = plan_.unitName;
    unit_.backend = BackendKind::OpenAcc;
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

EmitUnit generateOpenAcc(const sema::AnnotatedProgram& program, const Analyses& analyses,
                         const CodegenConfig& cfg, const LoweringPlan& plan) {
    return AccEmitter(program, analyses, cfg, plan).run();
}

}  // namespace graphdsl::codegen
