#include "graphdsl/analysis.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>

namespace graphdsl::sema {

using namespace ast;

const char* regionKindName(RegionKind kind) {
    switch (kind) {
        case RegionKind::ForAll: return "forall";
        case RegionKind::BfsForward: return "bfs-forward";
        case RegionKind::BfsReverse: return "bfs-reverse";
    }
    return "?";
}

const char* graphArrayName(GraphArray a) {
    switch (a) {
        case GraphArray::Offsets: return "offsets";
        case GraphArray::Dests: return "dests";
        case GraphArray::Weights: return "weights";
        case GraphArray::RevOffsets: return "rev_offsets";
        case GraphArray::RevSrcs: return "rev_srcs";
        case GraphArray::RevEid: return "rev_eid";
    }
    return "?";
}

namespace {

bool isParallelRegionStmt(const Stmt& s) {
    if (s.is<IterateBfsStmt>()) return true;
    if (s.is<ForAllStmt>()) {
        const auto& f = s.as<ForAllStmt>();
        return f.parallel && f.domain.kind != IterDomainKind::Container;
    }
    return false;
}

class Analyzer {
public:
    Analyzer(const AnnotatedProgram& prog) : prog_(prog) {}

    TransferAnalysis run() {
        // Properties read anywhere in the program; feeds the OR-reduction
        // array-elision decision.
        collectGlobalReads(prog_.entry().body);
        hostBlock(prog_.entry().body);
        finalizeFixedPoints();
        buildScopes();
        return std::move(out_);
    }

private:
    const AnnotatedProgram& prog_;
    TransferAnalysis out_;
    RegionInfo* cur_ = nullptr;
    SymbolSet curLocals_;
    int curFixedPoint_ = -1;
    SymbolSet globalPropReads_;

    const Symbol& sym(int id) const { return prog_.symbols.at(id); }

    // ---- global property-read census ----

    void collectGlobalReads(const Block& b) {
        for (const auto& sp : b.stmts) collectGlobalReadsStmt(*sp);
    }

    void readsInExpr(const Expr& e) {
        if (e.is<PropAccess>()) {
            const auto& p = e.as<PropAccess>();
            if (e.symbol >= 0 && sym(e.symbol).kind == SymbolKind::NodeProperty)
                globalPropReads_.insert(e.symbol);
            readsInExpr(*p.object);
            return;
        }
        if (e.is<UnaryExpr>()) return readsInExpr(*e.as<UnaryExpr>().operand);
        if (e.is<BinaryExpr>()) {
            readsInExpr(*e.as<BinaryExpr>().lhs);
            readsInExpr(*e.as<BinaryExpr>().rhs);
            return;
        }
        if (e.is<MethodCall>()) {
            const auto& m = e.as<MethodCall>();
            if (m.object) readsInExpr(*m.object);
            for (const auto& a : m.args) readsInExpr(*a);
        }
    }

    void collectGlobalReadsStmt(const Stmt& s) {
        if (s.is<DeclStmt>()) {
            if (s.as<DeclStmt>().init) readsInExpr(*s.as<DeclStmt>().init);
        } else if (s.is<AssignStmt>()) {
            const auto& a = s.as<AssignStmt>();
            readsInExpr(*a.value);
            if (a.target->is<PropAccess>()) readsInExpr(*a.target->as<PropAccess>().object);
        } else if (s.is<ReduceAssignStmt>()) {
            const auto& r = s.as<ReduceAssignStmt>();
            readsInExpr(*r.target);  // read-modify-write
            if (r.value) readsInExpr(*r.value);
        } else if (s.is<MinMaxAssignStmt>()) {
            const auto& m = s.as<MinMaxAssignStmt>();
            readsInExpr(*m.compareCurrent);
            readsInExpr(*m.compareCandidate);
            for (const auto& t : m.targets)
                if (t->is<PropAccess>()) readsInExpr(*t->as<PropAccess>().object);
            for (const auto& v : m.attachedValues) readsInExpr(*v);
        } else if (s.is<ForAllStmt>()) {
            const auto& f = s.as<ForAllStmt>();
            if (f.domain.source) readsInExpr(*f.domain.source);
            if (f.filter) readsInExpr(*f.filter);
            collectGlobalReads(f.body);
        } else if (s.is<FixedPointStmt>()) {
            collectGlobalReads(s.as<FixedPointStmt>().body);
        } else if (s.is<IterateBfsStmt>()) {
            const auto& b = s.as<IterateBfsStmt>();
            readsInExpr(*b.root);
            collectGlobalReads(b.body);
        } else if (s.is<IterateRevStmt>()) {
            const auto& r = s.as<IterateRevStmt>();
            if (r.filter) readsInExpr(*r.filter);
            collectGlobalReads(r.body);
        } else if (s.is<IfStmt>()) {
            const auto& i = s.as<IfStmt>();
            readsInExpr(*i.cond);
            collectGlobalReads(i.thenBlock);
            if (i.elseBlock) collectGlobalReads(*i.elseBlock);
        } else if (s.is<CallStmt>()) {
            readsInExpr(*s.as<CallStmt>().call);
        } else if (s.is<ReturnStmt>()) {
            if (s.as<ReturnStmt>().value) readsInExpr(*s.as<ReturnStmt>().value);
        }
    }

    // ---- host traversal ----

    void hostBlock(const Block& b) {
        for (const auto& sp : b.stmts) hostStmt(*sp);
    }

    void hostStmt(const Stmt& s) {
        if (s.is<ForAllStmt>()) {
            const auto& f = s.as<ForAllStmt>();
            if (isParallelRegionStmt(s)) {
                openRegion(s, RegionKind::ForAll);
                domainArrays(f.domain);
                if (f.domain.source) deviceRead(*f.domain.source);
                curLocals_.insert(f.varSymbol);
                if (f.filter) deviceRead(*f.filter);
                deviceBlock(f.body);
                closeRegion(const_cast<Stmt&>(s));
            } else {
                // Sequential host loop; nested statements keep host context.
                hostBlock(f.body);
            }
            return;
        }
        if (s.is<IterateBfsStmt>()) {
            const auto& b = s.as<IterateBfsStmt>();
            // Forward pass region: body statements minus the reverse passes.
            openRegion(s, RegionKind::BfsForward);
            out_.regions.back().graphArrays.insert(GraphArray::Offsets);
            out_.regions.back().graphArrays.insert(GraphArray::Dests);
            deviceRead(*b.root);
            curLocals_.insert(b.varSymbol);
            for (const auto& inner : b.body.stmts)
                if (!inner->is<IterateRevStmt>()) deviceStmt(*inner);
            int fwdId = closeRegion(const_cast<Stmt&>(s));
            const_cast<IterateBfsStmt&>(b).regionId = fwdId;
            for (const auto& inner : b.body.stmts) {
                if (!inner->is<IterateRevStmt>()) continue;
                const auto& rev = inner->as<IterateRevStmt>();
                openRegion(*inner, RegionKind::BfsReverse);
                out_.regions.back().graphArrays.insert(GraphArray::Offsets);
                out_.regions.back().graphArrays.insert(GraphArray::Dests);
                deviceRead(*b.root);
                curLocals_.insert(b.varSymbol);
                if (rev.filter) deviceRead(*rev.filter);
                deviceBlock(rev.body);
                int revId = closeRegion(const_cast<Stmt&>(*inner));
                const_cast<IterateRevStmt&>(rev).regionId = revId;
            }
            return;
        }
        if (s.is<FixedPointStmt>()) {
            const auto& f = s.as<FixedPointStmt>();
            FixedPointInfo info;
            info.stmt = &s;
            info.flagSymbol = f.flagSymbol;
            const Expr* conv = f.convergence.get();
            if (conv->is<UnaryExpr>()) {
                info.convergedWhenAllFalse = true;
                info.propertySymbol = conv->as<UnaryExpr>().operand->symbol;
            } else {
                info.convergedWhenAllFalse = false;
                info.propertySymbol = conv->symbol;
            }
            out_.fixedPoints.push_back(info);
            int fpIndex = static_cast<int>(out_.fixedPoints.size()) - 1;
            int saved = curFixedPoint_;
            curFixedPoint_ = fpIndex;
            hostBlock(f.body);
            curFixedPoint_ = saved;
            return;
        }
        if (s.is<IfStmt>()) {
            const auto& i = s.as<IfStmt>();
            hostBlock(i.thenBlock);
            if (i.elseBlock) hostBlock(*i.elseBlock);
            return;
        }
        // Plain host statements carry no regions.
    }

    // ---- device traversal ----

    void openRegion(const Stmt& s, RegionKind kind) {
        RegionInfo r;
        r.id = static_cast<int>(out_.regions.size());
        r.kind = kind;
        r.stmt = &s;
        r.span = s.span;
        r.enclosingFixedPoint = curFixedPoint_;
        out_.regions.push_back(std::move(r));
        cur_ = &out_.regions.back();
        curLocals_.clear();
    }

    int closeRegion(Stmt& s) {
        RegionInfo& r = *cur_;
        // Classify: copy_in = everything used, copy_out = everything written,
        // device_only = locals. Array-granularity, conservative.
        for (int id : r.reads)
            if (!curLocals_.count(id)) r.copyIn.insert(id);
        for (int id : r.writes)
            if (!curLocals_.count(id)) {
                r.copyIn.insert(id);
                r.copyOut.insert(id);
            }
        for (int id : curLocals_) r.deviceOnly.insert(id);
        for (int id : r.copyIn) {
            const Symbol& sm = sym(id);
            if ((sm.kind == SymbolKind::Scalar || sm.kind == SymbolKind::Node) &&
                !r.copyOut.count(id))
                r.scalarParams.insert(id);
        }
        // Fused convergence-flag traffic: a region that writes the fixedPoint
        // property also maintains the device flag copy.
        if (curFixedPoint_ >= 0) {
            FixedPointInfo& fp = out_.fixedPoints[curFixedPoint_];
            fp.regionIds.push_back(r.id);
            if (r.writes.count(fp.propertySymbol)) {
                r.copyIn.insert(fp.flagSymbol);
                r.copyOut.insert(fp.flagSymbol);
            }
        }
        if (s.is<ForAllStmt>()) s.as<ForAllStmt>().regionId = r.id;
        cur_ = nullptr;
        curLocals_.clear();
        return r.id;
    }

    void domainArrays(const IterDomain& d) {
        if (!cur_) return;
        switch (d.kind) {
            case IterDomainKind::Nodes:
            case IterDomainKind::Container: break;
            case IterDomainKind::Neighbors:
                cur_->graphArrays.insert(GraphArray::Offsets);
                cur_->graphArrays.insert(GraphArray::Dests);
                break;
            case IterDomainKind::NodesTo:
                cur_->graphArrays.insert(GraphArray::RevOffsets);
                cur_->graphArrays.insert(GraphArray::RevSrcs);
                cur_->graphArrays.insert(GraphArray::RevEid);
                break;
        }
    }

    void note(int id, bool write) {
        if (id < 0 || !cur_) return;
        const Symbol& sm = sym(id);
        switch (sm.kind) {
            case SymbolKind::Graph:
            case SymbolKind::NodeSet:
                return;  // realized as graph arrays / host iteration
            case SymbolKind::EdgeProperty:
                cur_->graphArrays.insert(GraphArray::Weights);
                return;
            default: break;
        }
        (write ? cur_->writes : cur_->reads).insert(id);
    }

    void deviceRead(const Expr& e) {
        if (e.is<VarRef>()) {
            note(e.symbol, false);
            return;
        }
        if (e.is<PropAccess>()) {
            note(e.symbol, false);
            deviceRead(*e.as<PropAccess>().object);
            return;
        }
        if (e.is<UnaryExpr>()) return deviceRead(*e.as<UnaryExpr>().operand);
        if (e.is<BinaryExpr>()) {
            deviceRead(*e.as<BinaryExpr>().lhs);
            deviceRead(*e.as<BinaryExpr>().rhs);
            return;
        }
        if (e.is<MethodCall>()) {
            const auto& m = e.as<MethodCall>();
            for (const auto& a : m.args) deviceRead(*a);
            if (!cur_) return;
            if (m.method == "count_outNbrs") {
                cur_->graphArrays.insert(GraphArray::Offsets);
            } else if (m.method == "is_an_edge" || m.method == "get_edge") {
                cur_->graphArrays.insert(GraphArray::Offsets);
                cur_->graphArrays.insert(GraphArray::Dests);
            } else if (m.method == "minWt" || m.method == "maxWt") {
                cur_->graphArrays.insert(GraphArray::Weights);
            }
        }
    }

    void deviceWrite(const Expr& target) {
        if (target.is<VarRef>()) {
            note(target.symbol, true);
            return;
        }
        if (target.is<PropAccess>()) {
            note(target.symbol, true);
            deviceRead(*target.as<PropAccess>().object);
        }
    }

    void deviceBlock(const Block& b) {
        for (const auto& sp : b.stmts) deviceStmt(*sp);
    }

    void deviceStmt(const Stmt& s) {
        if (s.is<DeclStmt>()) {
            const auto& d = s.as<DeclStmt>();
            curLocals_.insert(d.symbol);
            if (d.init) deviceRead(*d.init);
            return;
        }
        if (s.is<AssignStmt>()) {
            const auto& a = s.as<AssignStmt>();
            deviceWrite(*a.target);
            deviceRead(*a.value);
            return;
        }
        if (s.is<ReduceAssignStmt>()) {
            const auto& r = s.as<ReduceAssignStmt>();
            deviceWrite(*r.target);
            deviceRead(*r.target);
            if (r.value) deviceRead(*r.value);
            return;
        }
        if (s.is<MinMaxAssignStmt>()) {
            const auto& m = s.as<MinMaxAssignStmt>();
            for (const auto& t : m.targets) deviceWrite(*t);
            deviceRead(*m.compareCurrent);
            deviceRead(*m.compareCandidate);
            for (const auto& v : m.attachedValues) deviceRead(*v);
            return;
        }
        if (s.is<ForAllStmt>()) {
            // Inner foralls serialize inside the kernel.
            const auto& f = s.as<ForAllStmt>();
            domainArrays(f.domain);
            if (f.domain.source) deviceRead(*f.domain.source);
            curLocals_.insert(f.varSymbol);
            if (f.filter) deviceRead(*f.filter);
            deviceBlock(f.body);
            return;
        }
        if (s.is<IfStmt>()) {
            const auto& i = s.as<IfStmt>();
            deviceRead(*i.cond);
            deviceBlock(i.thenBlock);
            if (i.elseBlock) deviceBlock(*i.elseBlock);
            return;
        }
        if (s.is<CallStmt>()) {
            deviceRead(*s.as<CallStmt>().call);
            return;
        }
        if (s.is<ReturnStmt>()) {
            if (s.as<ReturnStmt>().value) deviceRead(*s.as<ReturnStmt>().value);
            return;
        }
    }

    // ---- fused flag sites & array elision ----

    void finalizeFixedPoints() {
        for (auto& fp : out_.fixedPoints) {
            collectFusedSites(fp, fp.stmt->as<FixedPointStmt>().body);
            fp.flagOnly = !globalPropReads_.count(fp.propertySymbol);
            if (fp.flagOnly) {
                // The per-node array never materializes on the device; only
                // the single OR-flag travels.
                for (int rid : fp.regionIds) {
                    RegionInfo& r = out_.regions[rid];
                    r.copyIn.erase(fp.propertySymbol);
                    r.copyOut.erase(fp.propertySymbol);
                }
            }
        }
    }

    void collectFusedSites(FixedPointInfo& fp, const Block& b) {
        for (const auto& sp : b.stmts) collectFusedSitesStmt(fp, *sp);
    }

    void collectFusedSitesStmt(FixedPointInfo& fp, const Stmt& s) {
        auto targetHits = [&](const Expr& t) {
            return (t.is<PropAccess>() || t.is<VarRef>()) && t.symbol == fp.propertySymbol;
        };
        if (s.is<AssignStmt>()) {
            if (targetHits(*s.as<AssignStmt>().target)) fp.fusedUpdateSites.push_back(s.span);
        } else if (s.is<ReduceAssignStmt>()) {
            if (targetHits(*s.as<ReduceAssignStmt>().target)) fp.fusedUpdateSites.push_back(s.span);
        } else if (s.is<MinMaxAssignStmt>()) {
            for (const auto& t : s.as<MinMaxAssignStmt>().targets)
                if (targetHits(*t)) fp.fusedUpdateSites.push_back(s.span);
        } else if (s.is<ForAllStmt>()) {
            collectFusedSites(fp, s.as<ForAllStmt>().body);
        } else if (s.is<IterateBfsStmt>()) {
            collectFusedSites(fp, s.as<IterateBfsStmt>().body);
        } else if (s.is<IterateRevStmt>()) {
            collectFusedSites(fp, s.as<IterateRevStmt>().body);
        } else if (s.is<IfStmt>()) {
            collectFusedSites(fp, s.as<IfStmt>().thenBlock);
            if (s.as<IfStmt>().elseBlock) collectFusedSites(fp, *s.as<IfStmt>().elseBlock);
        }
    }

    // ---- merging consecutive regions into transfer scopes ----

    void buildScopes() {
        // Regions are merged when their statements are consecutive in one
        // block with nothing between them. BFS forward/reverse pairs share a
        // statement and always merge.
        std::vector<std::vector<int>> runs;
        scanBlockForRuns(prog_.entry().body, runs);
        for (auto& run : runs) {
            TransferScope scope;
            scope.id = static_cast<int>(out_.scopes.size());
            scope.regions = run;
            for (int rid : run) {
                RegionInfo& r = out_.regions[rid];
                r.scopeId = scope.id;
                scope.copyIn.insert(r.copyIn.begin(), r.copyIn.end());
                scope.copyOut.insert(r.copyOut.begin(), r.copyOut.end());
                scope.graphArrays.insert(r.graphArrays.begin(), r.graphArrays.end());
            }
            out_.scopes.push_back(std::move(scope));
        }
    }

    void collectRegionsOfStmt(const Stmt& s, std::vector<int>& ids) {
        for (const auto& r : out_.regions)
            if (r.stmt == &s) ids.push_back(r.id);
        if (s.is<IterateBfsStmt>()) {
            for (const auto& inner : s.as<IterateBfsStmt>().body.stmts)
                if (inner->is<IterateRevStmt>())
                    for (const auto& r : out_.regions)
                        if (r.stmt == inner.get()) ids.push_back(r.id);
        }
    }

    void scanBlockForRuns(const Block& b, std::vector<std::vector<int>>& runs) {
        std::vector<int> current;
        auto flush = [&]() {
            if (!current.empty()) {
                runs.push_back(current);
                current.clear();
            }
        };
        for (const auto& sp : b.stmts) {
            const Stmt& s = *sp;
            if (isParallelRegionStmt(s)) {
                collectRegionsOfStmt(s, current);
                continue;
            }
            flush();
            if (s.is<ForAllStmt>()) {
                scanBlockForRuns(s.as<ForAllStmt>().body, runs);
            } else if (s.is<FixedPointStmt>()) {
                scanBlockForRuns(s.as<FixedPointStmt>().body, runs);
            } else if (s.is<IfStmt>()) {
                scanBlockForRuns(s.as<IfStmt>().thenBlock, runs);
                if (s.as<IfStmt>().elseBlock) scanBlockForRuns(*s.as<IfStmt>().elseBlock, runs);
            }
        }
        flush();
    }
};

}  // namespace

TransferAnalysis analyzeTransfers(AnnotatedProgram& program) { return Analyzer(program).run(); }

std::vector<ReductionInfo> detectReductions(const AnnotatedProgram& program,
                                            const TransferAnalysis& transfers) {
    std::vector<ReductionInfo> out;

    // Map convergence property -> (flag, fp index) for fused-flag marking.
    std::map<int, int> convProps;
    for (size_t i = 0; i < transfers.fixedPoints.size(); ++i)
        convProps[transfers.fixedPoints[i].propertySymbol] = static_cast<int>(i);

    struct Walker {
        const AnnotatedProgram& prog;
        const TransferAnalysis& transfers;
        const std::map<int, int>& convProps;
        std::vector<ReductionInfo>& out;
        int regionId = -1;
        SymbolSet regionLocals;

        void block(const Block& b) {
            for (const auto& s : b.stmts) stmt(*s);
        }

        void stmt(const Stmt& s) {
            if (s.is<DeclStmt>()) {
                if (regionId >= 0) regionLocals.insert(s.as<DeclStmt>().symbol);
                return;
            }
            if (s.is<ReduceAssignStmt>() && regionId >= 0) {
                const auto& r = s.as<ReduceAssignStmt>();
                ReductionInfo info;
                info.targetSymbol = r.target->symbol;
                info.op = r.op;
                info.regionId = regionId;
                info.targetIsRegionLocal = regionLocals.count(r.target->symbol) > 0;
                info.isFixedPointFlag = convProps.count(r.target->symbol) > 0;
                info.span = s.span;
                out.push_back(info);
                return;
            }
            if (s.is<AssignStmt>() && regionId >= 0) {
                const auto& a = s.as<AssignStmt>();
                if (a.target->symbol >= 0 && convProps.count(a.target->symbol)) {
                    ReductionInfo info;
                    info.targetSymbol = a.target->symbol;
                    info.op = ast::ReduceOp::Any;
                    info.regionId = regionId;
                    info.isFixedPointFlag = true;
                    info.span = s.span;
                    out.push_back(info);
                }
                return;
            }
            if (s.is<MinMaxAssignStmt>() && regionId >= 0) {
                const auto& m = s.as<MinMaxAssignStmt>();
                for (const auto& t : m.targets) {
                    if (t->symbol >= 0 && convProps.count(t->symbol)) {
                        ReductionInfo info;
                        info.targetSymbol = t->symbol;
                        info.op = ast::ReduceOp::Any;
                        info.regionId = regionId;
                        info.isFixedPointFlag = true;
                        info.span = s.span;
                        out.push_back(info);
                    }
                }
                return;
            }
            if (s.is<ForAllStmt>()) {
                const auto& f = s.as<ForAllStmt>();
                int saved = regionId;
                SymbolSet savedLocals = regionLocals;
                if (f.regionId >= 0 && regionId < 0) {
                    regionId = f.regionId;
                    regionLocals.clear();
                    regionLocals.insert(f.varSymbol);
                } else if (regionId >= 0) {
                    regionLocals.insert(f.varSymbol);
                }
                block(f.body);
                regionId = saved;
                regionLocals = std::move(savedLocals);
                return;
            }
            if (s.is<IterateBfsStmt>()) {
                const auto& b = s.as<IterateBfsStmt>();
                int saved = regionId;
                SymbolSet savedLocals = regionLocals;
                regionId = b.regionId;
                regionLocals.clear();
                regionLocals.insert(b.varSymbol);
                for (const auto& inner : b.body.stmts)
                    if (!inner->is<IterateRevStmt>()) stmt(*inner);
                for (const auto& inner : b.body.stmts) {
                    if (!inner->is<IterateRevStmt>()) continue;
                    const auto& rev = inner->as<IterateRevStmt>();
                    regionId = rev.regionId;
                    regionLocals.clear();
                    regionLocals.insert(b.varSymbol);
                    block(rev.body);
                }
                regionId = saved;
                regionLocals = std::move(savedLocals);
                return;
            }
            if (s.is<FixedPointStmt>()) return block(s.as<FixedPointStmt>().body);
            if (s.is<IfStmt>()) {
                block(s.as<IfStmt>().thenBlock);
                if (s.as<IfStmt>().elseBlock) block(*s.as<IfStmt>().elseBlock);
                return;
            }
        }
    };

    Walker w{program, transfers, convProps, out};
    w.block(program.entry().body);
    return out;
}

namespace {

std::string joinSymbols(const SymbolSet& set, const SymbolTable& table) {
    std::vector<std::string> names;
    for (int id : set) names.push_back(table.at(id).name);
    std::sort(names.begin(), names.end());
    std::string out;
    for (size_t i = 0; i < names.size(); ++i) {
        if (i) out += ", ";
        out += names[i];
    }
    return out.empty() ? "-" : out;
}

std::string joinArrays(const std::set<GraphArray>& set) {
    std::string out;
    for (auto a : set) {
        if (!out.empty()) out += ", ";
        out += graphArrayName(a);
    }
    return out.empty() ? "-" : out;
}

}  // namespace

std::string formatAnalysisReport(const AnnotatedProgram& program, const TransferAnalysis& transfers,
                                 const std::vector<ReductionInfo>& reductions) {
    std::ostringstream os;
    const auto& table = program.symbols;
    os << "function " << program.entry().name << "\n";
    for (const auto& r : transfers.regions) {
        os << "region " << r.id << " kind=" << regionKindName(r.kind) << " line=" << r.span.line
           << " scope=" << r.scopeId;
        if (r.enclosingFixedPoint >= 0) os << " fixedpoint=" << r.enclosingFixedPoint;
        os << "\n";
        os << "  copy_in: " << joinSymbols(r.copyIn, table) << "\n";
        os << "  copy_out: " << joinSymbols(r.copyOut, table) << "\n";
        os << "  device_only: " << joinSymbols(r.deviceOnly, table) << "\n";
        os << "  graph: " << joinArrays(r.graphArrays) << "\n";
    }
    for (const auto& sc : transfers.scopes) {
        os << "scope " << sc.id << " regions=";
        for (size_t i = 0; i < sc.regions.size(); ++i) {
            if (i) os << ",";
            os << sc.regions[i];
        }
        os << "\n";
        os << "  copy_in: " << joinSymbols(sc.copyIn, table) << "\n";
        os << "  copy_out: " << joinSymbols(sc.copyOut, table) << "\n";
        os << "  graph: " << joinArrays(sc.graphArrays) << "\n";
    }
    for (size_t i = 0; i < transfers.fixedPoints.size(); ++i) {
        const auto& fp = transfers.fixedPoints[i];
        os << "fixedpoint " << i << " flag=" << table.at(fp.flagSymbol).name
           << " property=" << table.at(fp.propertySymbol).name
           << " polarity=" << (fp.convergedWhenAllFalse ? "all-false" : "all-true")
           << " flag_only=" << (fp.flagOnly ? "yes" : "no") << " sites=" << fp.fusedUpdateSites.size()
           << "\n";
    }
    for (const auto& red : reductions) {
        os << "reduction target=" << table.at(red.targetSymbol).name
           << " op=" << ast::reduceOpName(red.op) << " region=" << red.regionId
           << " local=" << (red.targetIsRegionLocal ? "yes" : "no")
           << " fused_flag=" << (red.isFixedPointFlag ? "yes" : "no") << " line=" << red.span.line
           << "\n";
    }
    return os.str();
}

}  // namespace graphdsl::sema
