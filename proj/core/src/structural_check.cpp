#include "graphdsl/structural_check.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "codegen_internal.hpp"

namespace graphdsl::codegen {

using namespace ast;
using sema::Symbol;
using sema::SymbolKind;

namespace {

std::vector<std::string> splitLines(const std::string& text) {
    std::vector<std::string> lines;
    std::string cur;
    for (char c : text) {
        if (c == '\n') {
            lines.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) lines.push_back(cur);
    return lines;
}

std::string stripComment(const std::string& line) {
    size_t pos = line.find("//");
    return pos == std::string::npos ? line : line.substr(0, pos);
}

bool isIdentChar(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

// Whole-token containment: "dist" does not match "gpu_dist" or "distance".
bool containsToken(const std::string& line, const std::string& token) {
    size_t pos = 0;
    while ((pos = line.find(token, pos)) != std::string::npos) {
        bool leftOk = pos == 0 || !isIdentChar(line[pos - 1]);
        size_t end = pos + token.size();
        bool rightOk = end >= line.size() || !isIdentChar(line[end]);
        if (leftOk && rightOk) return true;
        pos = end;
    }
    return false;
}

struct ScannedTransfer {
    std::string symbol;  // host-side name (no device prefix)
    TransferDir dir;
    int line;  // 1-based
};

struct Scan {
    std::vector<std::string> lines;          // comment-stripped
    std::vector<ScannedTransfer> transfers;  // explicit copies + ACC clauses
    std::map<std::string, std::vector<int>> launches;  // kernel name -> lines
    std::set<std::string> kernelDefs;
};

// Brace-matched extent starting at the line that opens a block.
int matchBraces(const std::vector<std::string>& lines, int startLine) {
    int depth = 0;
    bool seen = false;
    for (size_t i = startLine - 1; i < lines.size(); ++i) {
        for (char c : lines[i]) {
            if (c == '{') {
                ++depth;
                seen = true;
            } else if (c == '}') {
                --depth;
            }
        }
        if (seen && depth <= 0) return static_cast<int>(i + 1);
    }
    return static_cast<int>(lines.size());
}

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

// Extracts the argument list of the first call to fn on the line.
std::vector<std::string> callArgs(const std::string& line, const std::string& fn) {
    size_t pos = line.find(fn + "(");
    if (pos == std::string::npos) return {};
    size_t start = pos + fn.size() + 1;
    int depth = 1;
    std::string cur;
    std::vector<std::string> args;
    for (size_t i = start; i < line.size(); ++i) {
        char c = line[i];
        if (c == '(') ++depth;
        if (c == ')') {
            --depth;
            if (depth == 0) {
                args.push_back(trim(cur));
                return args;
            }
        }
        if (c == ',' && depth == 1) {
            args.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    return args;
}

std::string stripPrefix(const std::string& name, const std::string& prefix) {
    if (name.rfind(prefix, 0) == 0) return name.substr(prefix.size());
    return name;
}

std::string firstIdent(const std::string& text) {
    std::string out;
    for (char c : text) {
        if (isIdentChar(c))
            out += c;
        else if (!out.empty())
            break;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Per-backend scanners
// ---------------------------------------------------------------------------

Scan scanCuda(const EmitUnit& unit, const std::string& prefix) {
    Scan scan;
    scan.lines = splitLines(unit.files[0].text);
    for (size_t i = 0; i < scan.lines.size(); ++i) {
        std::string line = stripComment(scan.lines[i]);
        scan.lines[i] = line;
        int lineNo = static_cast<int>(i + 1);
        if (line.find("cudaMemcpy(") != std::string::npos) {
            auto args = callArgs(line, "cudaMemcpy");
            if (args.size() == 4) {
                bool h2d = args[3].find("HostToDevice") != std::string::npos;
                std::string devArg = h2d ? args[0] : args[1];
                std::string sym = stripPrefix(firstIdent(devArg), prefix);
                scan.transfers.push_back(
                    {sym, h2d ? TransferDir::HostToDevice : TransferDir::DeviceToHost, lineNo});
            }
        }
        size_t launch = line.find("<<<");
        if (launch != std::string::npos) {
            std::string name = firstIdent(line);
            scan.launches[name].push_back(lineNo);
        }
        size_t def = line.find("__global__ void ");
        if (def != std::string::npos)
            scan.kernelDefs.insert(firstIdent(line.substr(def + sizeof("__global__ void ") - 1)));
    }
    return scan;
}

Scan scanSycl(const EmitUnit& unit, const std::string& prefix) {
    Scan scan;
    scan.lines = splitLines(unit.files[0].text);
    for (size_t i = 0; i < scan.lines.size(); ++i) {
        std::string line = stripComment(scan.lines[i]);
        scan.lines[i] = line;
        int lineNo = static_cast<int>(i + 1);
        if (line.find("q.memcpy(") != std::string::npos) {
            auto args = callArgs(line, "q.memcpy");
            if (args.size() >= 2) {
                std::string a0 = firstIdent(args[0]);
                std::string a1 = firstIdent(args[1]);
                bool h2d = a0.rfind(prefix, 0) == 0;
                std::string sym = stripPrefix(h2d ? a0 : a1, prefix);
                if (!h2d && a1.rfind(prefix, 0) != 0) continue;  // host-only copy
                // direction: first arg is destination
                if (h2d && a1.rfind(prefix, 0) == 0) {
                    // device-to-device (swap helper); ignore
                    continue;
                }
                scan.transfers.push_back(
                    {h2d ? stripPrefix(a0, prefix) : stripPrefix(a1, prefix),
                     h2d ? TransferDir::HostToDevice : TransferDir::DeviceToHost, lineNo});
            }
        }
        size_t pf = line.find("parallel_for<class ");
        if (pf != std::string::npos) {
            std::string name = firstIdent(line.substr(pf + sizeof("parallel_for<class ") - 1));
            scan.launches[name].push_back(lineNo);
            scan.kernelDefs.insert(name);
        }
    }
    return scan;
}

Scan scanOpenCl(const EmitUnit& unit, const std::string& prefix) {
    Scan scan;
    scan.lines = splitLines(unit.files[0].text);  // host file
    for (size_t i = 0; i < scan.lines.size(); ++i) {
        std::string line = stripComment(scan.lines[i]);
        scan.lines[i] = line;
        int lineNo = static_cast<int>(i + 1);
        if (line.find("clEnqueueWriteBuffer(") != std::string::npos) {
            auto args = callArgs(line, "clEnqueueWriteBuffer");
            if (args.size() >= 2)
                scan.transfers.push_back({stripPrefix(firstIdent(args[1]), prefix),
                                          TransferDir::HostToDevice, lineNo});
        }
        if (line.find("clEnqueueReadBuffer(") != std::string::npos) {
            auto args = callArgs(line, "clEnqueueReadBuffer");
            if (args.size() >= 2)
                scan.transfers.push_back({stripPrefix(firstIdent(args[1]), prefix),
                                          TransferDir::DeviceToHost, lineNo});
        }
        size_t launch = line.find("clEnqueueNDRangeKernel(");
        if (launch != std::string::npos) {
            auto args = callArgs(line, "clEnqueueNDRangeKernel");
            if (args.size() >= 2) {
                std::string kobj = firstIdent(args[1]);
                if (kobj.size() > 5 && kobj.substr(kobj.size() - 5) == "_kobj")
                    scan.launches[kobj.substr(0, kobj.size() - 5)].push_back(lineNo);
            }
        }
    }
    if (unit.files.size() > 1) {
        auto clLines = splitLines(unit.files[1].text);
        for (const auto& raw : clLines) {
            std::string line = stripComment(raw);
            size_t def = line.find("__kernel void ");
            if (def != std::string::npos)
                scan.kernelDefs.insert(firstIdent(line.substr(def + sizeof("__kernel void ") - 1)));
        }
    }
    return scan;
}

// OpenACC: data/update pragmas carry the transfers; `parallel loop` pragmas
// are matched to regions through the loop variable on the following line.
Scan scanOpenAcc(const EmitUnit& unit, const LoweringPlan& plan,
                 const sema::AnnotatedProgram& prog, const Analyses& analyses) {
    Scan scan;
    scan.lines = splitLines(unit.files[0].text);

    auto clauseSymbols = [](const std::string& line, const std::string& clause) {
        std::vector<std::string> out;
        size_t pos = 0;
        while ((pos = line.find(clause + "(", pos)) != std::string::npos) {
            bool leftOk = pos == 0 || !isIdentChar(line[pos - 1]);
            size_t start = pos + clause.size() + 1;
            if (!leftOk) {
                pos = start;
                continue;
            }
            int depth = 1;
            std::string inner;
            size_t i = start;
            for (; i < line.size() && depth > 0; ++i) {
                if (line[i] == '(') ++depth;
                if (line[i] == ')') {
                    --depth;
                    if (depth == 0) break;
                }
                if (depth >= 1) inner += line[i];
            }
            std::string cur;
            for (char c : inner + ",") {
                if (c == ',') {
                    std::string name = firstIdent(trim(cur));
                    if (!name.empty()) out.push_back(name);
                    cur.clear();
                } else {
                    cur += c;
                }
            }
            pos = i;
        }
        return out;
    };

    // Region loop variables in region order, for pragma association. Reverse
    // passes reuse the enclosing BFS iteration variable.
    std::map<int, std::string> regionVar;
    std::string lastBfsVar;
    for (const auto& rp : plan.regions) {
        const Stmt* s = rp.info->stmt;
        if (s->is<ForAllStmt>()) {
            regionVar[rp.info->id] = plan.names.at(s->as<ForAllStmt>().varSymbol);
        } else if (s->is<IterateBfsStmt>()) {
            lastBfsVar = plan.names.at(s->as<IterateBfsStmt>().varSymbol);
            regionVar[rp.info->id] = lastBfsVar;
        } else if (rp.info->kind == sema::RegionKind::BfsReverse) {
            regionVar[rp.info->id] = lastBfsVar;
        }
    }
    (void)prog;
    (void)analyses;

    // Pre-strip comments so brace matching sees clean lines.
    for (auto& line : scan.lines) line = stripComment(line);

    std::vector<std::pair<std::string, int>> pragmaLoops;  // (loop var, line)
    for (size_t i = 0; i < scan.lines.size(); ++i) {
        const std::string& line = scan.lines[i];
        int lineNo = static_cast<int>(i + 1);
        if (line.find("#pragma acc data") != std::string::npos) {
            // The structured region's copy-out happens where it closes.
            int closeLine = matchBraces(scan.lines, lineNo + 1);
            for (const auto& s : clauseSymbols(line, "copyin"))
                scan.transfers.push_back({s, TransferDir::HostToDevice, lineNo});
            for (const auto& s : clauseSymbols(line, "copy")) {
                scan.transfers.push_back({s, TransferDir::HostToDevice, lineNo});
                scan.transfers.push_back({s, TransferDir::DeviceToHost, closeLine});
            }
            for (const auto& s : clauseSymbols(line, "copyout"))
                scan.transfers.push_back({s, TransferDir::DeviceToHost, closeLine});
        }
        if (line.find("#pragma acc update device(") != std::string::npos)
            for (const auto& s : clauseSymbols(line, "device"))
                scan.transfers.push_back({s, TransferDir::HostToDevice, lineNo});
        if (line.find("#pragma acc update self(") != std::string::npos)
            for (const auto& s : clauseSymbols(line, "self"))
                scan.transfers.push_back({s, TransferDir::DeviceToHost, lineNo});
        if (line.find("#pragma acc parallel loop") != std::string::npos) {
            // The loop variable names the region.
            if (i + 1 < scan.lines.size()) {
                const std::string& next = scan.lines[i + 1];
                size_t forPos = next.find("for (int ");
                if (forPos != std::string::npos) {
                    std::string var = firstIdent(next.substr(forPos + sizeof("for (int ") - 1));
                    pragmaLoops.push_back({var, lineNo});
                }
            }
        }
    }

    // Associate pragmas with regions: same variable, in order.
    std::map<std::string, std::vector<int>> byVar;
    for (const auto& [var, line] : pragmaLoops) byVar[var].push_back(line);
    std::map<std::string, size_t> cursor;
    for (const auto& rp : plan.regions) {
        auto it = regionVar.find(rp.info->id);
        if (it == regionVar.end()) continue;
        auto& lines = byVar[it->second];
        size_t& c = cursor[it->second];
        if (c < lines.size()) {
            scan.launches[rp.kernelName].push_back(lines[c]);
            scan.kernelDefs.insert(rp.kernelName);
            ++c;
        }
    }
    return scan;
}

// ---------------------------------------------------------------------------
// Construct walks (what idioms must appear per region)
// ---------------------------------------------------------------------------

struct MinMaxSite {
    int regionId;
    bool isMin;
    TypeKind elem;
    bool targetLocal;
};

void collectMinMax(const sema::AnnotatedProgram& prog, const Analyses& an,
                   std::vector<MinMaxSite>& out) {
    struct W {
        const sema::AnnotatedProgram& prog;
        std::vector<MinMaxSite>& out;
        int region = -1;
        std::set<int> locals;

        void block(const Block& b) {
            for (const auto& s : b.stmts) stmt(*s);
        }
        void stmt(const Stmt& s) {
            if (s.is<DeclStmt>()) {
                if (region >= 0) locals.insert(s.as<DeclStmt>().symbol);
                return;
            }
            if (s.is<MinMaxAssignStmt>() && region >= 0) {
                const auto& m = s.as<MinMaxAssignStmt>();
                const Symbol& ts = prog.symbols.at(m.targets[0]->symbol);
                TypeKind elem =
                    ts.kind == SymbolKind::NodeProperty ? ts.type.element : ts.type.kind;
                bool local = m.targets[0]->is<VarRef>() && locals.count(m.targets[0]->symbol);
                out.push_back({region, m.isMin, elem, local});
                return;
            }
            if (s.is<ForAllStmt>()) {
                const auto& f = s.as<ForAllStmt>();
                int saved = region;
                std::set<int> savedLocals = locals;
                if (f.regionId >= 0 && region < 0) {
                    region = f.regionId;
                    locals.clear();
                }
                locals.insert(f.varSymbol);
                block(f.body);
                region = saved;
                locals = std::move(savedLocals);
                return;
            }
            if (s.is<IterateBfsStmt>()) {
                const auto& b = s.as<IterateBfsStmt>();
                int saved = region;
                region = b.regionId;
                locals.clear();
                locals.insert(b.varSymbol);
                for (const auto& inner : b.body.stmts)
                    if (!inner->is<IterateRevStmt>()) stmt(*inner);
                for (const auto& inner : b.body.stmts) {
                    if (!inner->is<IterateRevStmt>()) continue;
                    region = inner->as<IterateRevStmt>().regionId;
                    locals.clear();
                    locals.insert(b.varSymbol);
                    block(inner->as<IterateRevStmt>().body);
                }
                region = saved;
                return;
            }
            if (s.is<FixedPointStmt>()) return block(s.as<FixedPointStmt>().body);
            if (s.is<IfStmt>()) {
                block(s.as<IfStmt>().thenBlock);
                if (s.as<IfStmt>().elseBlock) block(*s.as<IfStmt>().elseBlock);
            }
        }
    };
    W w{prog, out};
    (void)an;
    w.block(prog.entry().body);
}

// ---------------------------------------------------------------------------
// Checker
// ---------------------------------------------------------------------------

class Checker {
public:
    Checker(const EmitUnit& unit, const sema::AnnotatedProgram& prog, const Analyses& an)
        : unit_(unit), prog_(prog), an_(an) {
        plan_ = buildPlan(prog_, an_, unit.programName.empty() ? "unit" : unit.programName);
    }

    CheckReport run() {
        switch (unit_.backend) {
            case BackendKind::Cuda: scan_ = scanCuda(unit_, prefix()); break;
            case BackendKind::Sycl: scan_ = scanSycl(unit_, prefix()); break;
            case BackendKind::OpenCl: scan_ = scanOpenCl(unit_, prefix()); break;
            case BackendKind::OpenAcc: scan_ = scanOpenAcc(unit_, plan_, prog_, an_); break;
        }
        checkSplitAndLaunches();
        checkTransfers();
        checkGraphArrays();
        checkReductions();
        checkMinMax();
        checkFlagPairing();
        if (unit_.backend == BackendKind::OpenCl) checkOclFloatAtomics();
        return std::move(report_);
    }

private:
    const EmitUnit& unit_;
    const sema::AnnotatedProgram& prog_;
    const Analyses& an_;
    LoweringPlan plan_;
    Scan scan_;
    CheckReport report_;

    std::string prefix() const { return "gpu_"; }
    const std::string& nm(int s) const { return plan_.names.at(s); }
    const Symbol& sym(int id) const { return prog_.symbols.at(id); }

    void violation(const std::string& code, const std::string& message,
                   const std::string& symbol = "") {
        report_.violations.push_back({code, message, unit_.files[0].name, symbol});
    }

    bool isElided(int propSym) const {
        for (const auto& fp : an_.transfers.fixedPoints)
            if (fp.flagOnly && fp.propertySymbol == propSym) return true;
        return false;
    }

    int firstLaunch(const RegionPlan& rp) const {
        auto it = scan_.launches.find(rp.kernelName);
        if (it == launchesEnd() || it->second.empty()) return -1;
        return it->second.front();
    }
    std::map<std::string, std::vector<int>>::const_iterator launchesEnd() const {
        return scan_.launches.end();
    }

    void checkSplitAndLaunches() {
        for (const auto& rp : plan_.regions) {
            if (!scan_.kernelDefs.count(rp.kernelName))
                violation("missing-kernel", "no kernel definition for " + rp.kernelName,
                          rp.kernelName);
            if (firstLaunch(rp) < 0)
                violation("missing-launch", "no launch site for " + rp.kernelName, rp.kernelName);
        }
        if (unit_.backend == BackendKind::OpenCl) {
            // Fig-5 shape: every enqueue pairs with an event wait.
            for (const auto& [name, lines] : scan_.launches) {
                for (int l : lines) {
                    bool waited = false;
                    for (int k = l; k < l + 3 && k <= static_cast<int>(scan_.lines.size()); ++k)
                        if (scan_.lines[k - 1].find("clWaitForEvents") != std::string::npos)
                            waited = true;
                    if (!waited)
                        violation("missing-event-wait",
                                  "launch of " + name + " has no clWaitForEvents", name);
                }
            }
        }
    }

    bool hasTransfer(const std::string& symbol, TransferDir dir, int before, int after) const {
        for (const auto& t : scan_.transfers) {
            if (t.symbol != symbol || t.dir != dir) continue;
            if (before >= 0 && t.line >= before) continue;
            if (after >= 0 && t.line <= after) continue;
            return true;
        }
        return false;
    }

    void checkTransfers() {
        std::set<int> fpFlags;
        for (const auto& fp : an_.transfers.fixedPoints) fpFlags.insert(fp.flagSymbol);

        for (const auto& rp : plan_.regions) {
            int launch = firstLaunch(rp);
            if (launch < 0) continue;  // already reported
            for (int id : rp.info->copyIn) {
                if (isElided(id)) continue;
                const Symbol& s = sym(id);
                bool written = rp.info->copyOut.count(id) > 0;
                if (s.kind != SymbolKind::NodeProperty && !written) {
                    // Read-only scalar: passed at the launch site. OpenACC
                    // firstprivate and SYCL lambda capture are implicit.
                    if (unit_.backend == BackendKind::OpenAcc ||
                        unit_.backend == BackendKind::Sycl)
                        continue;
                    if (!launchMentions(rp, id))
                        violation("missing-scalar-arg",
                                  "read-only scalar '" + nm(id) + "' not passed to " +
                                      rp.kernelName,
                                  nm(id));
                    continue;
                }
                if (!hasTransfer(nm(id), TransferDir::HostToDevice, launch, -1))
                    violation("missing-h2d",
                              "no host-to-device transfer for '" + nm(id) + "' before " +
                                  rp.kernelName,
                              nm(id));
            }
            for (int id : rp.info->copyOut) {
                if (isElided(id)) continue;
                if (!hasTransfer(nm(id), TransferDir::DeviceToHost, -1, launch))
                    violation("missing-d2h",
                              "no device-to-host transfer for '" + nm(id) + "' after " +
                                  rp.kernelName,
                              nm(id));
            }
        }
    }

    bool launchMentions(const RegionPlan& rp, int symbol) const {
        auto it = scan_.launches.find(rp.kernelName);
        if (it == scan_.launches.end()) return false;
        const std::string& name = nm(symbol);
        for (int l : it->second) {
            if (unit_.backend == BackendKind::OpenCl) {
                // The clSetKernelArg block precedes the enqueue.
                for (int k = std::max(1, l - 40); k < l; ++k)
                    if (scan_.lines[k - 1].find("clSetKernelArg") != std::string::npos &&
                        containsToken(scan_.lines[k - 1], name))
                        return true;
            } else if (containsToken(scan_.lines[l - 1], name)) {
                return true;
            }
        }
        return false;
    }

    void checkGraphArrays() {
        static const char* kGraphNames[] = {"offsets",     "dests",    "weights",
                                            "rev_offsets", "rev_srcs", "rev_eid"};
        std::set<std::string> graphNames(std::begin(kGraphNames), std::end(kGraphNames));
        std::set<std::string> used;
        for (const auto& rp : plan_.regions)
            for (auto a : rp.info->graphArrays) used.insert(graphArrayName(a));
        for (const auto& name : used) {
            if (!hasTransfer(name, TransferDir::HostToDevice, -1, -1))
                violation("missing-graph-h2d", "graph array '" + name + "' never copied in", name);
        }
        for (const auto& t : scan_.transfers)
            if (t.dir == TransferDir::DeviceToHost && graphNames.count(t.symbol))
                violation("graph-copy-out",
                          "static graph array '" + t.symbol + "' copied back to the host",
                          t.symbol);
    }

    // Text extent for region-scoped token searches.
    std::pair<int, int> regionExtent(const RegionPlan& rp) const {
        if (unit_.backend == BackendKind::Cuda || unit_.backend == BackendKind::OpenCl) {
            // Kernel definition extent in the kernel file text.
            const std::string& text = unit_.backend == BackendKind::Cuda
                                          ? unit_.files[0].text
                                          : unit_.files[1].text;
            auto lines = splitLines(text);
            std::string marker = unit_.backend == BackendKind::Cuda ? "__global__ void " +
                                                                          rp.kernelName
                                                                    : "__kernel void " +
                                                                          rp.kernelName;
            for (size_t i = 0; i < lines.size(); ++i) {
                if (lines[i].find(marker) != std::string::npos) {
                    int end = matchBraces(lines, static_cast<int>(i + 1));
                    return {static_cast<int>(i + 1), end};
                }
            }
            return {-1, -1};
        }
        // SYCL / OpenACC: brace-match from the launch line.
        auto it = scan_.launches.find(rp.kernelName);
        if (it == scan_.launches.end() || it->second.empty()) return {-1, -1};
        int start = it->second.front();
        // OpenACC pragma line opens no brace; start at the following for.
        if (unit_.backend == BackendKind::OpenAcc) ++start;
        int end = matchBraces(scan_.lines, start);
        return {start, end};
    }

    const std::vector<std::string>& regionLines(const RegionPlan& rp,
                                                std::vector<std::string>& storage) const {
        if (unit_.backend == BackendKind::OpenCl) {
            storage = splitLines(unit_.files[1].text);
            return storage;
        }
        if (unit_.backend == BackendKind::Cuda) {
            storage = splitLines(unit_.files[0].text);
            return storage;
        }
        (void)rp;
        storage = scan_.lines;
        return storage;
    }

    bool tokenInRegion(const RegionPlan& rp, const std::string& token) {
        return tokenCountInRegion(rp, token) > 0;
    }

    int tokenCountInRegion(const RegionPlan& rp, const std::string& token) {
        auto [begin, end] = regionExtent(rp);
        if (begin < 0) return 0;
        std::vector<std::string> storage;
        const auto& lines = regionLines(rp, storage);
        int count = 0;
        for (int l = begin; l <= end && l <= static_cast<int>(lines.size()); ++l) {
            const std::string line = stripComment(lines[l - 1]);
            size_t pos = 0;
            while ((pos = line.find(token, pos)) != std::string::npos) {
                ++count;
                pos += token.size();
            }
        }
        return count;
    }

    void checkReductions() {
        // An idiom token can satisfy only one construct: requirements are
        // counted per region so a swapped occurrence is still caught when
        // several reductions share one kernel.
        std::map<std::pair<int, std::string>, int> required;
        for (const auto& red : an_.reductions) {
            if (red.targetIsRegionLocal) continue;
            const RegionPlan* rp = nullptr;
            for (const auto& r : plan_.regions)
                if (r.info->id == red.regionId) rp = &r;
            if (!rp) continue;

            if (red.isFixedPointFlag) {
                // Fused OR-flag write: the kernel clears the device flag.
                const sema::FixedPointInfo* fp = nullptr;
                for (const auto& f : an_.transfers.fixedPoints)
                    for (int rid : f.regionIds)
                        if (rid == red.regionId) fp = &f;
                if (!fp) continue;
                std::string flagClear;
                switch (unit_.backend) {
                    case BackendKind::Cuda:
                    case BackendKind::Sycl:
                        flagClear = "*" + prefix() + nm(fp->flagSymbol) + " = false;";
                        break;
                    case BackendKind::OpenCl:
                        flagClear = prefix() + nm(fp->flagSymbol) + "[0] = 0;";
                        break;
                    case BackendKind::OpenAcc:
                        flagClear = nm(fp->flagSymbol) + " = false;";
                        break;
                }
                if (!tokenInRegion(*rp, flagClear))
                    violation("missing-flag-fuse",
                              "region " + rp->kernelName + " never clears the convergence flag '" +
                                  nm(fp->flagSymbol) + "'",
                              nm(fp->flagSymbol));
                continue;
            }

            const Symbol& ts = sym(red.targetSymbol);
            TypeKind elem = ts.kind == SymbolKind::NodeProperty ? ts.type.element : ts.type.kind;
            bool isProp = ts.kind == SymbolKind::NodeProperty;
            if (red.op != ReduceOp::Sum && red.op != ReduceOp::Count &&
                red.op != ReduceOp::Product)
                continue;  // bool reductions use flag-style stores

            std::string needed;
            switch (unit_.backend) {
                case BackendKind::Cuda:
                    needed = red.op == ReduceOp::Product ? "graphdsl_atomic_mul" : "atomicAdd";
                    break;
                case BackendKind::Sycl: needed = "fetch_add"; break;
                case BackendKind::OpenCl:
                    if (isFloatElem(elem))
                        needed = "graphdsl_atomic_add_double";
                    else if (elem == TypeKind::Long)
                        needed = "atom_add";
                    else
                        needed = "atomic_add";
                    break;
                case BackendKind::OpenAcc:
                    if (isProp) {
                        required[{red.regionId, "#pragma acc atomic update"}]++;
                    } else {
                        auto it = scan_.launches.find(rp->kernelName);
                        bool found = false;
                        if (it != scan_.launches.end())
                            for (int l : it->second)
                                if (scan_.lines[l - 1].find("reduction(") != std::string::npos &&
                                    containsToken(scan_.lines[l - 1], nm(red.targetSymbol)))
                                    found = true;
                        if (!found)
                            violation("missing-reduction-clause",
                                      "loop for " + rp->kernelName + " lacks reduction(" +
                                          nm(red.targetSymbol) + ")",
                                      nm(red.targetSymbol));
                    }
                    continue;
            }
            required[{red.regionId, needed}]++;
        }
        for (const auto& [key, count] : required) {
            const RegionPlan* rp = nullptr;
            for (const auto& r : plan_.regions)
                if (r.info->id == key.first) rp = &r;
            if (!rp) continue;
            int have = tokenCountInRegion(*rp, key.second);
            if (have < count)
                violation("missing-atomic",
                          rp->kernelName + " has " + std::to_string(have) + " of " +
                              std::to_string(count) + " required '" + key.second + "' idioms",
                          key.second);
        }
    }

    void checkMinMax() {
        std::vector<MinMaxSite> sites;
        collectMinMax(prog_, an_, sites);
        std::map<std::pair<int, std::string>, int> required;
        for (const auto& site : sites) {
            if (site.targetLocal) continue;
            std::string needed;
            switch (unit_.backend) {
                case BackendKind::Cuda:
                    needed = isFloatElem(site.elem)
                                 ? (site.isMin ? "graphdsl_atomic_min_double"
                                               : "graphdsl_atomic_max_double")
                                 : (site.isMin ? "atomicMin" : "atomicMax");
                    break;
                case BackendKind::Sycl: needed = site.isMin ? "fetch_min" : "fetch_max"; break;
                case BackendKind::OpenCl:
                    needed = isFloatElem(site.elem)
                                 ? (site.isMin ? "graphdsl_atomic_min_double"
                                               : "graphdsl_atomic_max_double")
                                 : (site.isMin ? "atomic_min" : "atomic_max");
                    if (site.elem == TypeKind::Long) needed = site.isMin ? "atom_min" : "atom_max";
                    break;
                case BackendKind::OpenAcc: needed = "#pragma acc atomic write"; break;
            }
            required[{site.regionId, needed}]++;
        }
        for (const auto& [key, count] : required) {
            const RegionPlan* rp = nullptr;
            for (const auto& r : plan_.regions)
                if (r.info->id == key.first) rp = &r;
            if (!rp) continue;
            int have = tokenCountInRegion(*rp, key.second);
            if (have < count)
                violation("missing-minmax-idiom",
                          rp->kernelName + " has " + std::to_string(have) + " of " +
                              std::to_string(count) + " required '" + key.second + "' idioms",
                          key.second);
        }
    }

    void checkFlagPairing() {
        // fixedPoint flags.
        for (const auto& fp : an_.transfers.fixedPoints) {
            if (fp.regionIds.empty()) continue;
            checkLoopFlag(nm(fp.flagSymbol), "while (!" + nm(fp.flagSymbol) + ")");
        }
        // BFS finished flags.
        for (const auto& [stmt, names] : plan_.bfsNames)
            checkLoopFlag(names.finished, "} while (!" + names.finished + ");");
    }

    void checkLoopFlag(const std::string& flag, const std::string& marker) {
        int begin = -1, end = -1;
        for (size_t i = 0; i < scan_.lines.size(); ++i) {
            if (scan_.lines[i].find(marker) == std::string::npos) continue;
            if (marker.rfind("} while", 0) == 0) {
                // do-while: search backwards for the opening `do {`.
                end = static_cast<int>(i + 1);
                int depth = 0;
                for (int k = end; k >= 1; --k) {
                    for (auto it = scan_.lines[k - 1].rbegin(); it != scan_.lines[k - 1].rend();
                         ++it) {
                        if (*it == '}') ++depth;
                        if (*it == '{') --depth;
                    }
                    if (depth <= 0 && scan_.lines[k - 1].find("do {") != std::string::npos) {
                        begin = k;
                        break;
                    }
                }
            } else {
                begin = static_cast<int>(i + 1);
                end = matchBraces(scan_.lines, begin);
            }
            break;
        }
        if (begin < 0) {
            violation("missing-loop", "no convergence loop found for flag '" + flag + "'", flag);
            return;
        }
        bool h2d = hasTransfer(flag, TransferDir::HostToDevice, end + 1, begin - 1);
        bool d2h = hasTransfer(flag, TransferDir::DeviceToHost, end + 1, begin - 1);
        if (!h2d)
            violation("missing-flag-h2d",
                      "flag '" + flag + "' is not copied to the device inside its loop", flag);
        if (!d2h)
            violation("missing-flag-d2h",
                      "flag '" + flag + "' is not copied back inside its loop", flag);
    }

    void checkOclFloatAtomics() {
        // Float/double atomics must go through the cmpxchg emulation.
        if (unit_.files.size() < 2) return;
        std::set<std::string> floatArrays;
        for (const auto& s : prog_.symbols.all()) {
            TypeKind elem = s.kind == SymbolKind::NodeProperty ? s.type.element : s.type.kind;
            if (isFloatElem(elem)) floatArrays.insert(prefix() + plan_.names.at(s.id));
        }
        auto lines = splitLines(unit_.files[1].text);
        for (size_t i = 0; i < lines.size(); ++i) {
            std::string line = stripComment(lines[i]);
            for (const char* bad : {"atomic_add(", "atom_add(", "atomic_min(", "atom_min(",
                                    "atomic_max(", "atom_max("}) {
                size_t pos = line.find(bad);
                if (pos == std::string::npos) continue;
                for (const auto& arr : floatArrays)
                    if (containsToken(line.substr(pos), arr))
                        violation("float-atomic",
                                  "float atomics must use atomic_cmpxchg emulation (line " +
                                      std::to_string(i + 1) + " of " + unit_.files[1].name + ")",
                                  arr);
            }
        }
    }
};

}  // namespace

CheckReport structuralCheck(const EmitUnit& unit, const sema::AnnotatedProgram& program,
                            const Analyses& analyses) {
    try {
        return Checker(unit, program, analyses).run();
    } catch (const std::exception& e) {
        CheckReport report;
        report.violations.push_back({"checker-error", e.what(), "", ""});
        return report;
    }
}

std::string formatReport(const CheckReport& report) {
    std::ostringstream os;
    if (report.ok()) {
        os << "structural check: 0 violations\n";
        return os.str();
    }
    os << "structural check: " << report.violations.size() << " violation(s)\n";
    for (const auto& v : report.violations)
        os << "  [" << v.code << "] " << v.message << "\n";
    return os.str();
}

}  // namespace graphdsl::codegen
