#include "graphdsl/interpreter.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <condition_variable>
#include <cstring>
#include <functional>
#include <mutex>
#include <thread>

#include "graphdsl/oracles.hpp"

namespace graphdsl::interp {

using namespace ast;
using sema::Symbol;
using sema::SymbolKind;

std::string formatValue(const Value& v) {
    switch (v.kind) {
        case Value::Kind::Int: return std::to_string(v.i);
        case Value::Kind::Bool: return v.b ? "true" : "false";
        case Value::Kind::Float: {
            char buf[64];
            auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v.f);
            return std::string(buf, p);
        }
    }
    return "?";
}

Value ScalarCell::load() const {
    if (type == TypeKind::Bool) return Value::ofBool(b != 0);
    if (type == TypeKind::Float || type == TypeKind::Double) return Value::ofFloat(f);
    return Value::ofInt(i);
}

void ScalarCell::store(const Value& v) {
    if (type == TypeKind::Bool)
        b = v.asBool() ? 1 : 0;
    else if (type == TypeKind::Float || type == TypeKind::Double)
        f = v.asFloat();
    else
        i = v.asInt();
}

const PropArray* RunResult::property(const sema::SymbolTable& syms, const std::string& name) const {
    for (const auto& [id, arr] : properties)
        if (syms.at(id).name == name) return &arr;
    return nullptr;
}

std::optional<Value> RunResult::scalar(const sema::SymbolTable& syms,
                                       const std::string& name) const {
    for (const auto& [id, cell] : scalars)
        if (syms.at(id).name == name) return cell.load();
    return std::nullopt;
}

namespace {

constexpr int64_t kInf = oracles::kInfiniteDistance;

bool isFloatKind(TypeKind k) { return k == TypeKind::Float || k == TypeKind::Double; }

// ---------------------------------------------------------------------------
// Worker pool (confined to one run() call)
// ---------------------------------------------------------------------------

class WorkerPool {
public:
    explicit WorkerPool(int threads) : threadCount_(std::max(1, threads)) {
        for (int t = 1; t < threadCount_; ++t)
            workers_.emplace_back([this, t] { workerLoop(t); });
    }

    ~WorkerPool() {
        {
            std::lock_guard<std::mutex> lock(mu_);
            stop_ = true;
        }
        cv_.notify_all();
        for (auto& w : workers_) w.join();
    }

    int threads() const { return threadCount_; }

    // Splits [0, count) into one contiguous chunk per thread; fn may be
    // called concurrently. Rethrows the first worker exception.
    void parallelFor(size_t count, const std::function<void(int thread, size_t b, size_t e)>& fn) {
        if (count == 0) return;
        {
            std::lock_guard<std::mutex> lock(mu_);
            job_ = &fn;
            jobCount_ = count;
            pending_ = threadCount_ - 1;
            ++generation_;
        }
        cv_.notify_all();
        runChunk(0);
        std::unique_lock<std::mutex> lock(mu_);
        doneCv_.wait(lock, [this] { return pending_ == 0; });
        job_ = nullptr;
        if (error_) {
            auto e = error_;
            error_ = nullptr;
            std::rethrow_exception(e);
        }
    }

private:
    void runChunk(int thread) {
        size_t per = (jobCount_ + threadCount_ - 1) / threadCount_;
        size_t b = per * thread;
        size_t e = std::min(jobCount_, b + per);
        if (b >= e) return;
        try {
            (*job_)(thread, b, e);
        } catch (...) {
            std::lock_guard<std::mutex> lock(mu_);
            if (!error_) error_ = std::current_exception();
        }
    }

    void workerLoop(int thread) {
        uint64_t seen = 0;
        while (true) {
            std::unique_lock<std::mutex> lock(mu_);
            cv_.wait(lock, [&] { return stop_ || generation_ != seen; });
            if (stop_) return;
            seen = generation_;
            lock.unlock();
            runChunk(thread);
            lock.lock();
            if (--pending_ == 0) doneCv_.notify_all();
        }
    }

    int threadCount_;
    std::vector<std::thread> workers_;
    std::mutex mu_;
    std::condition_variable cv_, doneCv_;
    const std::function<void(int, size_t, size_t)>* job_ = nullptr;
    size_t jobCount_ = 0;
    int pending_ = 0;
    uint64_t generation_ = 0;
    bool stop_ = false;
    std::exception_ptr error_;
};

// ---------------------------------------------------------------------------
// Atomic helpers (parallel passes route element access through these)
// ---------------------------------------------------------------------------

int64_t loadI64(int64_t& ref, bool atomic) {
    return atomic ? std::atomic_ref<int64_t>(ref).load(std::memory_order_relaxed) : ref;
}
double loadF64(double& ref, bool atomic) {
    return atomic ? std::atomic_ref<double>(ref).load(std::memory_order_relaxed) : ref;
}
uint8_t loadU8(uint8_t& ref, bool atomic) {
    return atomic ? std::atomic_ref<uint8_t>(ref).load(std::memory_order_relaxed) : ref;
}
void storeI64(int64_t& ref, int64_t v, bool atomic) {
    if (atomic)
        std::atomic_ref<int64_t>(ref).store(v, std::memory_order_relaxed);
    else
        ref = v;
}
void storeF64(double& ref, double v, bool atomic) {
    if (atomic)
        std::atomic_ref<double>(ref).store(v, std::memory_order_relaxed);
    else
        ref = v;
}
void storeU8(uint8_t& ref, uint8_t v, bool atomic) {
    if (atomic)
        std::atomic_ref<uint8_t>(ref).store(v, std::memory_order_relaxed);
    else
        ref = v;
}

void addI64(int64_t& ref, int64_t v, bool atomic) {
    if (atomic)
        std::atomic_ref<int64_t>(ref).fetch_add(v, std::memory_order_relaxed);
    else
        ref += v;
}
void addF64(double& ref, double v, bool atomic) {
    if (!atomic) {
        ref += v;
        return;
    }
    std::atomic_ref<double> a(ref);
    double cur = a.load(std::memory_order_relaxed);
    while (!a.compare_exchange_weak(cur, cur + v, std::memory_order_relaxed)) {
    }
}
void mulI64(int64_t& ref, int64_t v, bool atomic) {
    if (!atomic) {
        ref *= v;
        return;
    }
    std::atomic_ref<int64_t> a(ref);
    int64_t cur = a.load(std::memory_order_relaxed);
    while (!a.compare_exchange_weak(cur, cur * v, std::memory_order_relaxed)) {
    }
}
void mulF64(double& ref, double v, bool atomic) {
    if (!atomic) {
        ref *= v;
        return;
    }
    std::atomic_ref<double> a(ref);
    double cur = a.load(std::memory_order_relaxed);
    while (!a.compare_exchange_weak(cur, cur * v, std::memory_order_relaxed)) {
    }
}
void andU8(uint8_t& ref, uint8_t v, bool atomic) {
    if (atomic)
        std::atomic_ref<uint8_t>(ref).fetch_and(v, std::memory_order_relaxed);
    else
        ref = ref & v;
}
void orU8(uint8_t& ref, uint8_t v, bool atomic) {
    if (atomic)
        std::atomic_ref<uint8_t>(ref).fetch_or(v, std::memory_order_relaxed);
    else
        ref = ref | v;
}

// Returns true when this call improved (and stored) the value.
bool minMaxI64(int64_t& ref, int64_t cand, bool isMin, bool atomic) {
    if (!atomic) {
        if (isMin ? cand < ref : cand > ref) {
            ref = cand;
            return true;
        }
        return false;
    }
    std::atomic_ref<int64_t> a(ref);
    int64_t cur = a.load(std::memory_order_relaxed);
    while (isMin ? cand < cur : cand > cur) {
        if (a.compare_exchange_weak(cur, cand, std::memory_order_relaxed)) return true;
    }
    return false;
}
bool minMaxF64(double& ref, double cand, bool isMin, bool atomic) {
    if (!atomic) {
        if (isMin ? cand < ref : cand > ref) {
            ref = cand;
            return true;
        }
        return false;
    }
    std::atomic_ref<double> a(ref);
    double cur = a.load(std::memory_order_relaxed);
    while (isMin ? cand < cur : cand > cur) {
        if (a.compare_exchange_weak(cur, cand, std::memory_order_relaxed)) return true;
    }
    return false;
}

// ---------------------------------------------------------------------------
// Machine
// ---------------------------------------------------------------------------

struct Flow {
    bool returned = false;
    Value value;
};

// Double-buffered convergence property of the active fixedPoint: reads see
// the current round, writes go to the next round and fuse into the OR flag.
struct FpState {
    int propSymbol = -1;
    bool convergedValue = false;  // value meaning "converged" for one node
    std::vector<uint8_t> next;
    std::atomic<bool> anyNonConverged{false};
};

struct BfsState {
    int varSymbol = -1;
    const BfsContext* ctx = nullptr;
};

class Machine {
public:
    Machine(const sema::AnnotatedProgram& prog, const CsrGraph& graph, const ArgMap& args,
            const RunOptions& opts)
        : prog_(prog), g_(graph), args_(args), opts_(opts) {}

    RunResult execute();

private:
    const sema::AnnotatedProgram& prog_;
    const CsrGraph& g_;
    const ArgMap& args_;
    const RunOptions& opts_;

    RunResult result_;
    std::unique_ptr<WorkerPool> pool_;
    FpState* activeFp_ = nullptr;
    BfsState* activeBfs_ = nullptr;
    const sema::RegionInfo* activeRegion_ = nullptr;
    std::mutex violationMu_;

    struct Ctx {
        // Thread-local frames for device-side locals; host-level state lives
        // in the shared store.
        std::vector<std::map<int, Value>> frames;
        bool device = false;
        bool atomicPass = false;
    };

    const Symbol& sym(int id) const { return prog_.symbols.at(id); }

    [[noreturn]] void rt(SourceSpan span, const std::string& msg) const {
        throw runtimeError(span, msg);
    }

    bool parallel() const { return opts_.mode == ExecMode::Parallel; }

    // ---- store access ----

    PropArray& propArray(int symbol, SourceSpan span) {
        auto it = result_.properties.find(symbol);
        if (it == result_.properties.end())
            rt(span, "property '" + sym(symbol).name + "' accessed before its declaration");
        return it->second;
    }

    void createProperty(int symbol) {
        const Symbol& s = sym(symbol);
        PropArray arr;
        arr.elem = s.type.element;
        size_t n = static_cast<size_t>(g_.nodeCount());
        if (arr.elem == TypeKind::Bool)
            arr.bools.assign(n, 0);
        else if (isFloatKind(arr.elem))
            arr.floats.assign(n, 0.0);
        else
            arr.ints.assign(n, 0);
        result_.properties[symbol] = std::move(arr);
    }

    void createScalar(int symbol) {
        const Symbol& s = sym(symbol);
        ScalarCell cell;
        cell.type = s.kind == SymbolKind::Node || s.kind == SymbolKind::Edge ? TypeKind::Int
                                                                             : s.type.kind;
        result_.scalars[symbol] = cell;
    }

    void checkMaterialized(int symbol, SourceSpan span) {
        if (!activeRegion_ || !opts_.instrumentTransfers) return;
        if (activeRegion_->copyIn.count(symbol)) return;
        std::lock_guard<std::mutex> lock(violationMu_);
        result_.transferViolations.push_back(
            "region " + std::to_string(activeRegion_->id) + " reads unmaterialized symbol '" +
            sym(symbol).name + "' at line " + std::to_string(span.line));
    }

    Value readScalar(int symbol, SourceSpan span, Ctx& ctx) {
        for (auto it = ctx.frames.rbegin(); it != ctx.frames.rend(); ++it) {
            auto f = it->find(symbol);
            if (f != it->end()) return f->second;
        }
        auto it = result_.scalars.find(symbol);
        if (it == result_.scalars.end())
            rt(span, "variable '" + sym(symbol).name + "' used before its declaration");
        if (ctx.device) checkMaterialized(symbol, span);
        ScalarCell& cell = it->second;
        if (cell.type == TypeKind::Bool) return Value::ofBool(loadU8(cell.b, ctx.atomicPass) != 0);
        if (isFloatKind(cell.type)) return Value::ofFloat(loadF64(cell.f, ctx.atomicPass));
        return Value::ofInt(loadI64(cell.i, ctx.atomicPass));
    }

    void writeScalar(int symbol, const Value& v, SourceSpan span, Ctx& ctx) {
        for (auto it = ctx.frames.rbegin(); it != ctx.frames.rend(); ++it) {
            auto f = it->find(symbol);
            if (f != it->end()) {
                f->second = coerce(v, f->second.kind);
                return;
            }
        }
        auto it = result_.scalars.find(symbol);
        if (it == result_.scalars.end())
            rt(span, "variable '" + sym(symbol).name + "' assigned before its declaration");
        ScalarCell& cell = it->second;
        if (cell.type == TypeKind::Bool)
            storeU8(cell.b, v.asBool() ? 1 : 0, ctx.atomicPass);
        else if (isFloatKind(cell.type))
            storeF64(cell.f, v.asFloat(), ctx.atomicPass);
        else
            storeI64(cell.i, v.asInt(), ctx.atomicPass);
    }

    static Value coerce(const Value& v, Value::Kind kind) {
        if (v.kind == kind) return v;
        if (kind == Value::Kind::Float) return Value::ofFloat(v.asFloat());
        if (kind == Value::Kind::Int) return Value::ofInt(v.asInt());
        return Value::ofBool(v.asBool());
    }

    int32_t checkNodeId(int64_t id, SourceSpan span) {
        if (id < 0 || id >= g_.nodeCount())
            rt(span, "node id " + std::to_string(id) + " out of range [0, " +
                         std::to_string(g_.nodeCount()) + ")");
        return static_cast<int32_t>(id);
    }

    Value readNodeProp(int symbol, int64_t node, SourceSpan span, Ctx& ctx) {
        int32_t v = checkNodeId(node, span);
        if (ctx.device) checkMaterialized(symbol, span);
        PropArray& arr = propArray(symbol, span);
        if (arr.elem == TypeKind::Bool) return Value::ofBool(loadU8(arr.bools[v], ctx.atomicPass) != 0);
        if (isFloatKind(arr.elem)) return Value::ofFloat(loadF64(arr.floats[v], ctx.atomicPass));
        return Value::ofInt(loadI64(arr.ints[v], ctx.atomicPass));
    }

    void writeNodeProp(int symbol, int64_t node, const Value& val, SourceSpan span, Ctx& ctx) {
        int32_t v = checkNodeId(node, span);
        // Writes to the active fixedPoint's convergence property double-buffer
        // into the next round and fuse into the OR flag.
        if (activeFp_ && symbol == activeFp_->propSymbol) {
            bool bit = val.asBool();
            storeU8(activeFp_->next[v], bit ? 1 : 0, ctx.atomicPass);
            if (bit != activeFp_->convergedValue)
                activeFp_->anyNonConverged.store(true, std::memory_order_relaxed);
            return;
        }
        PropArray& arr = propArray(symbol, span);
        if (arr.elem == TypeKind::Bool)
            storeU8(arr.bools[v], val.asBool() ? 1 : 0, ctx.atomicPass);
        else if (isFloatKind(arr.elem))
            storeF64(arr.floats[v], val.asFloat(), ctx.atomicPass);
        else
            storeI64(arr.ints[v], val.asInt(), ctx.atomicPass);
    }

    // ---- expressions ----

    Value eval(const Expr& e, Ctx& ctx) {
        if (e.is<IntLit>()) return Value::ofInt(e.as<IntLit>().value);
        if (e.is<FloatLit>()) return Value::ofFloat(e.as<FloatLit>().value);
        if (e.is<BoolLit>()) return Value::ofBool(e.as<BoolLit>().value);
        if (e.is<InfLit>()) return Value::ofInt(kInf);
        if (e.is<VarRef>()) return readScalar(e.symbol, e.span, ctx);
        if (e.is<PropAccess>()) {
            const auto& p = e.as<PropAccess>();
            Value obj = eval(*p.object, ctx);
            const Symbol& propSym = sym(e.symbol);
            if (propSym.kind == SymbolKind::EdgeProperty) {
                int64_t eid = obj.asInt();
                if (eid < 0 || eid >= g_.edgeCount()) rt(e.span, "edge id out of range");
                return Value::ofInt(g_.weights()[static_cast<size_t>(eid)]);
            }
            return readNodeProp(e.symbol, obj.asInt(), e.span, ctx);
        }
        if (e.is<UnaryExpr>()) {
            const auto& u = e.as<UnaryExpr>();
            Value v = eval(*u.operand, ctx);
            if (u.op == UnaryOp::Not) return Value::ofBool(!v.asBool());
            if (v.kind == Value::Kind::Float) return Value::ofFloat(-v.f);
            return Value::ofInt(-v.i);
        }
        if (e.is<BinaryExpr>()) return evalBinary(e, ctx);
        if (e.is<MethodCall>()) return evalCall(e, ctx);
        rt(e.span, "unsupported expression");
    }

    Value evalBinary(const Expr& e, Ctx& ctx) {
        const auto& b = e.as<BinaryExpr>();
        // Short-circuit logical operators.
        if (b.op == BinaryOp::And) {
            if (!eval(*b.lhs, ctx).asBool()) return Value::ofBool(false);
            return Value::ofBool(eval(*b.rhs, ctx).asBool());
        }
        if (b.op == BinaryOp::Or) {
            if (eval(*b.lhs, ctx).asBool()) return Value::ofBool(true);
            return Value::ofBool(eval(*b.rhs, ctx).asBool());
        }
        Value l = eval(*b.lhs, ctx);
        Value r = eval(*b.rhs, ctx);
        bool anyFloat = l.kind == Value::Kind::Float || r.kind == Value::Kind::Float;
        switch (b.op) {
            case BinaryOp::Add:
                return anyFloat ? Value::ofFloat(l.asFloat() + r.asFloat())
                                : Value::ofInt(l.i + r.i);
            case BinaryOp::Sub:
                return anyFloat ? Value::ofFloat(l.asFloat() - r.asFloat())
                                : Value::ofInt(l.i - r.i);
            case BinaryOp::Mul:
                return anyFloat ? Value::ofFloat(l.asFloat() * r.asFloat())
                                : Value::ofInt(l.i * r.i);
            case BinaryOp::Div:
                if (anyFloat) {
                    double d = r.asFloat();
                    if (d == 0.0) rt(e.span, "division by zero");
                    return Value::ofFloat(l.asFloat() / d);
                }
                if (r.i == 0) rt(e.span, "division by zero");
                return Value::ofInt(l.i / r.i);
            case BinaryOp::Lt:
                return Value::ofBool(anyFloat ? l.asFloat() < r.asFloat() : l.i < r.i);
            case BinaryOp::Le:
                return Value::ofBool(anyFloat ? l.asFloat() <= r.asFloat() : l.i <= r.i);
            case BinaryOp::Gt:
                return Value::ofBool(anyFloat ? l.asFloat() > r.asFloat() : l.i > r.i);
            case BinaryOp::Ge:
                return Value::ofBool(anyFloat ? l.asFloat() >= r.asFloat() : l.i >= r.i);
            case BinaryOp::Eq:
                if (l.kind == Value::Kind::Bool) return Value::ofBool(l.b == r.b);
                return Value::ofBool(anyFloat ? l.asFloat() == r.asFloat() : l.i == r.i);
            case BinaryOp::Ne:
                if (l.kind == Value::Kind::Bool) return Value::ofBool(l.b != r.b);
                return Value::ofBool(anyFloat ? l.asFloat() != r.asFloat() : l.i != r.i);
            default: rt(e.span, "unsupported operator");
        }
    }

    Value evalCall(const Expr& e, Ctx& ctx) {
        const auto& m = e.as<MethodCall>();
        if (m.method == "num_nodes") return Value::ofInt(g_.nodeCount());
        if (m.method == "count_outNbrs") {
            int32_t v = checkNodeId(eval(*m.args[0], ctx).asInt(), e.span);
            return Value::ofInt(g_.outDegree(v));
        }
        if (m.method == "is_an_edge") {
            int32_t u = checkNodeId(eval(*m.args[0], ctx).asInt(), e.span);
            int32_t v = checkNodeId(eval(*m.args[1], ctx).asInt(), e.span);
            return Value::ofBool(g_.isEdge(u, v));
        }
        if (m.method == "get_edge") {
            int32_t u = checkNodeId(eval(*m.args[0], ctx).asInt(), e.span);
            int32_t v = checkNodeId(eval(*m.args[1], ctx).asInt(), e.span);
            auto idx = g_.edgeIndex(u, v);
            if (!idx)
                rt(e.span, "no edge (" + std::to_string(u) + ", " + std::to_string(v) + ")");
            return Value::ofInt(*idx);
        }
        if (m.method == "minWt") return Value::ofInt(g_.minWeight());
        if (m.method == "maxWt") return Value::ofInt(g_.maxWeight());
        rt(e.span, "method '" + m.method + "' is not valid here");
    }

    // ---- statements ----

    Flow execBlock(const Block& b, Ctx& ctx) {
        if (ctx.device) ctx.frames.emplace_back();
        Flow flow;
        for (const auto& s : b.stmts) {
            flow = execStmt(*s, ctx);
            if (flow.returned) break;
        }
        if (ctx.device) ctx.frames.pop_back();
        return flow;
    }

    Flow execStmt(const Stmt& s, Ctx& ctx) {
        if (s.is<DeclStmt>()) {
            const auto& d = s.as<DeclStmt>();
            const Symbol& ds = sym(d.symbol);
            if (ds.kind == SymbolKind::NodeProperty) {
                createProperty(d.symbol);
                return {};
            }
            if (ds.kind == SymbolKind::EdgeProperty) return {};  // aliases graph weights
            Value init = d.init ? eval(*d.init, ctx) : defaultValue(ds);
            if (ctx.device) {
                ctx.frames.back()[d.symbol] = coerce(init, valueKind(ds));
            } else {
                createScalar(d.symbol);
                result_.scalars[d.symbol].store(init);
            }
            return {};
        }
        if (s.is<AssignStmt>()) {
            const auto& a = s.as<AssignStmt>();
            Value v = eval(*a.value, ctx);
            assignTo(*a.target, v, ctx);
            return {};
        }
        if (s.is<ReduceAssignStmt>()) {
            execReduce(s.as<ReduceAssignStmt>(), s.span, ctx);
            return {};
        }
        if (s.is<MinMaxAssignStmt>()) {
            execMinMax(s.as<MinMaxAssignStmt>(), s.span, ctx);
            return {};
        }
        if (s.is<IfStmt>()) {
            const auto& i = s.as<IfStmt>();
            if (eval(*i.cond, ctx).asBool()) return execBlock(i.thenBlock, ctx);
            if (i.elseBlock) return execBlock(*i.elseBlock, ctx);
            return {};
        }
        if (s.is<CallStmt>()) {
            execAttach(s.as<CallStmt>(), ctx);
            return {};
        }
        if (s.is<ReturnStmt>()) {
            Flow f;
            f.returned = true;
            if (s.as<ReturnStmt>().value) f.value = eval(*s.as<ReturnStmt>().value, ctx);
            return f;
        }
        if (s.is<ForAllStmt>()) return execForAll(s, ctx);
        if (s.is<FixedPointStmt>()) return execFixedPoint(s, ctx);
        if (s.is<IterateBfsStmt>()) return execBfs(s, ctx);
        if (s.is<IterateRevStmt>())
            rt(s.span, "iterateInReverse executed outside an iterateInBFS pass");
        return {};
    }

    Value defaultValue(const Symbol& s) const {
        if (s.type.kind == TypeKind::Bool) return Value::ofBool(false);
        if (isFloatKind(s.type.kind)) return Value::ofFloat(0.0);
        return Value::ofInt(0);
    }

    Value::Kind valueKind(const Symbol& s) const {
        if (s.kind == SymbolKind::Node || s.kind == SymbolKind::Edge) return Value::Kind::Int;
        if (s.type.kind == TypeKind::Bool) return Value::Kind::Bool;
        if (isFloatKind(s.type.kind)) return Value::Kind::Float;
        return Value::Kind::Int;
    }

    void assignTo(const Expr& target, const Value& v, Ctx& ctx) {
        if (target.is<VarRef>()) {
            writeScalar(target.symbol, v, target.span, ctx);
            return;
        }
        const auto& p = target.as<PropAccess>();
        Value obj = eval(*p.object, ctx);
        const Symbol& propSym = sym(target.symbol);
        if (propSym.kind == SymbolKind::EdgeProperty)
            rt(target.span, "edge properties are read-only");
        writeNodeProp(target.symbol, obj.asInt(), v, target.span, ctx);
    }

    // Resolves a reduce/min-max target to a raw storage reference.
    struct Loc {
        enum class Kind { FrameVal, ScalarI, ScalarF, ScalarB, PropI, PropF, PropB, FpNext };
        Kind kind;
        Value* frame = nullptr;
        int64_t* i = nullptr;
        double* f = nullptr;
        uint8_t* b = nullptr;
        int symbol = -1;
        int32_t node = -1;
    };

    Loc locate(const Expr& target, Ctx& ctx) {
        Loc loc;
        if (target.is<VarRef>()) {
            for (auto it = ctx.frames.rbegin(); it != ctx.frames.rend(); ++it) {
                auto f = it->find(target.symbol);
                if (f != it->end()) {
                    loc.kind = Loc::Kind::FrameVal;
                    loc.frame = &f->second;
                    return loc;
                }
            }
            auto it = result_.scalars.find(target.symbol);
            if (it == result_.scalars.end())
                rt(target.span, "variable '" + sym(target.symbol).name +
                                    "' assigned before its declaration");
            ScalarCell& cell = it->second;
            loc.symbol = target.symbol;
            if (cell.type == TypeKind::Bool) {
                loc.kind = Loc::Kind::ScalarB;
                loc.b = &cell.b;
            } else if (isFloatKind(cell.type)) {
                loc.kind = Loc::Kind::ScalarF;
                loc.f = &cell.f;
            } else {
                loc.kind = Loc::Kind::ScalarI;
                loc.i = &cell.i;
            }
            return loc;
        }
        const auto& p = target.as<PropAccess>();
        const Symbol& propSym = sym(target.symbol);
        if (propSym.kind == SymbolKind::EdgeProperty)
            rt(target.span, "edge properties are read-only");
        int32_t v = checkNodeId(eval(*p.object, ctx).asInt(), target.span);
        loc.symbol = target.symbol;
        loc.node = v;
        if (activeFp_ && target.symbol == activeFp_->propSymbol) {
            loc.kind = Loc::Kind::FpNext;
            loc.b = &activeFp_->next[v];
            return loc;
        }
        PropArray& arr = propArray(target.symbol, target.span);
        if (arr.elem == TypeKind::Bool) {
            loc.kind = Loc::Kind::PropB;
            loc.b = &arr.bools[v];
        } else if (isFloatKind(arr.elem)) {
            loc.kind = Loc::Kind::PropF;
            loc.f = &arr.floats[v];
        } else {
            loc.kind = Loc::Kind::PropI;
            loc.i = &arr.ints[v];
        }
        return loc;
    }

    void execReduce(const ReduceAssignStmt& r, SourceSpan span, Ctx& ctx) {
        Value v = r.value ? eval(*r.value, ctx) : Value::ofInt(1);
        Loc loc = locate(*r.target, ctx);
        bool atomic = ctx.atomicPass;
        if (loc.kind == Loc::Kind::FrameVal) {
            Value& cur = *loc.frame;
            switch (r.op) {
                case ReduceOp::Sum:
                    if (cur.kind == Value::Kind::Float)
                        cur.f += v.asFloat();
                    else
                        cur.i += v.asInt();
                    break;
                case ReduceOp::Product:
                    if (cur.kind == Value::Kind::Float)
                        cur.f *= v.asFloat();
                    else
                        cur.i *= v.asInt();
                    break;
                case ReduceOp::Count: cur.i += 1; break;
                case ReduceOp::All: cur.b = cur.b && v.asBool(); break;
                case ReduceOp::Any: cur.b = cur.b || v.asBool(); break;
            }
            return;
        }
        if (loc.kind == Loc::Kind::FpNext) {
            // Reduction into the convergence property: OR/AND on the next
            // buffer with flag fusion.
            uint8_t bit = v.asBool() ? 1 : 0;
            if (r.op == ReduceOp::Any)
                orU8(*loc.b, bit, atomic);
            else if (r.op == ReduceOp::All)
                andU8(*loc.b, bit, atomic);
            else
                rt(span, "unsupported reduction on a convergence property");
            if (loadU8(*loc.b, atomic) != (activeFp_->convergedValue ? 1 : 0))
                activeFp_->anyNonConverged.store(true, std::memory_order_relaxed);
            return;
        }
        switch (r.op) {
            case ReduceOp::Sum:
                if (loc.f)
                    addF64(*loc.f, v.asFloat(), atomic);
                else
                    addI64(*loc.i, v.asInt(), atomic);
                break;
            case ReduceOp::Product:
                if (loc.f)
                    mulF64(*loc.f, v.asFloat(), atomic);
                else
                    mulI64(*loc.i, v.asInt(), atomic);
                break;
            case ReduceOp::Count: addI64(*loc.i, 1, atomic); break;
            case ReduceOp::All: andU8(*loc.b, v.asBool() ? 1 : 0, atomic); break;
            case ReduceOp::Any: orU8(*loc.b, v.asBool() ? 1 : 0, atomic); break;
        }
    }

    void execMinMax(const MinMaxAssignStmt& m, SourceSpan span, Ctx& ctx) {
        Value cand = eval(*m.compareCandidate, ctx);
        Loc loc = locate(*m.targets[0], ctx);
        bool improved = false;
        bool atomic = ctx.atomicPass;
        switch (loc.kind) {
            case Loc::Kind::FrameVal: {
                Value& cur = *loc.frame;
                if (cur.kind == Value::Kind::Float) {
                    double c = cand.asFloat();
                    if (m.isMin ? c < cur.f : c > cur.f) {
                        cur.f = c;
                        improved = true;
                    }
                } else {
                    int64_t c = cand.asInt();
                    if (m.isMin ? c < cur.i : c > cur.i) {
                        cur.i = c;
                        improved = true;
                    }
                }
                break;
            }
            case Loc::Kind::ScalarI:
            case Loc::Kind::PropI:
                improved = minMaxI64(*loc.i, cand.asInt(), m.isMin, atomic);
                break;
            case Loc::Kind::ScalarF:
            case Loc::Kind::PropF:
                improved = minMaxF64(*loc.f, cand.asFloat(), m.isMin, atomic);
                break;
            default: rt(span, "Min/Max target must be numeric");
        }
        if (!improved) return;
        for (size_t i = 0; i < m.attachedValues.size(); ++i) {
            Value v = eval(*m.attachedValues[i], ctx);
            assignTo(*m.targets[i + 1], v, ctx);
        }
    }

    void execAttach(const CallStmt& c, Ctx& ctx) {
        const auto& m = c.call->as<MethodCall>();
        for (size_t i = 0; i < m.args.size(); ++i) {
            const Expr& arg = *m.args[i];
            int symbol = m.argSymbols.at(i);
            Value v = eval(arg, ctx);
            PropArray& array = propArray(symbol, arg.span);
            if (array.elem == TypeKind::Bool)
                std::fill(array.bools.begin(), array.bools.end(), v.asBool() ? 1 : 0);
            else if (isFloatKind(array.elem))
                std::fill(array.floats.begin(), array.floats.end(), v.asFloat());
            else
                std::fill(array.ints.begin(), array.ints.end(), v.asInt());
        }
    }

    // ---- parallel passes ----

    std::vector<int64_t> materializeDomain(const ForAllStmt& f, Ctx& ctx) {
        std::vector<int64_t> elems;
        switch (f.domain.kind) {
            case IterDomainKind::Nodes:
                elems.reserve(g_.nodeCount());
                for (int32_t v = 0; v < g_.nodeCount(); ++v) elems.push_back(v);
                break;
            case IterDomainKind::Neighbors: {
                int32_t src = checkNodeId(eval(*f.domain.source, ctx).asInt(), f.domain.source->span);
                bool dagFilter = activeBfs_ && f.domain.source->is<VarRef>() &&
                                 f.domain.source->symbol == activeBfs_->varSymbol;
                int32_t srcLevel = dagFilter ? activeBfs_->ctx->level[src] : 0;
                for (const auto& nb : g_.neighbors(src)) {
                    if (dagFilter && activeBfs_->ctx->level[nb.dest] != srcLevel + 1) continue;
                    elems.push_back(nb.dest);
                }
                break;
            }
            case IterDomainKind::NodesTo: {
                int32_t dst = checkNodeId(eval(*f.domain.source, ctx).asInt(), f.domain.source->span);
                for (const auto& nb : g_.inNeighbors(dst)) elems.push_back(nb.dest);
                break;
            }
            case IterDomainKind::Container:
                // Containers iterate sequentially on the host; execForAll
                // handles them before reaching this point.
                rt(SourceSpan{}, "container domains iterate sequentially on the host");
        }
        return elems;
    }

    Flow execForAll(const Stmt& s, Ctx& ctx) {
        const auto& f = s.as<ForAllStmt>();

        // Host-side container iteration (for (src in sourceSet)).
        if (f.domain.kind == IterDomainKind::Container) {
            auto it = nodeSets_.find(f.domain.containerSymbol);
            if (it == nodeSets_.end())
                rt(s.span, "node set '" + sym(f.domain.containerSymbol).name + "' is not bound");
            createScalar(f.varSymbol);
            Flow flow;
            for (int32_t v : it->second) {
                result_.scalars[f.varSymbol].store(Value::ofInt(v));
                if (f.filter && !eval(*f.filter, ctx).asBool()) continue;
                flow = execBlock(f.body, ctx);
                if (flow.returned) return flow;
            }
            return {};
        }

        bool isRegion = !ctx.device && f.parallel;
        const sema::RegionInfo* region = nullptr;
        if (isRegion && opts_.instrumentTransfers && f.regionId >= 0)
            region = &opts_.instrumentTransfers->regions[f.regionId];

        if (!isRegion) {
            // Sequential (host `for`) or nested-inside-a-region loop: run in
            // the current context, ascending element order, inline filter.
            std::vector<int64_t> elems = materializeDomain(f, ctx);
            if (ctx.device)
                ctx.frames.emplace_back();
            else
                createScalar(f.varSymbol);
            Flow flow;
            for (int64_t v : elems) {
                if (ctx.device) {
                    ctx.frames.back().clear();
                    ctx.frames.back()[f.varSymbol] = Value::ofInt(v);
                } else {
                    result_.scalars[f.varSymbol].store(Value::ofInt(v));
                }
                if (f.filter && !eval(*f.filter, ctx).asBool()) continue;
                flow = execBlock(f.body, ctx);
                if (flow.returned) break;
            }
            if (ctx.device) ctx.frames.pop_back();
            return flow;
        }

        // Parallel region pass.
        std::vector<int64_t> elems = materializeDomain(f, ctx);
        runRegionPass(elems, f.varSymbol, f.filter.get(), region,
                      [&](Ctx& bodyCtx) { execBlock(f.body, bodyCtx); });
        return {};
    }

    // Executes one region pass over the element list. In parallel mode the
    // filter is evaluated against the pre-pass snapshot, then bodies run on
    // the pool; in sequential mode elements run in ascending order with the
    // filter inline.
    void runRegionPass(const std::vector<int64_t>& elems, int varSymbol, const Expr* filter,
                       const sema::RegionInfo* region,
                       const std::function<void(Ctx&)>& body) {
        const sema::RegionInfo* savedRegion = activeRegion_;
        if (region) activeRegion_ = region;

        if (!parallel()) {
            Ctx ctx;
            ctx.device = true;
            ctx.atomicPass = false;
            ctx.frames.emplace_back();
            for (int64_t v : elems) {
                ctx.frames.back().clear();
                ctx.frames.back()[varSymbol] = Value::ofInt(v);
                if (filter && !eval(*filter, ctx).asBool()) continue;
                body(ctx);
            }
            activeRegion_ = savedRegion;
            return;
        }

        // Snapshot filter pass.
        std::vector<int64_t> selected;
        if (filter) {
            Ctx fctx;
            fctx.device = true;
            fctx.atomicPass = false;
            fctx.frames.emplace_back();
            for (int64_t v : elems) {
                fctx.frames.back().clear();
                fctx.frames.back()[varSymbol] = Value::ofInt(v);
                if (eval(*filter, fctx).asBool()) selected.push_back(v);
            }
        } else {
            selected = elems;
        }

        pool_->parallelFor(selected.size(), [&](int, size_t b, size_t e) {
            Ctx ctx;
            ctx.device = true;
            ctx.atomicPass = true;
            ctx.frames.emplace_back();
            for (size_t k = b; k < e; ++k) {
                ctx.frames.back().clear();
                ctx.frames.back()[varSymbol] = Value::ofInt(selected[k]);
                body(ctx);
            }
        });
        activeRegion_ = savedRegion;
    }

    Flow execFixedPoint(const Stmt& s, Ctx& ctx) {
        const auto& f = s.as<FixedPointStmt>();
        bool negated = f.convergence->is<UnaryExpr>();
        FpState fp;
        fp.propSymbol = negated ? f.convergence->as<UnaryExpr>().operand->symbol
                                : f.convergence->symbol;
        // until (flag: !p): converged when p is false everywhere.
        fp.convergedValue = negated ? false : true;

        int64_t cap = opts_.fixedPointCap > 0 ? opts_.fixedPointCap
                                              : 10 * static_cast<int64_t>(g_.nodeCount()) + 100;
        PropArray& arr = propArray(fp.propSymbol, s.span);

        int64_t rounds = 0;
        while (true) {
            if (++rounds > cap)
                throw CompileError("NonTermination", s.span,
                                   "fixedPoint exceeded " + std::to_string(cap) +
                                       " iterations without converging");
            fp.next.assign(arr.bools.size(), fp.convergedValue ? 1 : 0);
            fp.anyNonConverged.store(false, std::memory_order_relaxed);
            activeFp_ = &fp;
            Flow flow = execBlock(f.body, ctx);
            activeFp_ = nullptr;
            arr.bools = fp.next;
            bool converged = !fp.anyNonConverged.load(std::memory_order_relaxed);
            auto it = result_.scalars.find(f.flagSymbol);
            if (it != result_.scalars.end()) it->second.store(Value::ofBool(converged));
            if (flow.returned) return flow;
            if (converged) break;
        }
        return {};
    }

    BfsContext bfsLevelsInternal(int32_t root) {
        // Level-synchronous passes mirroring the generated finished-flag loop;
        // parallelized per level pass in parallel mode.
        BfsContext ctx;
        const int32_t n = g_.nodeCount();
        ctx.root = root;
        ctx.level.assign(n, -1);
        ctx.level[root] = 0;
        int32_t cur = 0;
        while (true) {
            std::atomic<bool> changed{false};
            auto pass = [&](int32_t b, int32_t e) {
                for (int32_t v = b; v < e; ++v) {
                    if (loadI64asI32(ctx.level[v]) != cur) continue;
                    for (const auto& nb : g_.neighbors(v)) {
                        std::atomic_ref<int32_t> lw(ctx.level[nb.dest]);
                        int32_t expect = -1;
                        if (lw.load(std::memory_order_relaxed) == -1) {
                            lw.compare_exchange_strong(expect, cur + 1, std::memory_order_relaxed);
                            changed.store(true, std::memory_order_relaxed);
                        }
                    }
                }
            };
            if (parallel()) {
                pool_->parallelFor(n, [&](int, size_t b, size_t e) {
                    pass(static_cast<int32_t>(b), static_cast<int32_t>(e));
                });
            } else {
                pass(0, n);
            }
            if (!changed.load()) break;
            ++cur;
        }
        ctx.hops = cur;
        ctx.levelOrder.assign(cur + 1, {});
        for (int32_t v = 0; v < n; ++v)
            if (ctx.level[v] >= 0) ctx.levelOrder[ctx.level[v]].push_back(v);
        return ctx;
    }

    static int32_t loadI64asI32(int32_t& ref) {
        return std::atomic_ref<int32_t>(ref).load(std::memory_order_relaxed);
    }

    Flow execBfs(const Stmt& s, Ctx& ctx) {
        const auto& b = s.as<IterateBfsStmt>();
        int32_t root = checkNodeId(eval(*b.root, ctx).asInt(), b.root->span);
        BfsContext bfsCtx = bfsLevelsInternal(root);

        BfsState state;
        state.varSymbol = b.varSymbol;
        state.ctx = &bfsCtx;
        activeBfs_ = &state;

        const sema::RegionInfo* fwdRegion = nullptr;
        if (opts_.instrumentTransfers && b.regionId >= 0)
            fwdRegion = &opts_.instrumentTransfers->regions[b.regionId];

        // Forward pass: ascending levels, body minus the reverse statements.
        for (int32_t lvl = 0; lvl <= bfsCtx.hops; ++lvl) {
            std::vector<int64_t> elems(bfsCtx.levelOrder[lvl].begin(),
                                       bfsCtx.levelOrder[lvl].end());
            runRegionPass(elems, b.varSymbol, nullptr, fwdRegion, [&](Ctx& bodyCtx) {
                for (const auto& inner : b.body.stmts)
                    if (!inner->is<IterateRevStmt>()) execStmt(*inner, bodyCtx);
            });
        }

        // Reverse passes: strictly descending levels.
        for (const auto& inner : b.body.stmts) {
            if (!inner->is<IterateRevStmt>()) continue;
            const auto& rev = inner->as<IterateRevStmt>();
            const sema::RegionInfo* revRegion = nullptr;
            if (opts_.instrumentTransfers && rev.regionId >= 0)
                revRegion = &opts_.instrumentTransfers->regions[rev.regionId];
            for (int32_t lvl = bfsCtx.hops; lvl >= 0; --lvl) {
                std::vector<int64_t> elems(bfsCtx.levelOrder[lvl].begin(),
                                           bfsCtx.levelOrder[lvl].end());
                runRegionPass(elems, b.varSymbol, rev.filter.get(), revRegion,
                              [&](Ctx& bodyCtx) { execBlock(rev.body, bodyCtx); });
            }
        }
        activeBfs_ = nullptr;
        return {};
    }

    // ---- binding & entry ----

    std::map<int, std::vector<int32_t>> nodeSets_;

public:
    RunResult executeImpl() {
        if (parallel()) pool_ = std::make_unique<WorkerPool>(opts_.threads);
        const FunctionDecl& fn = prog_.entry();

        bool graphBound = false;
        for (const auto& p : fn.params) {
            const Symbol& ps = sym(p.symbol);
            switch (ps.kind) {
                case SymbolKind::Graph:
                    if (graphBound)
                        rt(p.span, "only one Graph parameter can be bound per run");
                    graphBound = true;
                    break;
                case SymbolKind::NodeProperty: createProperty(p.symbol); break;
                case SymbolKind::EdgeProperty: break;  // aliases graph weights
                case SymbolKind::NodeSet: {
                    auto it = args_.find(p.name);
                    if (it == args_.end() ||
                        !std::holds_alternative<std::vector<int32_t>>(it->second))
                        rt(p.span, "missing node-set argument '" + p.name +
                                       "' (pass --arg " + p.name + "=v0,v1,...)");
                    auto nodes = std::get<std::vector<int32_t>>(it->second);
                    for (int32_t v : nodes) checkNodeId(v, p.span);
                    nodeSets_[p.symbol] = std::move(nodes);
                    break;
                }
                case SymbolKind::Node:
                case SymbolKind::Scalar: {
                    auto it = args_.find(p.name);
                    if (it == args_.end())
                        rt(p.span, "missing argument '" + p.name + "'");
                    createScalar(p.symbol);
                    ScalarCell& cell = result_.scalars[p.symbol];
                    if (std::holds_alternative<int64_t>(it->second))
                        cell.store(Value::ofInt(std::get<int64_t>(it->second)));
                    else if (std::holds_alternative<double>(it->second))
                        cell.store(Value::ofFloat(std::get<double>(it->second)));
                    else if (std::holds_alternative<bool>(it->second))
                        cell.store(Value::ofBool(std::get<bool>(it->second)));
                    else
                        rt(p.span, "argument '" + p.name + "' has the wrong shape");
                    if (ps.kind == SymbolKind::Node) checkNodeId(cell.i, p.span);
                    break;
                }
                default: break;
            }
        }

        Ctx ctx;
        ctx.device = false;
        Flow flow = execBlock(fn.body, ctx);
        if (flow.returned) result_.returnValue = flow.value;
        pool_.reset();
        return std::move(result_);
    }
};

RunResult Machine::execute() { return executeImpl(); }

}  // namespace

RunResult run(const sema::AnnotatedProgram& program, const CsrGraph& graph, const ArgMap& args,
              const RunOptions& options) {
    Machine m(program, graph, args, options);
    return m.execute();
}

BfsContext bfsLevels(const CsrGraph& graph, int32_t root) {
    if (root < 0 || root >= graph.nodeCount())
        throw std::out_of_range("bfs root out of range");
    BfsContext ctx;
    const int32_t n = graph.nodeCount();
    ctx.root = root;
    ctx.level.assign(n, -1);
    ctx.level[root] = 0;
    int32_t cur = 0;
    while (true) {
        bool changed = false;
        for (int32_t v = 0; v < n; ++v) {
            if (ctx.level[v] != cur) continue;
            for (const auto& nb : graph.neighbors(v))
                if (ctx.level[nb.dest] == -1) {
                    ctx.level[nb.dest] = cur + 1;
                    changed = true;
                }
        }
        if (!changed) break;
        ++cur;
    }
    ctx.hops = cur;
    ctx.levelOrder.assign(cur + 1, {});
    for (int32_t v = 0; v < n; ++v)
        if (ctx.level[v] >= 0) ctx.levelOrder[ctx.level[v]].push_back(v);
    return ctx;
}

}  // namespace graphdsl::interp
