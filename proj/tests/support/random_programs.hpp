#pragma once

// Seeded generator of small valid DSL programs, used for round-trip,
// analysis-determinism, and transfer-soundness property tests. Programs are
// built as text so they also exercise the lexer/parser, and are constructed
// to stay overflow-free and terminating (fixedPoint bodies converge by
// construction or hit the interpreter cap, which callers tolerate).

#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace testsupport {

class ProgramGen {
public:
    explicit ProgramGen(uint64_t seed) : rng_(seed) {}

    std::string generate() {
        out_.str("");
        intProps_ = {"p0", "p1"};
        floatProps_ = {"f0"};
        boolProps_ = {"m0"};
        intScalars_ = {"acc"};
        floatScalars_ = {"facc"};
        out_ << "function Gen(Graph g, propNode<int> p0, node s) {\n";
        out_ << "  propNode<int> p1;\n";
        out_ << "  propNode<float> f0;\n";
        out_ << "  propNode<bool> m0;\n";
        out_ << "  int acc = 0;\n";
        out_ << "  float facc = 0.0;\n";
        out_ << "  g.attachNodeProperty(p0 = " << lit() << ", p1 = " << lit() << ", f0 = "
             << lit() << ".0, m0 = False);\n";
        int stmts = 1 + pick(3);
        for (int i = 0; i < stmts; ++i) hostStmt();
        out_ << "}\n";
        return out_.str();
    }

private:
    std::mt19937_64 rng_;
    std::ostringstream out_;
    std::vector<std::string> intProps_, floatProps_, boolProps_, intScalars_, floatScalars_;
    int indent_ = 1;
    int nameCounter_ = 0;

    int pick(int n) { return static_cast<int>(rng_() % static_cast<uint64_t>(n)); }
    bool chance(int percent) { return pick(100) < percent; }
    int lit() { return pick(5); }
    std::string ind() const { return std::string(indent_ * 2, ' '); }
    const std::string& any(const std::vector<std::string>& v) { return v[pick(v.size())]; }

    std::string intExpr(const std::string& node, bool allowScalars) {
        switch (pick(allowScalars ? 4 : 3)) {
            case 0: return std::to_string(lit());
            case 1: return node + "." + any(intProps_);
            case 2:
                return node + "." + any(intProps_) + " + " + std::to_string(lit());
            default: return any(intScalars_);
        }
    }

    std::string boolExpr(const std::string& node) {
        switch (pick(3)) {
            case 0: return node + "." + any(boolProps_) + " == True";
            case 1: return node + "." + any(intProps_) + " < " + std::to_string(1 + lit());
            default: return node + "." + any(intProps_) + " >= 0";
        }
    }

    void hostStmt() {
        switch (pick(4)) {
            case 0: out_ << ind() << "acc = acc + 1;\n"; break;
            case 1:
                out_ << ind() << "g.attachNodeProperty(" << any(intProps_) << " = " << lit()
                     << ");\n";
                break;
            case 2: regionStmt(); break;
            default: fixedPointStmt(); break;
        }
    }

    void regionStmt() {
        std::string v = "v" + std::to_string(nameCounter_++);
        out_ << ind() << "forall (" << v << " in g.nodes()";
        if (chance(40)) out_ << ".filter(" << boolExpr(v) << ")";
        out_ << ") {\n";
        ++indent_;
        int body = 1 + pick(3);
        for (int i = 0; i < body; ++i) bodyStmt(v);
        --indent_;
        out_ << ind() << "}\n";
    }

    void bodyStmt(const std::string& v) {
        switch (pick(6)) {
            case 0: out_ << ind() << v << "." << any(intProps_) << " = " << intExpr(v, true) << ";\n"; break;
            case 1: out_ << ind() << "acc += " << intExpr(v, false) << ";\n"; break;
            case 2: out_ << ind() << "facc += " << v << "." << any(floatProps_) << ";\n"; break;
            case 3:
                out_ << ind() << "if (" << boolExpr(v) << ") {\n";
                ++indent_;
                out_ << ind() << v << "." << any(intProps_) << " = " << intExpr(v, true) << ";\n";
                --indent_;
                out_ << ind() << "}\n";
                break;
            case 4: {
                std::string w = "w" + std::to_string(nameCounter_++);
                out_ << ind() << "for (" << w << " in g.neighbors(" << v << ")) {\n";
                ++indent_;
                out_ << ind() << v << "." << any(intProps_) << " += " << w << "."
                     << any(intProps_) << ";\n";
                --indent_;
                out_ << ind() << "}\n";
                break;
            }
            default:
                out_ << ind() << v << "." << any(floatProps_) << " = " << v << "."
                     << any(floatProps_) << " * 1 + " << lit() << ".0;\n";
                break;
        }
    }

    void fixedPointStmt() {
        // Converges: the body only writes the convergence property False.
        std::string flag = "fl" + std::to_string(nameCounter_++);
        std::string v = "v" + std::to_string(nameCounter_++);
        out_ << ind() << "bool " << flag << " = False;\n";
        out_ << ind() << "fixedPoint until (" << flag << ": !m0) {\n";
        ++indent_;
        out_ << ind() << "forall (" << v << " in g.nodes()) {\n";
        ++indent_;
        if (chance(30))
            out_ << ind() << "if (" << v << "." << any(intProps_) << " < 0) { " << v
                 << ".m0 = True; }\n";
        out_ << ind() << v << "." << any(intProps_) << " = " << intExpr(v, false) << ";\n";
        --indent_;
        out_ << ind() << "}\n";
        --indent_;
        out_ << ind() << "}\n";
    }
};

inline std::string randomProgramSource(uint64_t seed) { return ProgramGen(seed).generate(); }

}  // namespace testsupport
