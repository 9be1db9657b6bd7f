#include "graphdsl/pretty_print.hpp"

#include <charconv>
#include <sstream>

namespace graphdsl {

using namespace ast;

namespace {

std::string floatText(const FloatLit& f) {
    if (!f.text.empty()) return f.text;
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), f.value);
    std::string s(buf, p);
    // Keep the lexer happy: it requires a digit-dot-digit or exponent form.
    if (s.find('.') == std::string::npos && s.find('e') == std::string::npos &&
        s.find('E') == std::string::npos)
        s += ".0";
    return s;
}

class Printer {
public:
    std::string print(const Program& p) {
        for (size_t i = 0; i < p.functions.size(); ++i) {
            if (i > 0) out_ << "\n";
            printFunction(p.functions[i]);
        }
        return out_.str();
    }

    std::string printExprOnly(const Expr& e) {
        expr(e, 0);
        return out_.str();
    }

private:
    std::ostringstream out_;
    int indent_ = 0;

    void nl() {
        out_ << "\n";
        for (int i = 0; i < indent_; ++i) out_ << "  ";
    }
    void ind() {
        for (int i = 0; i < indent_; ++i) out_ << "  ";
    }

    void printFunction(const FunctionDecl& fn) {
        out_ << "function " << fn.name << "(";
        for (size_t i = 0; i < fn.params.size(); ++i) {
            if (i > 0) out_ << ", ";
            out_ << typeName(fn.params[i].type) << " " << fn.params[i].name;
        }
        out_ << ") ";
        block(fn.body);
        out_ << "\n";
    }

    void block(const Block& b) {
        out_ << "{";
        ++indent_;
        for (const auto& s : b.stmts) {
            nl();
            stmt(*s);
        }
        --indent_;
        nl();
        out_ << "}";
    }

    void stmt(const Stmt& s) {
        if (s.is<DeclStmt>()) {
            const auto& d = s.as<DeclStmt>();
            out_ << typeName(d.type) << " " << d.name;
            if (d.init) {
                out_ << " = ";
                expr(*d.init, 0);
            }
            out_ << ";";
        } else if (s.is<AssignStmt>()) {
            const auto& a = s.as<AssignStmt>();
            expr(*a.target, 0);
            out_ << " = ";
            expr(*a.value, 0);
            out_ << ";";
        } else if (s.is<ReduceAssignStmt>()) {
            const auto& r = s.as<ReduceAssignStmt>();
            expr(*r.target, 0);
            if (r.op == ReduceOp::Count) {
                out_ << "++;";
            } else {
                out_ << " " << reduceOpToken(r.op) << " ";
                expr(*r.value, 0);
                out_ << ";";
            }
        } else if (s.is<MinMaxAssignStmt>()) {
            const auto& m = s.as<MinMaxAssignStmt>();
            out_ << "<";
            for (size_t i = 0; i < m.targets.size(); ++i) {
                if (i > 0) out_ << ", ";
                expr(*m.targets[i], 0);
            }
            out_ << "> = <" << (m.isMin ? "Min" : "Max") << "(";
            expr(*m.compareCurrent, 0);
            out_ << ", ";
            expr(*m.compareCandidate, 0);
            out_ << ")";
            for (const auto& v : m.attachedValues) {
                out_ << ", ";
                expr(*v, 0);
            }
            out_ << ">;";
        } else if (s.is<ForAllStmt>()) {
            const auto& f = s.as<ForAllStmt>();
            out_ << (f.parallel ? "forall" : "for") << " (" << f.var << " in ";
            domain(f.domain);
            if (f.filter) {
                out_ << ".filter(";
                expr(*f.filter, 0);
                out_ << ")";
            }
            out_ << ") ";
            block(f.body);
        } else if (s.is<FixedPointStmt>()) {
            const auto& f = s.as<FixedPointStmt>();
            out_ << "fixedPoint until (" << f.flag << ": ";
            expr(*f.convergence, 0);
            out_ << ") ";
            block(f.body);
        } else if (s.is<IterateBfsStmt>()) {
            const auto& b = s.as<IterateBfsStmt>();
            out_ << "iterateInBFS (" << b.var << " in " << b.graphName << ".nodes() from ";
            expr(*b.root, 0);
            out_ << ") ";
            block(b.body);
        } else if (s.is<IterateRevStmt>()) {
            const auto& r = s.as<IterateRevStmt>();
            out_ << "iterateInReverse (";
            if (r.filter) expr(*r.filter, 0);
            out_ << ") ";
            block(r.body);
        } else if (s.is<IfStmt>()) {
            const auto& i = s.as<IfStmt>();
            out_ << "if (";
            expr(*i.cond, 0);
            out_ << ") ";
            block(i.thenBlock);
            if (i.elseBlock) {
                out_ << " else ";
                block(*i.elseBlock);
            }
        } else if (s.is<CallStmt>()) {
            expr(*s.as<CallStmt>().call, 0);
            out_ << ";";
        } else if (s.is<ReturnStmt>()) {
            const auto& r = s.as<ReturnStmt>();
            out_ << "return";
            if (r.value) {
                out_ << " ";
                expr(*r.value, 0);
            }
            out_ << ";";
        }
    }

    void domain(const IterDomain& d) {
        switch (d.kind) {
            case IterDomainKind::Nodes: out_ << d.graphName << ".nodes()"; break;
            case IterDomainKind::Neighbors:
                out_ << d.graphName << ".neighbors(";
                expr(*d.source, 0);
                out_ << ")";
                break;
            case IterDomainKind::NodesTo:
                out_ << d.graphName << ".nodes_to(";
                expr(*d.source, 0);
                out_ << ")";
                break;
            case IterDomainKind::Container: out_ << d.container; break;
        }
    }

    // minPrec: parenthesize when the expression binds looser than the context.
    void expr(const Expr& e, int minPrec) {
        if (e.is<IntLit>()) {
            out_ << e.as<IntLit>().value;
        } else if (e.is<FloatLit>()) {
            out_ << floatText(e.as<FloatLit>());
        } else if (e.is<BoolLit>()) {
            out_ << (e.as<BoolLit>().value ? "True" : "False");
        } else if (e.is<InfLit>()) {
            out_ << "INF";
        } else if (e.is<VarRef>()) {
            out_ << e.as<VarRef>().name;
        } else if (e.is<PropAccess>()) {
            const auto& p = e.as<PropAccess>();
            expr(*p.object, 10);
            out_ << "." << p.property;
        } else if (e.is<UnaryExpr>()) {
            const auto& u = e.as<UnaryExpr>();
            bool paren = minPrec > 7;
            if (paren) out_ << "(";
            out_ << unaryOpToken(u.op);
            expr(*u.operand, 7);
            if (paren) out_ << ")";
        } else if (e.is<BinaryExpr>()) {
            const auto& b = e.as<BinaryExpr>();
            int prec = binaryOpPrecedence(b.op);
            bool paren = prec < minPrec;
            if (paren) out_ << "(";
            expr(*b.lhs, prec);
            out_ << " " << binaryOpToken(b.op) << " ";
            expr(*b.rhs, prec + 1);
            if (paren) out_ << ")";
        } else if (e.is<MethodCall>()) {
            const auto& m = e.as<MethodCall>();
            if (m.object) {
                expr(*m.object, 10);
                out_ << ".";
            }
            out_ << m.method << "(";
            for (size_t i = 0; i < m.args.size(); ++i) {
                if (i > 0) out_ << ", ";
                if (i < m.argNames.size() && !m.argNames[i].empty())
                    out_ << m.argNames[i] << " = ";
                expr(*m.args[i], 0);
            }
            out_ << ")";
        }
    }
};

}  // namespace

std::string prettyPrint(const Program& program) { return Printer().print(program); }

std::string prettyPrint(const Expr& e) { return Printer().printExprOnly(e); }

}  // namespace graphdsl
