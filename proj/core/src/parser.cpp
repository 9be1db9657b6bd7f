#include "graphdsl/parser.hpp"

#include <charconv>
#include <cstdlib>
#include <sstream>

namespace graphdsl {

using namespace ast;

namespace {

bool isTypeStart(const Token& t) {
    if (t.kind != TokenKind::Keyword) return false;
    static const char* kTypes[] = {"int",   "long",  "float",    "double",   "bool",
                                   "node",  "edge",  "Graph",    "propNode", "propEdge",
                                   "setNode"};
    for (const char* k : kTypes)
        if (t.lexeme == k) return true;
    return false;
}

TypeKind scalarTypeKind(const std::string& name) {
    if (name == "int") return TypeKind::Int;
    if (name == "long") return TypeKind::Long;
    if (name == "float") return TypeKind::Float;
    if (name == "double") return TypeKind::Double;
    if (name == "bool") return TypeKind::Bool;
    if (name == "node") return TypeKind::Node;
    if (name == "edge") return TypeKind::Edge;
    if (name == "Graph") return TypeKind::Graph;
    return TypeKind::Void;
}

class Parser {
public:
    explicit Parser(const std::vector<Token>& tokens) : toks_(tokens) {}

    Program parseProgram() {
        Program p;
        while (!peek().is(TokenKind::EndOfInput)) {
            p.functions.push_back(parseFunction());
        }
        if (p.functions.empty()) fail("expected 'function'");
        p.entryIndex = 0;
        return p;
    }

private:
    const std::vector<Token>& toks_;
    size_t pos_ = 0;
    int bfsDepth_ = 0;

    const Token& peek(size_t ahead = 0) const {
        size_t i = pos_ + ahead;
        if (i >= toks_.size()) i = toks_.size() - 1;
        return toks_[i];
    }
    const Token& advance() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

    [[noreturn]] void fail(const std::string& expected) const {
        const Token& t = peek();
        std::ostringstream os;
        os << "expected " << expected << ", found ";
        if (t.is(TokenKind::EndOfInput))
            os << "end of input";
        else
            os << "'" << t.lexeme << "'";
        throw parseError(t.span, os.str());
    }

    const Token& expectKeyword(const char* kw) {
        if (!peek().isKeyword(kw)) fail(std::string("'") + kw + "'");
        return advance();
    }
    const Token& expectOp(const char* op) {
        if (!peek().isOp(op)) fail(std::string("'") + op + "'");
        return advance();
    }
    const Token& expectPunct(const char* p) {
        if (!peek().isPunct(p)) fail(std::string("'") + p + "'");
        return advance();
    }
    std::string expectIdent(const char* what) {
        if (!peek().is(TokenKind::Identifier)) fail(what);
        return advance().lexeme;
    }
    bool acceptOp(const char* op) {
        if (peek().isOp(op)) {
            advance();
            return true;
        }
        return false;
    }
    bool acceptPunct(const char* p) {
        if (peek().isPunct(p)) {
            advance();
            return true;
        }
        return false;
    }

    // ---- declarations ----

    TypeRef parseType() {
        const Token& t = peek();
        if (!isTypeStart(t)) fail("a type");
        advance();
        TypeRef ty;
        if (t.lexeme == "propNode" || t.lexeme == "propEdge") {
            ty.kind = t.lexeme == "propNode" ? TypeKind::NodeProp : TypeKind::EdgeProp;
            expectOp("<");
            const Token& elem = peek();
            if (!isTypeStart(elem)) fail("an element type");
            TypeKind ek = scalarTypeKind(elem.lexeme);
            if (ek == TypeKind::Void || ek == TypeKind::Graph)
                throw parseError(elem.span, "invalid property element type '" + elem.lexeme + "'");
            advance();
            ty.element = ek;
            expectOp(">");
            return ty;
        }
        if (t.lexeme == "setNode") {
            ty.kind = TypeKind::NodeSet;
            expectOp("<");
            ty.graphParam = expectIdent("a graph parameter name");
            expectOp(">");
            return ty;
        }
        ty.kind = scalarTypeKind(t.lexeme);
        return ty;
    }

    FunctionDecl parseFunction() {
        const Token& kw = peek();
        expectKeyword("function");
        FunctionDecl fn;
        fn.span = kw.span;
        fn.name = expectIdent("a function name");
        expectPunct("(");
        if (!peek().isPunct(")")) {
            while (true) {
                Param p;
                p.span = peek().span;
                p.type = parseType();
                p.name = expectIdent("a parameter name");
                fn.params.push_back(std::move(p));
                if (!acceptPunct(",")) break;
            }
        }
        expectPunct(")");
        fn.body = parseBlock();
        return fn;
    }

    Block parseBlock() {
        expectPunct("{");
        Block b;
        while (!peek().isPunct("}")) {
            if (peek().is(TokenKind::EndOfInput)) fail("'}'");
            b.stmts.push_back(parseStatement());
        }
        expectPunct("}");
        return b;
    }

    Block parseBlockOrSingle() {
        if (peek().isPunct("{")) return parseBlock();
        Block b;
        b.stmts.push_back(parseStatement());
        return b;
    }

    // ---- statements ----

    StmtPtr parseStatement() {
        const Token& t = peek();
        if (isTypeStart(t)) return parseDecl();
        if (t.isKeyword("forall") || t.isKeyword("for")) return parseForAll();
        if (t.isKeyword("fixedPoint")) return parseFixedPoint();
        if (t.isKeyword("iterateInBFS")) return parseIterateBfs();
        if (t.isKeyword("iterateInReverse")) {
            if (bfsDepth_ == 0)
                throw parseError(t.span, "iterateInReverse must appear inside an iterateInBFS body");
            return parseIterateReverse();
        }
        if (t.isKeyword("if")) return parseIf();
        if (t.isKeyword("return")) return parseReturn();
        if (t.isOp("<")) return parseMinMaxAssign();
        if (t.is(TokenKind::Identifier)) return parseAssignOrCall();
        fail("a statement");
    }

    StmtPtr parseDecl() {
        const Token& start = peek();
        DeclStmt d;
        d.type = parseType();
        d.name = expectIdent("a variable name");
        if (acceptOp("=")) d.init = parseExpr();
        expectPunct(";");
        return makeStmt(start.span, std::move(d));
    }

    StmtPtr parseForAll() {
        const Token& start = peek();
        bool parallel = start.isKeyword("forall");
        advance();
        expectPunct("(");
        ForAllStmt fa;
        fa.parallel = parallel;
        fa.var = expectIdent("an iteration variable");
        expectKeyword("in");
        parseIterDomain(fa.domain, fa.filter);
        expectPunct(")");
        fa.body = parseBlock();
        return makeStmt(start.span, std::move(fa));
    }

    void parseIterDomain(IterDomain& dom, ExprPtr& filter) {
        const Token& base = peek();
        std::string name = expectIdent("an iteration domain");
        if (!peek().isPunct(".")) {
            dom.kind = IterDomainKind::Container;
            dom.container = name;
            return;
        }
        advance();  // '.'
        const Token& m = peek();
        std::string method =
            m.is(TokenKind::Identifier) || m.is(TokenKind::Keyword) ? m.lexeme : "";
        if (method != "nodes" && method != "neighbors" && method != "nodes_to")
            fail("'nodes', 'neighbors' or 'nodes_to'");
        advance();
        dom.graphName = name;
        expectPunct("(");
        if (method == "nodes") {
            dom.kind = IterDomainKind::Nodes;
        } else {
            dom.kind = method == "neighbors" ? IterDomainKind::Neighbors : IterDomainKind::NodesTo;
            dom.source = parseExpr();
        }
        expectPunct(")");
        (void)base;
        if (peek().isPunct(".")) {
            advance();
            expectKeyword("filter");
            expectPunct("(");
            filter = parseExpr();
            expectPunct(")");
        }
    }

    StmtPtr parseFixedPoint() {
        const Token& start = peek();
        advance();
        expectKeyword("until");
        expectPunct("(");
        FixedPointStmt fp;
        fp.flag = expectIdent("a convergence flag variable");
        expectPunct(":");
        fp.convergence = parseExpr();
        expectPunct(")");
        fp.body = parseBlock();
        return makeStmt(start.span, std::move(fp));
    }

    StmtPtr parseIterateBfs() {
        const Token& start = peek();
        advance();
        expectPunct("(");
        IterateBfsStmt bfs;
        bfs.var = expectIdent("an iteration variable");
        expectKeyword("in");
        bfs.graphName = expectIdent("a graph name");
        expectPunct(".");
        const Token& m = peek();
        if (!(m.is(TokenKind::Identifier, "nodes") || m.is(TokenKind::Keyword, "nodes")))
            fail("'nodes'");
        advance();
        expectPunct("(");
        expectPunct(")");
        expectKeyword("from");
        bfs.root = parseExpr();
        expectPunct(")");
        ++bfsDepth_;
        bfs.body = parseBlock();
        --bfsDepth_;
        return makeStmt(start.span, std::move(bfs));
    }

    StmtPtr parseIterateReverse() {
        const Token& start = peek();
        advance();
        expectPunct("(");
        IterateRevStmt rev;
        if (!peek().isPunct(")")) rev.filter = parseExpr();
        expectPunct(")");
        // The reverse pass runs after the forward pass completes; nested BFS
        // constructs inside it are not meaningful.
        rev.body = parseBlock();
        return makeStmt(start.span, std::move(rev));
    }

    StmtPtr parseIf() {
        const Token& start = peek();
        advance();
        expectPunct("(");
        IfStmt s;
        s.cond = parseExpr();
        expectPunct(")");
        s.thenBlock = parseBlockOrSingle();
        if (peek().isKeyword("else")) {
            advance();
            s.elseBlock = parseBlockOrSingle();
        }
        return makeStmt(start.span, std::move(s));
    }

    StmtPtr parseReturn() {
        const Token& start = peek();
        advance();
        ReturnStmt r;
        if (!peek().isPunct(";")) r.value = parseExpr();
        expectPunct(";");
        return makeStmt(start.span, std::move(r));
    }

    // <t0, t1, ...> = <Min(cur, cand), v1, ...>;
    StmtPtr parseMinMaxAssign() {
        const Token& start = peek();
        expectOp("<");
        MinMaxAssignStmt mm;
        while (true) {
            mm.targets.push_back(parseLValue());
            if (!acceptPunct(",")) break;
        }
        expectOp(">");
        expectOp("=");
        expectOp("<");
        const Token& kind = peek();
        if (kind.isKeyword("Min"))
            mm.isMin = true;
        else if (kind.isKeyword("Max"))
            mm.isMin = false;
        else
            fail("'Min' or 'Max'");
        advance();
        expectPunct("(");
        mm.compareCurrent = parseExpr();
        expectPunct(",");
        mm.compareCandidate = parseExpr();
        expectPunct(")");
        // Attached values stop below relational precedence so that the
        // closing '>' of the tuple is not eaten as a comparison; parenthesize
        // to attach a relational expression.
        while (acceptPunct(",")) mm.attachedValues.push_back(parseAdditive());
        expectOp(">");
        expectPunct(";");
        if (mm.attachedValues.size() + 1 != mm.targets.size())
            throw parseError(start.span,
                             "Min/Max assignment has " + std::to_string(mm.targets.size()) +
                                 " target(s) but " + std::to_string(mm.attachedValues.size() + 1) +
                                 " value(s)");
        return makeStmt(start.span, std::move(mm));
    }

    ExprPtr parseLValue() {
        ExprPtr e = parsePostfix();
        if (!e->is<VarRef>() && !e->is<PropAccess>())
            throw parseError(e->span, "expected an assignable variable or property access");
        return e;
    }

    StmtPtr parseAssignOrCall() {
        const Token& start = peek();
        ExprPtr e = parsePostfix();
        if (peek().isOp("=")) {
            advance();
            AssignStmt s;
            if (!e->is<VarRef>() && !e->is<PropAccess>())
                throw parseError(e->span, "expected an assignable variable or property access");
            s.target = std::move(e);
            s.value = parseExpr();
            expectPunct(";");
            return makeStmt(start.span, std::move(s));
        }
        for (auto [tok, op] : {std::pair{"+=", ReduceOp::Sum}, std::pair{"*=", ReduceOp::Product},
                               std::pair{"&&=", ReduceOp::All}, std::pair{"||=", ReduceOp::Any}}) {
            if (peek().isOp(tok)) {
                advance();
                ReduceAssignStmt s;
                if (!e->is<VarRef>() && !e->is<PropAccess>())
                    throw parseError(e->span, "expected an assignable variable or property access");
                s.target = std::move(e);
                s.op = op;
                s.value = parseExpr();
                expectPunct(";");
                return makeStmt(start.span, std::move(s));
            }
        }
        if (peek().isOp("++")) {
            advance();
            ReduceAssignStmt s;
            if (!e->is<VarRef>() && !e->is<PropAccess>())
                throw parseError(e->span, "expected an assignable variable or property access");
            s.target = std::move(e);
            s.op = ReduceOp::Count;
            expectPunct(";");
            return makeStmt(start.span, std::move(s));
        }
        if (peek().isPunct(";")) {
            if (!e->is<MethodCall>())
                throw parseError(e->span, "expression statements must be method calls");
            advance();
            CallStmt s;
            s.call = std::move(e);
            return makeStmt(start.span, std::move(s));
        }
        fail("'=', a reduction operator, or ';'");
    }

    // ---- expressions ----

    ExprPtr parseExpr() { return parseOr(); }

    ExprPtr parseOr() {
        ExprPtr lhs = parseAnd();
        while (peek().isOp("||")) {
            SourceSpan sp = peek().span;
            advance();
            lhs = makeExpr(sp, BinaryExpr{BinaryOp::Or, std::move(lhs), parseAnd()});
        }
        return lhs;
    }

    ExprPtr parseAnd() {
        ExprPtr lhs = parseEquality();
        while (peek().isOp("&&")) {
            SourceSpan sp = peek().span;
            advance();
            lhs = makeExpr(sp, BinaryExpr{BinaryOp::And, std::move(lhs), parseEquality()});
        }
        return lhs;
    }

    ExprPtr parseEquality() {
        ExprPtr lhs = parseRelational();
        while (peek().isOp("==") || peek().isOp("!=")) {
            BinaryOp op = peek().isOp("==") ? BinaryOp::Eq : BinaryOp::Ne;
            SourceSpan sp = peek().span;
            advance();
            lhs = makeExpr(sp, BinaryExpr{op, std::move(lhs), parseRelational()});
        }
        return lhs;
    }

    ExprPtr parseRelational() {
        ExprPtr lhs = parseAdditive();
        while (peek().isOp("<") || peek().isOp("<=") || peek().isOp(">") || peek().isOp(">=")) {
            BinaryOp op = peek().isOp("<")    ? BinaryOp::Lt
                          : peek().isOp("<=") ? BinaryOp::Le
                          : peek().isOp(">")  ? BinaryOp::Gt
                                              : BinaryOp::Ge;
            SourceSpan sp = peek().span;
            advance();
            lhs = makeExpr(sp, BinaryExpr{op, std::move(lhs), parseAdditive()});
        }
        return lhs;
    }

    ExprPtr parseAdditive() {
        ExprPtr lhs = parseMultiplicative();
        while (peek().isOp("+") || peek().isOp("-")) {
            BinaryOp op = peek().isOp("+") ? BinaryOp::Add : BinaryOp::Sub;
            SourceSpan sp = peek().span;
            advance();
            lhs = makeExpr(sp, BinaryExpr{op, std::move(lhs), parseMultiplicative()});
        }
        return lhs;
    }

    ExprPtr parseMultiplicative() {
        ExprPtr lhs = parseUnary();
        while (peek().isOp("*") || peek().isOp("/")) {
            BinaryOp op = peek().isOp("*") ? BinaryOp::Mul : BinaryOp::Div;
            SourceSpan sp = peek().span;
            advance();
            lhs = makeExpr(sp, BinaryExpr{op, std::move(lhs), parseUnary()});
        }
        return lhs;
    }

    ExprPtr parseUnary() {
        if (peek().isOp("!")) {
            SourceSpan sp = peek().span;
            advance();
            return makeExpr(sp, UnaryExpr{UnaryOp::Not, parseUnary()});
        }
        if (peek().isOp("-")) {
            SourceSpan sp = peek().span;
            advance();
            return makeExpr(sp, UnaryExpr{UnaryOp::Neg, parseUnary()});
        }
        return parsePostfix();
    }

    ExprPtr parsePostfix() {
        ExprPtr e = parsePrimary();
        while (peek().isPunct(".")) {
            advance();
            const Token& name = peek();
            if (!name.is(TokenKind::Identifier) && !name.is(TokenKind::Keyword))
                fail("a property or method name");
            advance();
            if (peek().isPunct("(")) {
                advance();
                MethodCall call;
                call.object = std::move(e);
                call.method = name.lexeme;
                if (!peek().isPunct(")")) {
                    while (true) {
                        // attachNodeProperty-style named argument: ident = expr
                        if (peek().is(TokenKind::Identifier) && peek(1).isOp("=")) {
                            call.argNames.push_back(advance().lexeme);
                            advance();  // '='
                            call.args.push_back(parseExpr());
                        } else {
                            call.argNames.emplace_back();
                            call.args.push_back(parseExpr());
                        }
                        if (!acceptPunct(",")) break;
                    }
                }
                expectPunct(")");
                e = makeExpr(name.span, std::move(call));
            } else {
                e = makeExpr(name.span, PropAccess{std::move(e), name.lexeme});
            }
        }
        return e;
    }

    ExprPtr parsePrimary() {
        const Token& t = peek();
        switch (t.kind) {
            case TokenKind::IntLiteral: {
                advance();
                int64_t v = 0;
                auto [p, ec] = std::from_chars(t.lexeme.data(), t.lexeme.data() + t.lexeme.size(), v);
                if (ec != std::errc())
                    throw parseError(t.span, "integer literal out of range");
                return makeExpr(t.span, IntLit{v});
            }
            case TokenKind::FloatLiteral: {
                advance();
                return makeExpr(t.span, FloatLit{std::strtod(t.lexeme.c_str(), nullptr), t.lexeme});
            }
            case TokenKind::BoolLiteral:
                advance();
                return makeExpr(t.span, BoolLit{t.lexeme == "True"});
            case TokenKind::Identifier:
                advance();
                return makeExpr(t.span, VarRef{t.lexeme});
            case TokenKind::Keyword:
                if (t.lexeme == "INF") {
                    advance();
                    return makeExpr(t.span, InfLit{});
                }
                break;
            case TokenKind::Punctuation:
                if (t.lexeme == "(") {
                    advance();
                    ExprPtr e = parseExpr();
                    expectPunct(")");
                    return e;
                }
                break;
            default:
                break;
        }
        fail("an expression");
    }
};

}  // namespace

Program parse(const std::vector<Token>& tokens) { return Parser(tokens).parseProgram(); }

Program parseSource(const std::string& source) { return parse(tokenize(source)); }

}  // namespace graphdsl
