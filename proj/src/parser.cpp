#include <cctype>
#include <functional>
#include <set>
#include <sstream>

#include "heapinv/syntax.hpp"

namespace heapinv {

using namespace ast;

std::string format_diagnostic(std::string_view file, const Diagnostic& d) {
    std::ostringstream os;
    os << file << ':' << d.pos.line << ':' << d.pos.col << ": " << d.message;
    return os.str();
}

namespace {
std::string first_message(const std::vector<Diagnostic>& d) {
    if (d.empty())
        return "error";
    return std::to_string(d.front().pos.line) + ":" + std::to_string(d.front().pos.col) + ": " + d.front().message;
}
}  // namespace

DiagnosticError::DiagnosticError(std::vector<Diagnostic> diags)
    : std::runtime_error(first_message(diags)), diags_(std::move(diags)) {}

std::string DiagnosticError::render(std::string_view file) const {
    std::string out;
    for (const auto& d : diags_) {
        out += format_diagnostic(file, d);
        out += '\n';
    }
    return out;
}

namespace {

enum class Tok { Ident, Int, Punct, End };

struct Token {
    Tok kind = Tok::End;
    std::string text;
    SourcePos pos;
};

[[noreturn]] void fail(SourcePos pos, std::string msg) { throw DiagnosticError({Diagnostic{pos, std::move(msg)}}); }

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$'; }

std::vector<Token> lex(std::string_view src) {
    std::vector<Token> out;
    int line = 1, col = 1;
    std::size_t i = 0;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n; ++k, ++i) {
            if (src[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
    };
    while (i < src.size()) {
        char c = src[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
            continue;
        }
        if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
            while (i < src.size() && src[i] != '\n')
                advance(1);
            continue;
        }
        if (c == '/' && i + 1 < src.size() && src[i + 1] == '*') {
            SourcePos start{line, col};
            advance(2);
            while (i + 1 < src.size() && !(src[i] == '*' && src[i + 1] == '/'))
                advance(1);
            if (i + 1 >= src.size())
                fail(start, "unterminated comment");
            advance(2);
            continue;
        }
        SourcePos pos{line, col};
        if (ident_start(c)) {
            std::size_t j = i;
            while (j < src.size() && ident_char(src[j]))
                ++j;
            out.push_back({Tok::Ident, std::string(src.substr(i, j - i)), pos});
            advance(j - i);
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t j = i;
            while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j])))
                ++j;
            if (j < src.size() && ident_start(src[j]))
                fail(pos, "malformed number");
            out.push_back({Tok::Int, std::string(src.substr(i, j - i)), pos});
            advance(j - i);
            continue;
        }
        static const char* two[] = {":=", "<=", ">=", "!=", "&&", "||"};
        bool matched = false;
        for (const char* t : two) {
            if (src.substr(i, 2) == t) {
                out.push_back({Tok::Punct, t, pos});
                advance(2);
                matched = true;
                break;
            }
        }
        if (matched)
            continue;
        if (std::string_view("{}();,:|+-*/%<>=!").find(c) != std::string_view::npos) {
            out.push_back({Tok::Punct, std::string(1, c), pos});
            advance(1);
            continue;
        }
        fail(pos, std::string("unexpected character '") + c + "'");
    }
    out.push_back({Tok::End, "", {line, col}});
    return out;
}

const std::set<std::string, std::less<>> kReserved = {"prog",   "adt",    "pred",  "var",    "if",   "else",
                                                      "while",  "skip",   "assume", "assert", "alloc", "read",
                                                      "write",  "havoc",  "nondet", "null",   "defObj", "Int",
                                                      "Addr"};

class Parser {
public:
    explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

    Program program() {
        expect_word("prog");
        expect("{");
        declarations();
        finish_declarations();
        p_.body = block_until_close();
        expect("}");
        if (peek().kind != Tok::End)
            fail(peek().pos, "unexpected input after program");
        assign_locations_in_place(p_);
        return std::move(p_);
    }

    ExprPtr standalone_expr(const Program& scope, std::function<bool(std::string_view)> extra_var) {
        p_ = scope;
        extra_var_ = std::move(extra_var);
        auto e = expr();
        if (peek().kind != Tok::End)
            fail(peek().pos, "unexpected input after expression");
        return e;
    }

    // used by the formula file reader
    Parser& with_program(const Program& scope) {
        p_ = scope;
        return *this;
    }
    void set_extra_vars(std::function<bool(std::string_view)> f) { extra_var_ = std::move(f); }
    const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
    Token next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
    bool at(std::string_view punct) const { return peek().kind == Tok::Punct && peek().text == punct; }
    bool at_word(std::string_view w) const { return peek().kind == Tok::Ident && peek().text == w; }
    void expect(std::string_view punct) {
        if (!at(punct))
            fail(peek().pos, "expected '" + std::string(punct) + "' but found " + describe(peek()));
        next();
    }
    void expect_word(std::string_view w) {
        if (!at_word(w))
            fail(peek().pos, "expected '" + std::string(w) + "' but found " + describe(peek()));
        next();
    }
    Token ident(std::string_view what) {
        if (peek().kind != Tok::Ident || kReserved.count(peek().text))
            fail(peek().pos, "expected " + std::string(what) + " but found " + describe(peek()));
        return next();
    }
    static std::string describe(const Token& t) {
        if (t.kind == Tok::End)
            return "end of input";
        return "'" + t.text + "'";
    }

    ExprPtr expr() { return parse_or(); }

private:
    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    Program p_;
    std::function<bool(std::string_view)> extra_var_;
    std::set<std::string, std::less<>> fn_names_;  // ctors, selectors, testers, preds
    bool input_set_ = false, seed_set_ = false;

    void check_fresh_fn(const Token& t) {
        if (fn_names_.count(t.text) || p_.find_var(t.text))
            fail(t.pos, "duplicate declaration of '" + t.text + "'");
        fn_names_.insert(t.text);
    }

    TypeTag type() {
        Token t = next();
        if (t.kind != Tok::Ident)
            fail(t.pos, "expected a type but found " + describe(t));
        if (t.text == "Int")
            return TypeTag::integer();
        if (t.text == "Addr")
            return TypeTag::address();
        if (!p_.find_adt(t.text))
            fail(t.pos, "unknown type '" + t.text + "'");
        return TypeTag::object(t.text);
    }

    bool designation_ahead() const {
        static const std::set<std::string, std::less<>> kws = {"heaptype", "input", "seed", "prophecy", "fuel"};
        return peek().kind == Tok::Ident && kws.count(peek().text) && peek(1).kind == Tok::Ident &&
               peek(2).kind == Tok::Punct && peek(2).text == ";";
    }

    void declarations() {
        for (;;) {
            if (at_word("adt")) {
                adt_decl();
            } else if (at_word("pred")) {
                next();
                Token name = ident("predicate name");
                check_fresh_fn(name);
                PredDecl d{name.text, {}, name.pos};
                expect("(");
                if (!at(")")) {
                    d.params.push_back(type());
                    while (at(",")) {
                        next();
                        d.params.push_back(type());
                    }
                }
                expect(")");
                expect(";");
                p_.preds.push_back(std::move(d));
            } else if (at_word("var")) {
                next();
                Token name = ident("variable name");
                if (p_.find_var(name.text) || fn_names_.count(name.text))
                    fail(name.pos, "duplicate declaration of '" + name.text + "'");
                expect(":");
                TypeTag t = type();
                expect(";");
                p_.vars.push_back({name.text, t, name.pos});
            } else if (designation_ahead()) {
                Token kw = next();
                Token name = next();
                expect(";");
                if (kw.text == "heaptype") {
                    if (!p_.find_adt(name.text))
                        fail(name.pos, "unknown type '" + name.text + "'");
                    p_.heap_type = name.text;
                } else {
                    if (kReserved.count(name.text))
                        fail(name.pos, "expected variable name but found '" + name.text + "'");
                    if (kw.text == "input") {
                        p_.input_var = name.text;
                        input_set_ = true;
                    } else if (kw.text == "seed") {
                        p_.seed_var = name.text;
                        seed_set_ = true;
                    } else if (kw.text == "prophecy") {
                        p_.prophecy_var = name.text;
                    } else {
                        p_.fuel_var = name.text;
                    }
                }
            } else {
                break;
            }
        }
    }

    void finish_declarations() {
        for (const std::string* n : {&p_.input_var, &p_.seed_var}) {
            if (!p_.find_var(*n)) {
                if (fn_names_.count(*n))
                    fail(peek().pos, "designated variable '" + *n + "' clashes with a declaration");
                p_.vars.push_back({*n, TypeTag::integer(), {}});
            }
        }
        for (const auto* o : {&p_.prophecy_var, &p_.fuel_var})
            if (*o && !p_.find_var(**o))
                fail(peek().pos, "unknown identifier '" + **o + "'");
        if (!p_.heap_type && p_.adts.size() == 1)
            p_.heap_type = p_.adts.front().name;
    }

    void adt_decl() {
        next();
        Token name = ident("type name");
        if (p_.find_adt(name.text) || name.text == "Int" || name.text == "Addr")
            fail(name.pos, "duplicate declaration of '" + name.text + "'");
        // registered before the constructors so a self reference reaches the checker
        p_.adts.push_back({name.text, {}, name.pos});
        std::size_t idx = p_.adts.size() - 1;
        expect("{");
        std::vector<Constructor> ctors;
        for (;;) {
            Token cn = ident("constructor name");
            check_fresh_fn(cn);
            if (!fn_names_.insert("is_" + cn.text).second)
                fail(cn.pos, "duplicate declaration of 'is_" + cn.text + "'");
            Constructor c{cn.text, {}};
            expect("(");
            if (!at(")")) {
                for (;;) {
                    Token fn = ident("selector name");
                    check_fresh_fn(fn);
                    expect(":");
                    c.fields.push_back({fn.text, type()});
                    if (!at(","))
                        break;
                    next();
                }
            }
            expect(")");
            ctors.push_back(std::move(c));
            if (!at("|"))
                break;
            next();
        }
        expect("}");
        p_.adts[idx].ctors = std::move(ctors);
    }

    bool is_var(std::string_view n) const { return p_.find_var(n) || (extra_var_ && extra_var_(n)); }

    Token var_name() {
        Token t = ident("variable name");
        if (!is_var(t.text))
            fail(t.pos, "unknown identifier '" + t.text + "'");
        return t;
    }

    Block block_until_close() {
        Block b;
        while (!at("}") && peek().kind != Tok::End)
            b.push_back(stmt());
        return b;
    }

    Block braced() {
        expect("{");
        Block b = block_until_close();
        expect("}");
        return b;
    }

    PredApp pred_app() {
        Token name = next();
        PredApp app{name.text, {}};
        expect("(");
        if (!at(")")) {
            app.args.push_back(expr());
            while (at(",")) {
                next();
                app.args.push_back(expr());
            }
        }
        expect(")");
        return app;
    }

    bool pred_ahead() const {
        return peek().kind == Tok::Ident && p_.find_pred(peek().text) && peek(1).kind == Tok::Punct &&
               peek(1).text == "(";
    }

    Stmt stmt() {
        SourcePos pos = peek().pos;
        Stmt s = stmt_inner();
        s.pos = pos;
        return s;
    }

    Stmt stmt_inner() {
        if (at_word("skip")) {
            next();
            expect(";");
            return Skip{};
        }
        if (at_word("if")) {
            next();
            expect("(");
            auto c = expr();
            expect(")");
            If s{c, braced(), {}};
            if (at_word("else")) {
                next();
                s.else_branch = braced();
            }
            return s;
        }
        if (at_word("while")) {
            next();
            expect("(");
            auto c = expr();
            expect(")");
            return While{c, braced()};
        }
        if (at_word("assume") || at_word("assert")) {
            bool is_assert = next().text == "assert";
            expect("(");
            Stmt s;
            if (pred_ahead()) {
                auto app = pred_app();
                if (is_assert)
                    s = AssertPred{std::move(app)};
                else
                    s = AssumePred{std::move(app)};
            } else {
                auto c = expr();
                if (is_assert)
                    s = Assert{c};
                else
                    s = Assume{c};
            }
            expect(")");
            expect(";");
            return s;
        }
        if (at_word("write")) {
            next();
            expect("(");
            Token p = var_name();
            expect(",");
            auto e = expr();
            expect(")");
            expect(";");
            return Write{p.text, e};
        }
        if (at_word("havoc")) {
            next();
            expect("(");
            Token x = var_name();
            expect(")");
            expect(";");
            return Havoc{x.text, false};
        }
        if (peek().kind == Tok::Ident && !kReserved.count(peek().text)) {
            Token x = var_name();
            expect(":=");
            Stmt s;
            if (at_word("alloc")) {
                next();
                expect("(");
                auto e = expr();
                expect(")");
                s = Alloc{x.text, e};
            } else if (at_word("read")) {
                next();
                expect("(");
                Token p = var_name();
                expect(")");
                s = Read{x.text, p.text};
            } else if (at_word("nondet")) {
                next();
                expect("(");
                expect(")");
                s = Havoc{x.text, true};
            } else {
                s = Assign{x.text, expr()};
            }
            expect(";");
            return s;
        }
        fail(peek().pos, "expected a statement but found " + describe(peek()));
    }

    static ExprPtr at_pos(ExprPtr e, SourcePos pos) {
        auto copy = std::make_shared<Expr>(*e);
        copy->pos = pos;
        return copy;
    }

    ExprPtr parse_or() {
        auto lhs = parse_and();
        while (at("||")) {
            SourcePos pos = next().pos;
            lhs = at_pos(binary(BinOp::Or, lhs, parse_and()), pos);
        }
        return lhs;
    }
    ExprPtr parse_and() {
        auto lhs = parse_eq();
        while (at("&&")) {
            SourcePos pos = next().pos;
            lhs = at_pos(binary(BinOp::And, lhs, parse_eq()), pos);
        }
        return lhs;
    }
    ExprPtr parse_eq() {
        auto lhs = parse_rel();
        while (at("=") || at("!=")) {
            Token op = next();
            lhs = at_pos(binary(op.text == "=" ? BinOp::Eq : BinOp::Ne, lhs, parse_rel()), op.pos);
        }
        return lhs;
    }
    ExprPtr parse_rel() {
        auto lhs = parse_add();
        while (at("<") || at("<=") || at(">") || at(">=")) {
            Token op = next();
            BinOp b = op.text == "<" ? BinOp::Lt : op.text == "<=" ? BinOp::Le : op.text == ">" ? BinOp::Gt : BinOp::Ge;
            lhs = at_pos(binary(b, lhs, parse_add()), op.pos);
        }
        return lhs;
    }
    ExprPtr parse_add() {
        auto lhs = parse_mul();
        while (at("+") || at("-")) {
            Token op = next();
            lhs = at_pos(binary(op.text == "+" ? BinOp::Add : BinOp::Sub, lhs, parse_mul()), op.pos);
        }
        return lhs;
    }
    ExprPtr parse_mul() {
        auto lhs = parse_unary();
        while (at("*") || at("/") || at("%")) {
            Token op = next();
            BinOp b = op.text == "*" ? BinOp::Mul : op.text == "/" ? BinOp::Div : BinOp::Mod;
            lhs = at_pos(binary(b, lhs, parse_unary()), op.pos);
        }
        return lhs;
    }
    ExprPtr parse_unary() {
        if (at("-")) {
            Token op = next();
            if (peek().kind == Tok::Int) {
                Token n = next();
                return at_pos(lit(*Integer::parse("-" + n.text)), op.pos);
            }
            return at_pos(unary(UnOp::Neg, parse_unary()), op.pos);
        }
        if (at("!")) {
            Token op = next();
            return at_pos(unary(UnOp::Not, parse_unary()), op.pos);
        }
        return primary();
    }

    std::vector<ExprPtr> call_args() {
        std::vector<ExprPtr> args;
        expect("(");
        if (!at(")")) {
            args.push_back(expr());
            while (at(",")) {
                next();
                args.push_back(expr());
            }
        }
        expect(")");
        return args;
    }

    ExprPtr primary() {
        Token t = peek();
        if (t.kind == Tok::Int) {
            next();
            return at_pos(lit(*Integer::parse(t.text)), t.pos);
        }
        if (at("(")) {
            next();
            auto e = expr();
            expect(")");
            return e;
        }
        if (t.kind != Tok::Ident)
            fail(t.pos, "expected an expression but found " + describe(t));
        next();
        if (t.text == "null")
            return at_pos(null_lit(), t.pos);
        if (t.text == "defObj")
            return at_pos(def_obj(), t.pos);
        if (at("(")) {
            if (p_.find_ctor(t.text))
                return at_pos(ctor_app(t.text, call_args()), t.pos);
            if (p_.find_selector(t.text)) {
                auto args = call_args();
                if (args.size() != 1)
                    fail(t.pos, "arity mismatch: selector '" + t.text + "' takes 1 argument");
                return at_pos(select(t.text, args[0]), t.pos);
            }
            if (t.text.starts_with("is_") && p_.find_ctor(t.text.substr(3))) {
                auto args = call_args();
                if (args.size() != 1)
                    fail(t.pos, "arity mismatch: tester '" + t.text + "' takes 1 argument");
                return at_pos(is_ctor(t.text.substr(3), args[0]), t.pos);
            }
            if (p_.find_pred(t.text))
                fail(t.pos, "predicate '" + t.text + "' used outside assert/assume");
            fail(t.pos, "unknown identifier '" + t.text + "'");
        }
        if (kReserved.count(t.text))
            fail(t.pos, "expected an expression but found '" + t.text + "'");
        if (!is_var(t.text))
            fail(t.pos, "unknown identifier '" + t.text + "'");
        return at_pos(var(t.text), t.pos);
    }
};

}  // namespace

Program parse_program(std::string_view text) { return Parser(lex(text)).program(); }

ExprPtr parse_expr(std::string_view text, const Program& scope) {
    return Parser(lex(text)).standalone_expr(scope, nullptr);
}

std::vector<FormulaDef> parse_formula_file(std::string_view text, const Program& scope) {
    Parser ps(lex(text));
    Program types_only = scope;  // formulas are closed over their parameters
    types_only.vars.clear();
    types_only.body.clear();
    ps.with_program(types_only);
    std::vector<FormulaDef> defs;
    std::set<std::string, std::less<>> seen;
    while (ps.peek().kind != Tok::End) {
        Token name = ps.ident("predicate name");
        const PredDecl* decl = scope.find_pred(name.text);
        if (!decl)
            fail(name.pos, "unknown identifier '" + name.text + "'");
        if (!seen.insert(name.text).second)
            fail(name.pos, "duplicate declaration of '" + name.text + "'");
        FormulaDef d{name.text, {}, nullptr, name.pos};
        ps.expect("(");
        if (!ps.at(")")) {
            for (;;) {
                d.params.push_back(ps.ident("parameter name").text);
                if (!ps.at(","))
                    break;
                ps.next();
            }
        }
        ps.expect(")");
        if (d.params.size() != decl->params.size())
            fail(name.pos, "arity mismatch: '" + name.text + "' has " + std::to_string(decl->params.size()) +
                               " parameters");
        ps.expect(":=");
        auto params = d.params;
        ps.set_extra_vars([params](std::string_view n) {
            for (const auto& q : params)
                if (q == n)
                    return true;
            return false;
        });
        d.body = ps.expr();
        ps.expect(";");
        defs.push_back(std::move(d));
    }
    return defs;
}

}  // namespace heapinv
