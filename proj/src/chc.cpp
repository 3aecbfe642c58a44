#include "heapinv/chc.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <set>
#include <sstream>

#include "heapinv/typecheck.hpp"

extern char** environ;

namespace heapinv::chc {

using namespace ast;

std::string Term::to_string() const {
    if (!is_app) return atom;
    std::string s = "(" + atom;
    for (const auto& a : args) s += " " + a.to_string();
    return s + ")";
}

namespace {

const std::set<std::string>& reserved() {
    static const std::set<std::string> r = {"and", "or", "not", "ite", "distinct", "true", "false", "forall",
                                            "exists", "let", "abs", "div", "mod", "Int", "Bool", "par", "_",
                                            "as", "!", "=>", "assert", "match"};
    return r;
}

bool plain_symbol(const std::string& s) {
    if (s.empty() || std::isdigit(static_cast<unsigned char>(s[0]))) return false;
    for (char c : s)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '.') return false;
    return true;
}

Term T(std::string s) { return Term::sym(std::move(s)); }
Term A(std::string h, std::vector<Term> a) { return Term::app(std::move(h), std::move(a)); }

Term numeral(const Integer& v) {
    if (v.sign() < 0) return A("-", {T((-v).to_string())});
    return T(v.to_string());
}

Term mk_not(Term t) {
    if (t.is_true()) return T("false");
    if (t.is_false()) return T("true");
    if (t.is_app && t.atom == "not") return t.args[0];
    return A("not", {std::move(t)});
}

Term mk_and(const std::vector<Term>& ts) {
    std::vector<Term> out;
    for (const auto& t : ts) {
        if (t.is_false()) return T("false");
        if (t.is_true()) continue;
        out.push_back(t);
    }
    if (out.empty()) return T("true");
    if (out.size() == 1) return out[0];
    return A("and", out);
}

Term mk_or(const std::vector<Term>& ts) {
    std::vector<Term> out;
    for (const auto& t : ts) {
        if (t.is_true()) return T("true");
        if (t.is_false()) continue;
        out.push_back(t);
    }
    if (out.empty()) return T("false");
    if (out.size() == 1) return out[0];
    return A("or", out);
}

Term mk_ite01(Term b) {
    if (b.is_true()) return T("1");
    if (b.is_false()) return T("0");
    return A("ite", {std::move(b), T("1"), T("0")});
}

using Val = std::vector<Term>;

struct State {
    std::vector<Term> atoms;
    std::vector<Term> pc;
    std::map<std::string, Val> sigma;
    std::vector<std::pair<std::string, std::string>> qvars;
    bool dead = false;

    void add_pc(Term t) {
        if (t.is_true()) return;
        if (t.is_false()) dead = true;
        pc.push_back(std::move(t));
    }
};

Term eq_term(const Term& a, const Term& b) {
    if (!a.is_app && !b.is_app && a.atom == b.atom) return T("true");
    return A("=", {a, b});
}

class Translator {
public:
    Translator(const Program& p, const ChcOptions& opts) : p_(p), flat_(opts.flatten_objects) {}

    ClauseSet run() {
        if (!flat_) cs_.datatypes = datatypes();
        for (const auto& d : p_.preds) {
            PredicateSig s{quote_symbol(d.name), {}, false};
            for (const auto& t : d.params) append(s.sorts, sorts_of(t));
            cs_.predicates.push_back(std::move(s));
        }
        std::string prefix = "Inv_";
        while (std::any_of(p_.preds.begin(), p_.preds.end(),
                           [&](const PredDecl& d) { return d.name.rfind(prefix, 0) == 0; }))
            prefix = "_" + prefix;
        inv_prefix_ = prefix;

        State entry = unconstrained();
        int k0 = new_location();
        emit(entry, loc_app(k0, entry));
        State s = at_location(k0);
        block(p_.body, s);
        return std::move(cs_);
    }

private:
    const Program& p_;
    bool flat_;
    ClauseSet cs_;
    std::string inv_prefix_;
    int fresh_ = 0;

    template <class V>
    static void append(V& a, const V& b) {
        a.insert(a.end(), b.begin(), b.end());
    }

    static std::string var_base(const std::string& n) { return reserved().count(n) ? n + "!v" : n; }

    // --- object layout
    bool multi(const AdtDecl& a) const { return a.ctors.size() > 1; }

    std::size_t width(const TypeTag& t) const {
        if (!t.is_obj() || !flat_) return 1;
        const auto* a = p_.find_adt(t.adt);
        std::size_t w = multi(*a) ? 1 : 0;
        for (const auto& c : a->ctors)
            for (const auto& f : c.fields) w += width(f.type);
        return w;
    }

    std::size_t field_offset(const AdtDecl& a, std::size_t ci, std::size_t fi) const {
        std::size_t off = multi(a) ? 1 : 0;
        for (std::size_t c = 0; c < a.ctors.size(); ++c)
            for (std::size_t f = 0; f < a.ctors[c].fields.size(); ++f) {
                if (c == ci && f == fi) return off;
                off += width(a.ctors[c].fields[f].type);
            }
        return off;
    }

    std::vector<std::string> sorts_of(const TypeTag& t) const {
        if (!t.is_obj()) return {"Int"};
        if (!flat_) return {quote_symbol(t.adt)};
        return std::vector<std::string>(width(t), "Int");
    }

    // component names for a variable of type t
    void component_names(const std::string& base, const TypeTag& t, std::vector<std::string>& out) const {
        if (!t.is_obj() || !flat_) {
            out.push_back(base);
            return;
        }
        const auto* a = p_.find_adt(t.adt);
        if (multi(*a)) out.push_back(base + ".tag");
        for (const auto& c : a->ctors)
            for (const auto& f : c.fields) component_names(base + "." + f.name, f.type, out);
    }

    std::string datatypes() const {
        if (p_.adts.empty()) return {};
        std::string heads, bodies;
        for (const auto& a : p_.adts) {
            heads += "(" + quote_symbol(a.name) + " 0) ";
            bodies += "(";
            for (const auto& c : a.ctors) {
                bodies += "(" + quote_symbol(c.name);
                for (const auto& f : c.fields)
                    bodies += " (" + quote_symbol(f.name) + " " + sorts_of(f.type)[0] + ")";
                bodies += ")";
            }
            bodies += ") ";
        }
        heads.pop_back();
        bodies.pop_back();
        return "(declare-datatypes (" + heads + ") (" + bodies + "))";
    }

    Val ctor_val(const AdtDecl& a, std::size_t ci, const std::vector<Val>& args) const {
        const auto& c = a.ctors[ci];
        if (!flat_) {
            if (c.fields.empty()) return {T(quote_symbol(c.name))};
            std::vector<Term> xs;
            for (const auto& v : args) xs.push_back(v[0]);
            return {A(quote_symbol(c.name), std::move(xs))};
        }
        Val out;
        if (multi(a)) out.push_back(T(std::to_string(ci)));
        for (std::size_t k = 0; k < a.ctors.size(); ++k)
            for (std::size_t f = 0; f < a.ctors[k].fields.size(); ++f)
                append(out, k == ci ? args[f] : default_val(a.ctors[k].fields[f].type));
        return out;
    }

    Val default_val(const TypeTag& t) const {
        if (!t.is_obj()) return {T("0")};
        const auto* a = p_.find_adt(t.adt);
        std::vector<Val> args;
        for (const auto& f : a->ctors[0].fields) args.push_back(default_val(f.type));
        return ctor_val(*a, 0, args);
    }

    // fresh value; flattened objects stay canonical (inactive fields at their defaults)
    Val fresh_val(const std::string& base, const TypeTag& t, State& s) {
        if (!t.is_obj() || !flat_) {
            std::string name = quote_symbol(base + "!" + std::to_string(++fresh_));
            s.qvars.emplace_back(name, sorts_of(t)[0]);
            return {T(name)};
        }
        const auto* a = p_.find_adt(t.adt);
        if (!multi(*a)) {
            std::vector<Val> args;
            for (const auto& f : a->ctors[0].fields) args.push_back(fresh_val(base + "." + f.name, f.type, s));
            return ctor_val(*a, 0, args);
        }
        Term tag = fresh_val(base + ".tag", TypeTag::integer(), s)[0];
        s.add_pc(A("<=", {T("0"), tag}));
        s.add_pc(A("<", {tag, T(std::to_string(a->ctors.size()))}));
        Val out{tag};
        for (std::size_t k = 0; k < a->ctors.size(); ++k) {
            Term is_k = eq_term(tag, T(std::to_string(k)));
            for (const auto& f : a->ctors[k].fields) {
                Val fv = fresh_val(base + "." + f.name, f.type, s), dv = default_val(f.type);
                for (std::size_t i = 0; i < fv.size(); ++i) out.push_back(A("ite", {is_k, fv[i], dv[i]}));
            }
        }
        return out;
    }

    int new_location() {
        int k = 0;
        for (const auto& s : cs_.predicates) k += s.location ? 1 : 0;
        PredicateSig sig{inv_prefix_ + std::to_string(k), {}, true};
        for (const auto& v : p_.vars) append(sig.sorts, sorts_of(v.type));
        cs_.predicates.push_back(std::move(sig));
        return k;
    }

    Term loc_app(int k, const State& s) const {
        std::vector<Term> args;
        for (const auto& v : p_.vars) append(args, s.sigma.at(v.name));
        if (args.empty()) return T(inv_prefix_ + std::to_string(k));
        return A(inv_prefix_ + std::to_string(k), std::move(args));
    }

    State unconstrained() const {
        State s;
        for (const auto& v : p_.vars) {
            std::vector<std::string> names;
            component_names(var_base(v.name), v.type, names);
            auto sorts = sorts_of(v.type);
            Val val;
            for (std::size_t i = 0; i < names.size(); ++i) {
                std::string n = quote_symbol(names[i]);
                s.qvars.emplace_back(n, sorts[i]);
                val.push_back(T(n));
            }
            s.sigma.emplace(v.name, std::move(val));
        }
        return s;
    }

    State at_location(int k) const {
        State s = unconstrained();
        s.atoms.push_back(loc_app(k, s));
        return s;
    }

    void emit(const State& s, std::optional<Term> head) {
        if (s.dead) return;
        Clause c;
        c.vars = s.qvars;
        c.atoms = s.atoms;
        c.constraint = mk_and(s.pc);
        if (c.constraint.is_false()) return;
        c.head = std::move(head);
        cs_.clauses.push_back(std::move(c));
    }

    State cut(const State& s) {
        int k = new_location();
        emit(s, loc_app(k, s));
        State n = at_location(k);
        n.dead = s.dead;
        return n;
    }

    // --- expressions; divisors collects terms that must be non-zero
    Term to_int(const ExprPtr& e, const State& s, std::vector<Term>& divisors) const {
        return to_val(e, s, divisors)[0];
    }

    Val to_val(const ExprPtr& e, const State& s, std::vector<Term>& divisors) const {
        return std::visit(
            [&](const auto& n) -> Val {
                using N = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<N, IntLit>) return {numeral(n.value)};
                else if constexpr (std::is_same_v<N, VarRef>) return s.sigma.at(n.name);
                else if constexpr (std::is_same_v<N, NullLit>) return {T("0")};
                else if constexpr (std::is_same_v<N, DefObjLit>) {
                    auto t = infer_type(p_, e);
                    return default_val(t ? *t : TypeTag::object(*p_.heap_type));
                } else if constexpr (std::is_same_v<N, Unary>) {
                    if (n.op == UnOp::Neg) return {A("-", {to_int(n.operand, s, divisors)})};
                    return {mk_ite01(to_bool(e, s, divisors))};
                } else if constexpr (std::is_same_v<N, Binary>) {
                    if (!is_arith(n.op)) return {mk_ite01(to_bool(e, s, divisors))};
                    Term a = to_int(n.lhs, s, divisors), b = to_int(n.rhs, s, divisors);
                    switch (n.op) {
                    case BinOp::Add: return {A("+", {a, b})};
                    case BinOp::Sub: return {A("-", {a, b})};
                    case BinOp::Mul: return {A("*", {a, b})};
                    case BinOp::Div: divisors.push_back(b); return {tdiv(a, b)};
                    case BinOp::Mod: divisors.push_back(b); return {A("-", {a, A("*", {b, tdiv(a, b)})})};
                    default: break;
                    }
                    return {T("0")};
                } else if constexpr (std::is_same_v<N, CtorApp>) {
                    auto cl = p_.find_ctor(n.ctor);
                    std::vector<Val> args;
                    for (const auto& a : n.args) args.push_back(to_val(a, s, divisors));
                    return ctor_val(*cl->adt, cl->ctor_index, args);
                } else if constexpr (std::is_same_v<N, Select>) {
                    auto sl = p_.find_selector(n.selector);
                    const auto& c = sl->adt->ctors[sl->ctor_index];
                    const TypeTag& ft = c.fields[sl->field_index].type;
                    Val arg = to_val(n.arg, s, divisors);
                    if (!flat_) {
                        Term sel = A(quote_symbol(n.selector), {arg[0]});
                        if (!multi(*sl->adt)) return {sel};
                        Term test = A("(_ is " + quote_symbol(c.name) + ")", {arg[0]});
                        return {A("ite", {test, sel, default_val(ft)[0]})};
                    }
                    std::size_t off = field_offset(*sl->adt, sl->ctor_index, sl->field_index);
                    Val out(arg.begin() + static_cast<long>(off), arg.begin() + static_cast<long>(off + width(ft)));
                    if (multi(*sl->adt)) {
                        // inactive fields already hold defaults, but keep the guard explicit
                        Term is_c = eq_term(arg[0], T(std::to_string(sl->ctor_index)));
                        Val dv = default_val(ft);
                        for (std::size_t i = 0; i < out.size(); ++i) out[i] = A("ite", {is_c, out[i], dv[i]});
                    }
                    return out;
                } else {
                    auto cl = p_.find_ctor(n.ctor);
                    Val arg = to_val(n.arg, s, divisors);
                    if (!flat_) return {mk_ite01(A("(_ is " + quote_symbol(n.ctor) + ")", {arg[0]}))};
                    if (!multi(*cl->adt)) return {T("1")};
                    return {mk_ite01(eq_term(arg[0], T(std::to_string(cl->ctor_index))))};
                }
            },
            e->node);
    }

    static Term tdiv(const Term& a, const Term& b) {
        Term q = A("div", {A("abs", {a}), A("abs", {b})});
        return A("ite", {A("=", {A(">=", {a, T("0")}), A(">", {b, T("0")})}), q, A("-", {q})});
    }

    Term to_bool(const ExprPtr& e, const State& s, std::vector<Term>& divisors) const {
        if (auto* lit = std::get_if<IntLit>(&e->node)) return T(lit->value.is_zero() ? "false" : "true");
        if (auto* u = std::get_if<Unary>(&e->node); u && u->op == UnOp::Not)
            return mk_not(to_bool(u->operand, s, divisors));
        if (auto* b = std::get_if<Binary>(&e->node)) {
            if (is_logical(b->op)) {
                Term l = to_bool(b->lhs, s, divisors), r = to_bool(b->rhs, s, divisors);
                return b->op == BinOp::And ? mk_and({l, r}) : mk_or({l, r});
            }
            if (is_equality(b->op)) {
                Val l = to_val(b->lhs, s, divisors), r = to_val(b->rhs, s, divisors);
                std::vector<Term> eqs;
                for (std::size_t i = 0; i < l.size(); ++i) eqs.push_back(eq_term(l[i], r[i]));
                Term eq = mk_and(eqs);
                return b->op == BinOp::Eq ? eq : mk_not(eq);
            }
            if (is_order(b->op)) {
                Term l = to_int(b->lhs, s, divisors), r = to_int(b->rhs, s, divisors);
                switch (b->op) {
                case BinOp::Lt: return A("<", {l, r});
                case BinOp::Le: return A("<=", {l, r});
                case BinOp::Gt: return A(">", {l, r});
                default: return A(">=", {l, r});
                }
            }
        }
        return mk_not(A("=", {to_int(e, s, divisors), T("0")}));
    }

    // division by zero fails; afterwards the divisors are known non-zero
    void guard(State& s, const std::vector<Term>& divisors) {
        if (divisors.empty()) return;
        std::vector<Term> zero;
        for (const auto& d : divisors) zero.push_back(A("=", {d, T("0")}));
        State f = s;
        f.add_pc(mk_or(zero));
        emit(f, std::nullopt);
        for (const auto& d : divisors) s.add_pc(A("distinct", {d, T("0")}));
    }

    Val eval_val(const ExprPtr& e, State& s) {
        std::vector<Term> d;
        Val t = to_val(e, s, d);
        guard(s, d);
        return t;
    }
    Term eval_bool(const ExprPtr& e, State& s) {
        std::vector<Term> d;
        Term t = to_bool(e, s, d);
        guard(s, d);
        return t;
    }
    Term eval_app(const PredApp& app, State& s) {
        std::vector<Term> args;
        for (const auto& a : app.args) append(args, eval_val(a, s));
        if (args.empty()) return T(quote_symbol(app.pred));
        return A(quote_symbol(app.pred), std::move(args));
    }

    void block(const Block& b, State& s) {
        for (const auto& st : b) {
            if (s.dead) return;
            stmt(st, s);
        }
    }

    void stmt(const Stmt& st, State& s) {
        std::visit(
            [&](const auto& n) {
                using N = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<N, Assign>) {
                    Val v = eval_val(n.value, s);
                    s.sigma[n.var] = std::move(v);
                } else if constexpr (std::is_same_v<N, Havoc>) {
                    Val v = fresh_val(n.var, p_.find_var(n.var)->type, s);
                    s.sigma[n.var] = std::move(v);
                } else if constexpr (std::is_same_v<N, Skip>) {
                } else if constexpr (std::is_same_v<N, Assume>) {
                    s.add_pc(eval_bool(n.cond, s));
                } else if constexpr (std::is_same_v<N, Assert>) {
                    Term c = eval_bool(n.cond, s);
                    State f = s;
                    f.add_pc(mk_not(c));
                    emit(f, std::nullopt);
                    s.add_pc(c);
                } else if constexpr (std::is_same_v<N, AssumePred>) {
                    Term app = eval_app(n.app, s);
                    if (s.atoms.size() >= 2) s = cut(s);
                    s.atoms.push_back(std::move(app));
                } else if constexpr (std::is_same_v<N, AssertPred>) {
                    Term app = eval_app(n.app, s);
                    emit(s, app);
                } else if constexpr (std::is_same_v<N, If>) {
                    Term c = eval_bool(n.cond, s);
                    State a = s, b = s;
                    a.add_pc(c);
                    b.add_pc(mk_not(c));
                    block(n.then_branch, a);
                    block(n.else_branch, b);
                    if (a.dead && b.dead) {
                        s.dead = true;
                        return;
                    }
                    if (a.dead || b.dead) {
                        s = a.dead ? b : a;
                        return;
                    }
                    int k = new_location();
                    emit(a, loc_app(k, a));
                    emit(b, loc_app(k, b));
                    s = at_location(k);
                } else if constexpr (std::is_same_v<N, While>) {
                    State head = cut(s);
                    Term c = eval_bool(n.cond, head);
                    State body = head;
                    body.add_pc(c);
                    block(n.body, body);
                    // back edge: the head's own location atom is atoms[0]
                    int k = std::stoi(head.atoms[0].atom.substr(inv_prefix_.size()));
                    emit(body, loc_app(k, body));
                    head.add_pc(mk_not(c));
                    s = std::move(head);
                } else {
                    throw ChcError("heap statement at location " + std::to_string(st.loc) +
                                   ": clause translation needs a heap-free program");
                }
            },
            st.node);
    }
};

}  // namespace

std::string quote_symbol(const std::string& s) {
    if (plain_symbol(s) && !reserved().count(s)) return s;
    return "|" + s + "|";
}

ClauseSet to_chc(const Program& p, const ChcOptions& opts) {
    require_well_typed(p);
    if (has_heap_ops(p.body)) {
        // report the first one
        unsigned loc = 0;
        for_each_stmt(p.body, [&](const Stmt& s) {
            if (loc == 0 && (std::holds_alternative<Alloc>(s.node) || std::holds_alternative<Read>(s.node) ||
                             std::holds_alternative<Write>(s.node)))
                loc = s.loc;
        });
        throw ChcError("heap statement at location " + std::to_string(loc) +
                       ": clause translation needs a heap-free program");
    }
    return Translator(p, opts).run();
}

std::string emit_smtlib(const ClauseSet& cs) {
    std::ostringstream o;
    o << "(set-logic HORN)\n";
    if (!cs.datatypes.empty()) o << cs.datatypes << "\n";
    for (const auto& s : cs.predicates) {
        o << "(declare-fun " << s.name << " (";
        for (std::size_t i = 0; i < s.sorts.size(); ++i) o << (i ? " " : "") << s.sorts[i];
        o << ") Bool)\n";
    }
    for (const auto& c : cs.clauses) {
        std::vector<Term> body = c.atoms;
        if (!c.constraint.is_true()) body.push_back(c.constraint);
        Term head = c.head ? *c.head : Term::sym("false");
        Term f = body.empty() ? head : Term::app("=>", {mk_and(body), head});
        o << "(assert ";
        if (c.vars.empty()) {
            o << f.to_string();
        } else {
            o << "(forall (";
            for (std::size_t i = 0; i < c.vars.size(); ++i)
                o << (i ? " " : "") << "(" << c.vars[i].first << " " << c.vars[i].second << ")";
            o << ") " << f.to_string() << ")";
        }
        o << ")\n";
    }
    o << "(check-sat)\n";
    return o.str();
}

const char* to_string(SolverAnswer a) {
    switch (a) {
    case SolverAnswer::Sat: return "sat";
    case SolverAnswer::Unsat: return "unsat";
    case SolverAnswer::Unknown: return "unknown";
    case SolverAnswer::ToolError: return "error";
    }
    return "?";
}

std::string default_solver_command() {
    if (const char* env = std::getenv("HEAPINV_SOLVER"); env && *env) return env;
    return "z3 -smt2 {file}";
}

namespace {

std::vector<std::string> command_argv(const std::string& tmpl, const std::string& path) {
    std::istringstream in(tmpl);
    std::vector<std::string> argv;
    std::string tok;
    bool has_file = false;
    while (in >> tok) {
        if (auto pos = tok.find("{file}"); pos != std::string::npos) {
            tok.replace(pos, 6, path);
            has_file = true;
        }
        argv.push_back(tok);
    }
    if (!has_file && !path.empty()) argv.push_back(path);
    return argv;
}

bool on_path(const std::string& prog) {
    namespace fs = std::filesystem;
    if (prog.find('/') != std::string::npos) return ::access(prog.c_str(), X_OK) == 0;
    const char* path = std::getenv("PATH");
    if (!path) return false;
    std::istringstream in(path);
    std::string dir;
    while (std::getline(in, dir, ':')) {
        if (dir.empty()) continue;
        auto f = fs::path(dir) / prog;
        if (::access(f.c_str(), X_OK) == 0) return true;
    }
    return false;
}

}  // namespace

bool solver_available(const std::string& command_template) {
    auto argv = command_argv(command_template, "");
    return !argv.empty() && on_path(argv[0]);
}

SolveResult solve(const std::string& path, const std::string& command_template, double timeout_seconds) {
    auto args = command_argv(command_template, path);
    if (args.empty()) return {SolverAnswer::ToolError, "empty solver command"};
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    argv.push_back(nullptr);

    int fds[2];
    if (::pipe(fds) != 0) return {SolverAnswer::ToolError, "pipe failed"};
    posix_spawn_file_actions_t fa;
    posix_spawn_file_actions_init(&fa);
    posix_spawn_file_actions_adddup2(&fa, fds[1], 1);
    posix_spawn_file_actions_adddup2(&fa, fds[1], 2);
    posix_spawn_file_actions_addclose(&fa, fds[0]);
    pid_t pid = 0;
    int rc = posix_spawnp(&pid, argv[0], &fa, nullptr, argv.data(), environ);
    posix_spawn_file_actions_destroy(&fa);
    ::close(fds[1]);
    if (rc != 0) {
        ::close(fds[0]);
        return {SolverAnswer::ToolError, "cannot start " + args[0]};
    }

    std::string out;
    auto deadline = std::chrono::steady_clock::now() + std::chrono::duration<double>(timeout_seconds);
    bool timed_out = false;
    char buf[4096];
    for (;;) {
        auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
        if (left.count() <= 0) {
            timed_out = true;
            break;
        }
        pollfd pf{fds[0], POLLIN, 0};
        int r = ::poll(&pf, 1, static_cast<int>(std::min<long long>(left.count(), 1000)));
        if (r < 0 && errno == EINTR) continue;
        if (r <= 0) continue;
        ssize_t n = ::read(fds[0], buf, sizeof buf);
        if (n <= 0) break;
        out.append(buf, static_cast<std::size_t>(n));
    }
    ::close(fds[0]);
    if (timed_out) ::kill(pid, SIGKILL);
    int status = 0;
    ::waitpid(pid, &status, 0);
    if (timed_out) return {SolverAnswer::ToolError, "timeout"};

    std::istringstream in(out);
    std::string line;
    while (std::getline(in, line)) {
        while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.pop_back();
        if (line == "sat") return {SolverAnswer::Sat, {}};
        if (line == "unsat") return {SolverAnswer::Unsat, {}};
        if (line == "unknown") return {SolverAnswer::Unknown, {}};
        if (!line.empty()) return {SolverAnswer::ToolError, line};
    }
    if (WIFEXITED(status) && WEXITSTATUS(status) == 127) return {SolverAnswer::ToolError, "solver not found"};
    return {SolverAnswer::ToolError, "no answer from solver"};
}

}  // namespace heapinv::chc
