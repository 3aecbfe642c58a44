#include <functional>
#include <map>
#include <set>

#include "heapinv/typecheck.hpp"

namespace heapinv {

using namespace ast;

namespace {

class Checker {
public:
    explicit Checker(const Program& p, std::unordered_map<const Expr*, TypeTag>* types) : p_(p), types_(types) {}

    std::vector<Diagnostic> diags;

    void error(SourcePos pos, std::string msg) { diags.push_back({pos, std::move(msg)}); }

    void check_declarations() {
        std::set<std::string> fn;
        std::set<std::string> adt_names;
        for (const auto& a : p_.adts) {
            if (!adt_names.insert(a.name).second)
                error(a.pos, "duplicate declaration of '" + a.name + "'");
            if (a.ctors.empty())
                error(a.pos, "ADT '" + a.name + "' has no constructors");
            for (const auto& c : a.ctors) {
                if (!fn.insert(c.name).second)
                    error(a.pos, "duplicate declaration of '" + c.name + "'");
                for (const auto& f : c.fields) {
                    if (!fn.insert(f.name).second)
                        error(a.pos, "duplicate declaration of selector '" + f.name + "'");
                    check_type_exists(f.type, a.pos);
                }
            }
        }
        for (const auto& d : p_.preds) {
            if (!fn.insert(d.name).second)
                error(d.pos, "duplicate declaration of '" + d.name + "'");
            if (d.name == "F")
                error(d.pos, "predicate name 'F' is reserved for failed assertions");
            for (const auto& t : d.params)
                check_type_exists(t, d.pos);
        }
        std::set<std::string> vars;
        for (const auto& v : p_.vars) {
            if (!vars.insert(v.name).second || fn.count(v.name))
                error(v.pos, "duplicate declaration of '" + v.name + "'");
            check_type_exists(v.type, v.pos);
        }
        check_recursion();
        auto need_int = [&](const std::string& name, const char* role) {
            const VarDecl* v = p_.find_var(name);
            if (!v)
                error({}, std::string("unknown identifier '") + name + "' designated as " + role);
            else if (!v->type.is_int())
                error(v->pos, std::string("type mismatch: ") + role + " variable '" + name + "' must be Int");
        };
        need_int(p_.input_var, "input");
        need_int(p_.seed_var, "seed");
        if (p_.prophecy_var)
            need_int(*p_.prophecy_var, "prophecy");
        if (p_.fuel_var)
            need_int(*p_.fuel_var, "fuel");
        if (p_.heap_type && !p_.find_adt(*p_.heap_type))
            error({}, "unknown type '" + *p_.heap_type + "'");
    }

    void check_block(const Block& b) {
        for (const auto& s : b)
            check_stmt(s);
    }

private:
    const Program& p_;
    std::unordered_map<const Expr*, TypeTag>* types_;

    void check_type_exists(const TypeTag& t, SourcePos pos) {
        if (t.is_obj() && !p_.find_adt(t.adt))
            error(pos, "unknown type '" + t.adt + "'");
    }

    void check_recursion() {
        // 0 = unvisited, 1 = on stack, 2 = done
        std::map<std::string, int> state;
        std::function<bool(const AdtDecl&)> visit = [&](const AdtDecl& a) -> bool {
            int& st = state[a.name];
            if (st == 1)
                return true;
            if (st == 2)
                return false;
            st = 1;
            bool cyc = false;
            for (const auto& c : a.ctors)
                for (const auto& f : c.fields)
                    if (f.type.is_obj())
                        if (const AdtDecl* d = p_.find_adt(f.type.adt); d && visit(*d))
                            cyc = true;
            state[a.name] = 2;
            return cyc;
        };
        for (const auto& a : p_.adts) {
            state.clear();
            if (visit(a))
                error(a.pos, "recursive ADT '" + a.name + "'");
        }
    }

    const TypeTag* var_type(const std::string& name, SourcePos pos) {
        const VarDecl* v = p_.find_var(name);
        if (!v) {
            error(pos, "unknown identifier '" + name + "'");
            return nullptr;
        }
        return &v->type;
    }

    bool need_heap(SourcePos pos) {
        if (!p_.heap_adt()) {
            error(pos, "no heap type declared");
            return false;
        }
        return true;
    }

    void expect_cond(const ExprPtr& e) {
        auto t = expr(e);
        if (t && !t->is_int())
            error(e->pos, "type mismatch: condition has type " + t->to_string() + ", expected Int");
    }

    void check_pred(const PredApp& app, SourcePos pos) {
        const PredDecl* d = p_.find_pred(app.pred);
        std::vector<std::optional<TypeTag>> ts;
        for (const auto& a : app.args)
            ts.push_back(expr(a));
        if (!d) {
            error(pos, "unknown identifier '" + app.pred + "'");
            return;
        }
        if (d->params.size() != app.args.size()) {
            error(pos, "arity mismatch: '" + app.pred + "' expects " + std::to_string(d->params.size()) +
                           " arguments, got " + std::to_string(app.args.size()));
            return;
        }
        for (std::size_t i = 0; i < ts.size(); ++i)
            if (ts[i] && !(*ts[i] == d->params[i]))
                error(app.args[i]->pos, "type mismatch: argument " + std::to_string(i + 1) + " of '" + app.pred +
                                            "' has type " + ts[i]->to_string() + ", expected " +
                                            d->params[i].to_string());
    }

    void check_stmt(const Stmt& s) {
        std::visit(
            [&](const auto& n) {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, Assign>) {
                    const TypeTag* vt = var_type(n.var, s.pos);
                    auto et = expr(n.value);
                    if (vt && et && !(*vt == *et))
                        error(s.pos, "type mismatch: cannot assign " + et->to_string() + " to '" + n.var + "' of type " +
                                         vt->to_string());
                } else if constexpr (std::is_same_v<T, Alloc>) {
                    const TypeTag* vt = var_type(n.var, s.pos);
                    auto et = expr(n.init);
                    if (vt && !vt->is_addr())
                        error(s.pos, "type mismatch: alloc target '" + n.var + "' must be Addr");
                    if (need_heap(s.pos) && et && !(*et == TypeTag::object(*p_.heap_type)))
                        error(n.init->pos, "type mismatch: alloc operand has type " + et->to_string() +
                                               ", expected " + *p_.heap_type);
                } else if constexpr (std::is_same_v<T, Read>) {
                    const TypeTag* vt = var_type(n.var, s.pos);
                    const TypeTag* pt = var_type(n.addr, s.pos);
                    if (pt && !pt->is_addr())
                        error(s.pos, "type mismatch: read address '" + n.addr + "' must be Addr");
                    if (need_heap(s.pos) && vt && !(*vt == TypeTag::object(*p_.heap_type)))
                        error(s.pos, "type mismatch: read target '" + n.var + "' must have type " + *p_.heap_type);
                } else if constexpr (std::is_same_v<T, Write>) {
                    const TypeTag* pt = var_type(n.addr, s.pos);
                    auto et = expr(n.value);
                    if (pt && !pt->is_addr())
                        error(s.pos, "type mismatch: write address '" + n.addr + "' must be Addr");
                    if (need_heap(s.pos) && et && !(*et == TypeTag::object(*p_.heap_type)))
                        error(n.value->pos, "type mismatch: written value has type " + et->to_string() +
                                                ", expected " + *p_.heap_type);
                } else if constexpr (std::is_same_v<T, If>) {
                    expect_cond(n.cond);
                    check_block(n.then_branch);
                    check_block(n.else_branch);
                } else if constexpr (std::is_same_v<T, While>) {
                    expect_cond(n.cond);
                    check_block(n.body);
                } else if constexpr (std::is_same_v<T, Assume> || std::is_same_v<T, Assert>) {
                    expect_cond(n.cond);
                } else if constexpr (std::is_same_v<T, AssumePred> || std::is_same_v<T, AssertPred>) {
                    check_pred(n.app, s.pos);
                } else if constexpr (std::is_same_v<T, Havoc>) {
                    const TypeTag* vt = var_type(n.var, s.pos);
                    if (vt && vt->is_addr())
                        error(s.pos, "type mismatch: havoc target '" + n.var + "' must be Int or an ADT");
                }
            },
            s.node);
    }

public:
    std::optional<TypeTag> expr(const ExprPtr& e) {
        auto t = expr_inner(*e);
        if (t && types_)
            (*types_)[e.get()] = *t;
        return t;
    }

private:
    std::optional<TypeTag> expr_inner(const Expr& e) {
        return std::visit(
            [&](const auto& n) -> std::optional<TypeTag> {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, IntLit>) {
                    return TypeTag::integer();
                } else if constexpr (std::is_same_v<T, VarRef>) {
                    const TypeTag* t = var_type(n.name, e.pos);
                    return t ? std::optional<TypeTag>(*t) : std::nullopt;
                } else if constexpr (std::is_same_v<T, NullLit>) {
                    return TypeTag::address();
                } else if constexpr (std::is_same_v<T, DefObjLit>) {
                    if (!need_heap(e.pos))
                        return std::nullopt;
                    return TypeTag::object(*p_.heap_type);
                } else if constexpr (std::is_same_v<T, Unary>) {
                    auto t = expr(n.operand);
                    if (!t)
                        return std::nullopt;
                    if (t->is_addr() && n.op == UnOp::Neg) {
                        error(e.pos, "arithmetic on Addr");
                        return std::nullopt;
                    }
                    if (!t->is_int()) {
                        error(e.pos, std::string("type mismatch: operand of '") + to_string(n.op) + "' has type " +
                                         t->to_string() + ", expected Int");
                        return std::nullopt;
                    }
                    return TypeTag::integer();
                } else if constexpr (std::is_same_v<T, Binary>) {
                    auto a = expr(n.lhs);
                    auto b = expr(n.rhs);
                    if (!a || !b)
                        return std::nullopt;
                    if (is_equality(n.op)) {
                        if (!(*a == *b)) {
                            error(e.pos, "type mismatch: cannot compare " + a->to_string() + " with " + b->to_string());
                            return std::nullopt;
                        }
                        return TypeTag::integer();
                    }
                    if (is_arith(n.op) && (a->is_addr() || b->is_addr())) {
                        error(e.pos, "arithmetic on Addr");
                        return std::nullopt;
                    }
                    if (!a->is_int() || !b->is_int()) {
                        error(e.pos, std::string("type mismatch: operands of '") + to_string(n.op) + "' have types " +
                                         a->to_string() + " and " + b->to_string() + ", expected Int");
                        return std::nullopt;
                    }
                    return TypeTag::integer();
                } else if constexpr (std::is_same_v<T, CtorApp>) {
                    auto c = p_.find_ctor(n.ctor);
                    std::vector<std::optional<TypeTag>> ts;
                    for (const auto& a : n.args)
                        ts.push_back(expr(a));
                    if (!c) {
                        error(e.pos, "unknown identifier '" + n.ctor + "'");
                        return std::nullopt;
                    }
                    const auto& fields = c->adt->ctors[c->ctor_index].fields;
                    if (fields.size() != n.args.size()) {
                        error(e.pos, "arity mismatch: constructor '" + n.ctor + "' expects " +
                                         std::to_string(fields.size()) + " arguments, got " +
                                         std::to_string(n.args.size()));
                        return TypeTag::object(c->adt->name);
                    }
                    for (std::size_t i = 0; i < ts.size(); ++i)
                        if (ts[i] && !(*ts[i] == fields[i].type))
                            error(n.args[i]->pos, "type mismatch: field '" + fields[i].name + "' has type " +
                                                      fields[i].type.to_string() + ", got " + ts[i]->to_string());
                    return TypeTag::object(c->adt->name);
                } else if constexpr (std::is_same_v<T, Select>) {
                    auto s = p_.find_selector(n.selector);
                    auto t = expr(n.arg);
                    if (!s) {
                        error(e.pos, "unknown identifier '" + n.selector + "'");
                        return std::nullopt;
                    }
                    if (t && !(*t == TypeTag::object(s->adt->name)))
                        error(e.pos, "type mismatch: selector '" + n.selector + "' applied to " + t->to_string());
                    return s->adt->ctors[s->ctor_index].fields[s->field_index].type;
                } else if constexpr (std::is_same_v<T, IsCtor>) {
                    auto c = p_.find_ctor(n.ctor);
                    auto t = expr(n.arg);
                    if (!c) {
                        error(e.pos, "unknown identifier '" + n.ctor + "'");
                        return std::nullopt;
                    }
                    if (t && !(*t == TypeTag::object(c->adt->name)))
                        error(e.pos, "type mismatch: tester 'is_" + n.ctor + "' applied to " + t->to_string());
                    return TypeTag::integer();
                }
            },
            e.node);
    }
};

}  // namespace

TypecheckResult typecheck(const Program& p) {
    TypecheckResult r;
    TypedProgram tp{p, {}};
    Checker c(tp.program, &tp.types);
    c.check_declarations();
    c.check_block(tp.program.body);
    r.diagnostics = std::move(c.diags);
    if (r.diagnostics.empty())
        r.typed = std::move(tp);
    return r;
}

void require_well_typed(const Program& p) {
    Checker c(p, nullptr);
    c.check_declarations();
    c.check_block(p.body);
    if (!c.diags.empty())
        throw DiagnosticError(std::move(c.diags));
}

Program load_program(std::string_view text) {
    Program p = parse_program(text);
    require_well_typed(p);
    return p;
}

std::optional<TypeTag> infer_type(const Program& p, const ExprPtr& e) {
    Checker c(p, nullptr);
    auto t = c.expr(e);
    if (!c.diags.empty())
        return std::nullopt;
    return t;
}

}  // namespace heapinv
