#include "heapinv/ast.hpp"

namespace heapinv::ast {

std::string TypeTag::to_string() const {
    switch (kind) {
    case Kind::Int: return "Int";
    case Kind::Addr: return "Addr";
    case Kind::Obj: return adt;
    }
    return "?";
}

const char* to_string(UnOp op) { return op == UnOp::Neg ? "-" : "!"; }

const char* to_string(BinOp op) {
    switch (op) {
    case BinOp::Add: return "+";
    case BinOp::Sub: return "-";
    case BinOp::Mul: return "*";
    case BinOp::Div: return "/";
    case BinOp::Mod: return "%";
    case BinOp::Lt: return "<";
    case BinOp::Le: return "<=";
    case BinOp::Gt: return ">";
    case BinOp::Ge: return ">=";
    case BinOp::Eq: return "=";
    case BinOp::Ne: return "!=";
    case BinOp::And: return "&&";
    case BinOp::Or: return "||";
    }
    return "?";
}

bool is_arith(BinOp op) { return op <= BinOp::Mod; }
bool is_order(BinOp op) { return op >= BinOp::Lt && op <= BinOp::Ge; }
bool is_equality(BinOp op) { return op == BinOp::Eq || op == BinOp::Ne; }
bool is_logical(BinOp op) { return op == BinOp::And || op == BinOp::Or; }

bool deep_equal(const ExprPtr& a, const ExprPtr& b) {
    if (a == b)
        return true;
    if (!a || !b)
        return false;
    return *a == *b;
}

bool deep_equal(const std::vector<ExprPtr>& a, const std::vector<ExprPtr>& b) {
    if (a.size() != b.size())
        return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!deep_equal(a[i], b[i]))
            return false;
    return true;
}

namespace {
ExprPtr make(auto node) { return std::make_shared<const Expr>(Expr{std::move(node), {}}); }
}  // namespace

ExprPtr lit(Integer v) { return make(IntLit{std::move(v)}); }
ExprPtr var(std::string name) { return make(VarRef{std::move(name)}); }
ExprPtr null_lit() { return make(NullLit{}); }
ExprPtr def_obj() { return make(DefObjLit{}); }
ExprPtr unary(UnOp op, ExprPtr e) { return make(Unary{op, std::move(e)}); }
ExprPtr binary(BinOp op, ExprPtr a, ExprPtr b) { return make(Binary{op, std::move(a), std::move(b)}); }
ExprPtr ctor_app(std::string ctor, std::vector<ExprPtr> args) { return make(CtorApp{std::move(ctor), std::move(args)}); }
ExprPtr select(std::string selector, ExprPtr e) { return make(Select{std::move(selector), std::move(e)}); }
ExprPtr is_ctor(std::string ctor, ExprPtr e) { return make(IsCtor{std::move(ctor), std::move(e)}); }

const VarDecl* Program::find_var(std::string_view name) const {
    for (const auto& v : vars)
        if (v.name == name)
            return &v;
    return nullptr;
}

const AdtDecl* Program::find_adt(std::string_view name) const {
    for (const auto& a : adts)
        if (a.name == name)
            return &a;
    return nullptr;
}

std::optional<std::size_t> Program::adt_index(std::string_view name) const {
    for (std::size_t i = 0; i < adts.size(); ++i)
        if (adts[i].name == name)
            return i;
    return std::nullopt;
}

const PredDecl* Program::find_pred(std::string_view name) const {
    for (const auto& p : preds)
        if (p.name == name)
            return &p;
    return nullptr;
}

std::optional<CtorLookup> Program::find_ctor(std::string_view name) const {
    for (std::size_t a = 0; a < adts.size(); ++a)
        for (std::size_t c = 0; c < adts[a].ctors.size(); ++c)
            if (adts[a].ctors[c].name == name)
                return CtorLookup{&adts[a], a, c};
    return std::nullopt;
}

std::optional<SelectorLookup> Program::find_selector(std::string_view name) const {
    for (std::size_t a = 0; a < adts.size(); ++a)
        for (std::size_t c = 0; c < adts[a].ctors.size(); ++c)
            for (std::size_t f = 0; f < adts[a].ctors[c].fields.size(); ++f)
                if (adts[a].ctors[c].fields[f].name == name)
                    return SelectorLookup{&adts[a], a, c, f};
    return std::nullopt;
}

const AdtDecl* Program::heap_adt() const { return heap_type ? find_adt(*heap_type) : nullptr; }

bool Program::name_taken(std::string_view name) const {
    if (find_var(name) || find_adt(name) || find_pred(name) || find_ctor(name) || find_selector(name))
        return true;
    if (name.starts_with("is_") && find_ctor(name.substr(3)))
        return true;
    return false;
}

namespace {
void number(Block& b, unsigned& next) {
    for (auto& s : b) {
        s.loc = next++;
        if (auto* i = std::get_if<If>(&s.node)) {
            number(i->then_branch, next);
            number(i->else_branch, next);
        } else if (auto* w = std::get_if<While>(&s.node)) {
            number(w->body, next);
        }
    }
}
}  // namespace

void assign_locations_in_place(Program& p) {
    unsigned next = 1;
    number(p.body, next);
}

Program assign_locations(const Program& p) {
    Program q = p;
    assign_locations_in_place(q);
    return q;
}

bool mentions_var(const ExprPtr& e, std::string_view name) {
    bool found = false;
    for_each_subexpr(e, [&](const Expr& x) {
        if (auto* v = std::get_if<VarRef>(&x.node); v && v->name == name)
            found = true;
    });
    return found;
}

bool block_uses_var(const Block& b, std::string_view name) {
    bool found = false;
    for_each_stmt(b, [&](const Stmt& s) {
        std::visit(
            [&](const auto& n) {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, Assign> || std::is_same_v<T, Alloc> || std::is_same_v<T, Havoc>) {
                    if (n.var == name) found = true;
                } else if constexpr (std::is_same_v<T, Read>) {
                    if (n.var == name || n.addr == name) found = true;
                } else if constexpr (std::is_same_v<T, Write>) {
                    if (n.addr == name) found = true;
                }
            },
            s.node);
        for_each_stmt_expr(s, [&](const ExprPtr& e) {
            if (mentions_var(e, name))
                found = true;
        });
    });
    return found;
}

bool has_heap_ops(const Block& b) {
    bool found = false;
    for_each_stmt(b, [&](const Stmt& s) {
        if (std::holds_alternative<Alloc>(s.node) || std::holds_alternative<Read>(s.node) ||
            std::holds_alternative<Write>(s.node))
            found = true;
    });
    return found;
}

}  // namespace heapinv::ast
