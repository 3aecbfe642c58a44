#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "heapinv/integer.hpp"

namespace heapinv::ast {

// Positions are metadata: they never take part in structural equality.
struct SourcePos {
    int line = 0;
    int col = 0;
    friend bool operator==(const SourcePos&, const SourcePos&) { return true; }
};

struct TypeTag {
    enum class Kind : std::uint8_t { Int, Addr, Obj };
    Kind kind = Kind::Int;
    std::string adt;  // only for Obj

    static TypeTag integer() { return {Kind::Int, {}}; }
    static TypeTag address() { return {Kind::Addr, {}}; }
    static TypeTag object(std::string name) { return {Kind::Obj, std::move(name)}; }
    bool is_int() const { return kind == Kind::Int; }
    bool is_addr() const { return kind == Kind::Addr; }
    bool is_obj() const { return kind == Kind::Obj; }
    std::string to_string() const;
    bool operator==(const TypeTag&) const = default;
};

struct Field {
    std::string name;
    TypeTag type;
    bool operator==(const Field&) const = default;
};

struct Constructor {
    std::string name;
    std::vector<Field> fields;
    bool operator==(const Constructor&) const = default;
};

// ctors[0] is the default constructor; defObj of the ADT is ctors[0] with
// default field values.
struct AdtDecl {
    std::string name;
    std::vector<Constructor> ctors;
    SourcePos pos;
    bool operator==(const AdtDecl&) const = default;
};

struct PredDecl {
    std::string name;
    std::vector<TypeTag> params;
    SourcePos pos;
    bool operator==(const PredDecl&) const = default;
};

struct VarDecl {
    std::string name;
    TypeTag type;
    SourcePos pos;
    bool operator==(const VarDecl&) const = default;
};

enum class UnOp : std::uint8_t { Neg, Not };
enum class BinOp : std::uint8_t { Add, Sub, Mul, Div, Mod, Lt, Le, Gt, Ge, Eq, Ne, And, Or };

const char* to_string(UnOp op);
const char* to_string(BinOp op);
bool is_arith(BinOp op);
bool is_order(BinOp op);     // < <= > >=
bool is_equality(BinOp op);  // = !=
bool is_logical(BinOp op);   // && ||

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

bool deep_equal(const ExprPtr& a, const ExprPtr& b);
bool deep_equal(const std::vector<ExprPtr>& a, const std::vector<ExprPtr>& b);

struct IntLit {
    Integer value;
    bool operator==(const IntLit&) const = default;
};
struct VarRef {
    std::string name;
    bool operator==(const VarRef&) const = default;
};
struct NullLit {
    bool operator==(const NullLit&) const = default;
};
struct DefObjLit {
    bool operator==(const DefObjLit&) const = default;
};
struct Unary {
    UnOp op;
    ExprPtr operand;
    friend bool operator==(const Unary& a, const Unary& b) { return a.op == b.op && deep_equal(a.operand, b.operand); }
};
struct Binary {
    BinOp op;
    ExprPtr lhs, rhs;
    friend bool operator==(const Binary& a, const Binary& b) {
        return a.op == b.op && deep_equal(a.lhs, b.lhs) && deep_equal(a.rhs, b.rhs);
    }
};
struct CtorApp {
    std::string ctor;
    std::vector<ExprPtr> args;
    friend bool operator==(const CtorApp& a, const CtorApp& b) { return a.ctor == b.ctor && deep_equal(a.args, b.args); }
};
struct Select {
    std::string selector;
    ExprPtr arg;
    friend bool operator==(const Select& a, const Select& b) {
        return a.selector == b.selector && deep_equal(a.arg, b.arg);
    }
};
struct IsCtor {
    std::string ctor;
    ExprPtr arg;
    friend bool operator==(const IsCtor& a, const IsCtor& b) { return a.ctor == b.ctor && deep_equal(a.arg, b.arg); }
};

struct Expr {
    std::variant<IntLit, VarRef, NullLit, DefObjLit, Unary, Binary, CtorApp, Select, IsCtor> node;
    SourcePos pos;
    bool operator==(const Expr&) const = default;
};

// builders
ExprPtr lit(Integer v);
ExprPtr var(std::string name);
ExprPtr null_lit();
ExprPtr def_obj();
ExprPtr unary(UnOp op, ExprPtr e);
ExprPtr binary(BinOp op, ExprPtr a, ExprPtr b);
ExprPtr ctor_app(std::string ctor, std::vector<ExprPtr> args);
ExprPtr select(std::string selector, ExprPtr e);
ExprPtr is_ctor(std::string ctor, ExprPtr e);

struct Stmt;
using Block = std::vector<Stmt>;

struct Assign {
    std::string var;
    ExprPtr value;
    friend bool operator==(const Assign& a, const Assign& b) { return a.var == b.var && deep_equal(a.value, b.value); }
};
struct Alloc {
    std::string var;
    ExprPtr init;
    friend bool operator==(const Alloc& a, const Alloc& b) { return a.var == b.var && deep_equal(a.init, b.init); }
};
struct Read {
    std::string var;
    std::string addr;
    bool operator==(const Read&) const = default;
};
struct Write {
    std::string addr;
    ExprPtr value;
    friend bool operator==(const Write& a, const Write& b) { return a.addr == b.addr && deep_equal(a.value, b.value); }
};
struct Skip {
    bool operator==(const Skip&) const = default;
};
struct If {
    ExprPtr cond;
    Block then_branch;
    Block else_branch;
    friend bool operator==(const If& a, const If& b);
};
struct While {
    ExprPtr cond;
    Block body;
    friend bool operator==(const While& a, const While& b);
};
struct Assume {
    ExprPtr cond;
    friend bool operator==(const Assume& a, const Assume& b) { return deep_equal(a.cond, b.cond); }
};
struct Assert {
    ExprPtr cond;
    friend bool operator==(const Assert& a, const Assert& b) { return deep_equal(a.cond, b.cond); }
};
struct PredApp {
    std::string pred;
    std::vector<ExprPtr> args;
    friend bool operator==(const PredApp& a, const PredApp& b) { return a.pred == b.pred && deep_equal(a.args, b.args); }
};
struct AssumePred {
    PredApp app;
    bool operator==(const AssumePred&) const = default;
};
struct AssertPred {
    PredApp app;
    bool operator==(const AssertPred&) const = default;
};
// havoc(x); native form is printed as x := nondet();
struct Havoc {
    std::string var;
    bool native = false;
    bool operator==(const Havoc&) const = default;
};

struct Stmt {
    std::variant<Assign, Alloc, Read, Write, Skip, If, While, Assume, Assert, AssumePred, AssertPred, Havoc> node;
    unsigned loc = 0;
    SourcePos pos;
    bool operator==(const Stmt&) const = default;

    template <class T>
        requires(!std::is_same_v<std::decay_t<T>, Stmt>)
    Stmt(T n) : node(std::move(n)) {}  // NOLINT
    Stmt() : node(Skip{}) {}
};

inline bool operator==(const If& a, const If& b) {
    return deep_equal(a.cond, b.cond) && a.then_branch == b.then_branch && a.else_branch == b.else_branch;
}
inline bool operator==(const While& a, const While& b) { return deep_equal(a.cond, b.cond) && a.body == b.body; }

struct CtorLookup {
    const AdtDecl* adt = nullptr;
    std::size_t adt_index = 0;
    std::size_t ctor_index = 0;
};
struct SelectorLookup {
    const AdtDecl* adt = nullptr;
    std::size_t adt_index = 0;
    std::size_t ctor_index = 0;
    std::size_t field_index = 0;
};

struct Program {
    std::vector<AdtDecl> adts;
    std::optional<std::string> heap_type;
    std::vector<PredDecl> preds;
    std::vector<VarDecl> vars;
    std::string input_var = "in";
    std::string seed_var = "seed";
    std::optional<std::string> prophecy_var;
    std::optional<std::string> fuel_var;
    Block body;

    bool operator==(const Program&) const = default;

    const VarDecl* find_var(std::string_view name) const;
    const AdtDecl* find_adt(std::string_view name) const;
    std::optional<std::size_t> adt_index(std::string_view name) const;
    const PredDecl* find_pred(std::string_view name) const;
    std::optional<CtorLookup> find_ctor(std::string_view name) const;
    std::optional<SelectorLookup> find_selector(std::string_view name) const;
    const AdtDecl* heap_adt() const;
    // every name already used by a declaration of any kind
    bool name_taken(std::string_view name) const;
};

// Pre-order numbering from 1 over all statements.
Program assign_locations(const Program& p);
void assign_locations_in_place(Program& p);

template <class F>
void for_each_stmt(const Block& b, F&& f) {
    for (const auto& s : b) {
        f(s);
        if (auto* i = std::get_if<If>(&s.node)) {
            for_each_stmt(i->then_branch, f);
            for_each_stmt(i->else_branch, f);
        } else if (auto* w = std::get_if<While>(&s.node)) {
            for_each_stmt(w->body, f);
        }
    }
}

// calls f on every expression root reachable from the statement (not nested sub-blocks)
template <class F>
void for_each_stmt_expr(const Stmt& s, F&& f) {
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Assign>) f(n.value);
            else if constexpr (std::is_same_v<T, Alloc>) f(n.init);
            else if constexpr (std::is_same_v<T, Write>) f(n.value);
            else if constexpr (std::is_same_v<T, If> || std::is_same_v<T, While> || std::is_same_v<T, Assume> ||
                               std::is_same_v<T, Assert>)
                f(n.cond);
            else if constexpr (std::is_same_v<T, AssumePred> || std::is_same_v<T, AssertPred>)
                for (const auto& a : n.app.args) f(a);
        },
        s.node);
}

template <class F>
void for_each_subexpr(const ExprPtr& e, F&& f) {
    f(*e);
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Unary>) for_each_subexpr(n.operand, f);
            else if constexpr (std::is_same_v<T, Binary>) {
                for_each_subexpr(n.lhs, f);
                for_each_subexpr(n.rhs, f);
            } else if constexpr (std::is_same_v<T, CtorApp>)
                for (const auto& a : n.args) for_each_subexpr(a, f);
            else if constexpr (std::is_same_v<T, Select> || std::is_same_v<T, IsCtor>)
                for_each_subexpr(n.arg, f);
        },
        e->node);
}

bool mentions_var(const ExprPtr& e, std::string_view name);
// true if any statement or expression in the block reads or writes the variable
bool block_uses_var(const Block& b, std::string_view name);
bool has_heap_ops(const Block& b);

}  // namespace heapinv::ast
