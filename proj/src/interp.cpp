#include "heapinv/interp.hpp"

#include <stdexcept>
#include <unordered_map>

#include "heapinv/typecheck.hpp"

namespace heapinv {

using namespace ast;

std::string to_string(const Program& p, const Outcome& o) {
    switch (o.kind) {
    case OutcomeKind::Top: return "Top";
    case OutcomeKind::Bot: return "Bot(" + o.pred + ", " + to_string(p, o.tuple) + ")";
    case OutcomeKind::Undefined:
        return o.reason == UndefinedReason::FuelExhausted ? "Undefined(FuelExhausted)" : "Undefined(AssumeFailed)";
    }
    return "?";
}

std::string to_string(const MemoryEvent& e) {
    const char* k = e.kind == MemoryEvent::Kind::InvalidRead    ? "invalid read"
                    : e.kind == MemoryEvent::Kind::InvalidWrite ? "invalid write"
                                                                : "read of unwritten address";
    return std::string(k) + " of address " + std::to_string(e.address) + " at location " + std::to_string(e.loc);
}

// ---- Interpretation ----

bool Interpretation::contains(const std::string& pred, const Tuple& t) const {
    auto it = rel_.find(pred);
    return it != rel_.end() && it->second.count(t);
}

bool Interpretation::insert(const std::string& pred, Tuple t) { return rel_[pred].insert(std::move(t)).second; }

const TupleSet& Interpretation::relation(const std::string& pred) const {
    static const TupleSet empty;
    auto it = rel_.find(pred);
    return it == rel_.end() ? empty : it->second;
}

std::size_t Interpretation::total_size() const {
    std::size_t n = 0;
    for (const auto& [_, s] : rel_)
        n += s.size();
    return n;
}

bool Interpretation::subset_of(const Interpretation& other) const {
    for (const auto& [name, s] : rel_) {
        const TupleSet& o = other.relation(name);
        for (const auto& t : s)
            if (!o.count(t))
                return false;
    }
    return true;
}

void Interpretation::merge(const Interpretation& other) {
    for (const auto& [name, s] : other.rel_)
        rel_[name].insert(s.begin(), s.end());
}

bool operator==(const Interpretation& a, const Interpretation& b) { return a.subset_of(b) && b.subset_of(a); }

BoundInterpretation::BoundInterpretation(const Program& p, const Interpretation& I) {
    for (const auto& d : p.preds)
        sets_.push_back(&I.relation(d.name));
}

bool BoundInterpretation::holds(std::size_t pred, const Tuple& args) const { return sets_[pred]->count(args) > 0; }

// ---- compiled form ----

namespace {

struct HavocPlan {
    TypeTag::Kind kind = TypeTag::Kind::Int;
    std::uint32_t adt = 0;
    std::vector<std::vector<HavocPlan>> ctor_fields;
};

struct CExpr {
    enum class K : std::uint8_t { Lit, Var, Neg, Not, Bin, Ctor, Sel, Is } k = K::Lit;
    BinOp op = BinOp::Add;
    std::uint32_t slot = 0, adt = 0, ctor = 0, field = 0;
    Value lit;  // literal, or the fallback of a selector
    std::vector<CExpr> kids;
};

struct CStmt {
    enum class K : std::uint8_t {
        Assign,
        Alloc,
        Read,
        Write,
        Skip,
        If,
        While,
        Assume,
        Assert,
        AssumeP,
        AssertP,
        Havoc
    } k = K::Skip;
    std::uint32_t a = 0, b = 0, pred = 0;
    unsigned loc = 0;
    CExpr e;
    std::vector<CExpr> args;
    std::vector<CStmt> s1, s2;
    HavocPlan plan;
};

using SlotMap = std::unordered_map<std::string, std::uint32_t>;

HavocPlan make_plan(const Program& p, const TypeTag& t) {
    HavocPlan h;
    h.kind = t.kind;
    if (t.is_obj()) {
        h.adt = static_cast<std::uint32_t>(*p.adt_index(t.adt));
        for (const auto& c : p.adts[h.adt].ctors) {
            std::vector<HavocPlan> fs;
            for (const auto& f : c.fields)
                fs.push_back(make_plan(p, f.type));
            h.ctor_fields.push_back(std::move(fs));
        }
    }
    return h;
}

CExpr compile_expr(const Program& p, const SlotMap& slots, const Expr& e) {
    CExpr c;
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, IntLit>) {
                c.k = CExpr::K::Lit;
                c.lit = n.value;
            } else if constexpr (std::is_same_v<T, VarRef>) {
                c.k = CExpr::K::Var;
                c.slot = slots.at(n.name);
            } else if constexpr (std::is_same_v<T, NullLit>) {
                c.k = CExpr::K::Lit;
                c.lit = Address{0};
            } else if constexpr (std::is_same_v<T, DefObjLit>) {
                c.k = CExpr::K::Lit;
                c.lit = def_obj(p);
            } else if constexpr (std::is_same_v<T, Unary>) {
                c.k = n.op == UnOp::Neg ? CExpr::K::Neg : CExpr::K::Not;
                c.kids.push_back(compile_expr(p, slots, *n.operand));
            } else if constexpr (std::is_same_v<T, Binary>) {
                c.k = CExpr::K::Bin;
                c.op = n.op;
                c.kids.push_back(compile_expr(p, slots, *n.lhs));
                c.kids.push_back(compile_expr(p, slots, *n.rhs));
            } else if constexpr (std::is_same_v<T, CtorApp>) {
                auto l = *p.find_ctor(n.ctor);
                c.k = CExpr::K::Ctor;
                c.adt = static_cast<std::uint32_t>(l.adt_index);
                c.ctor = static_cast<std::uint32_t>(l.ctor_index);
                for (const auto& a : n.args)
                    c.kids.push_back(compile_expr(p, slots, *a));
            } else if constexpr (std::is_same_v<T, Select>) {
                auto l = *p.find_selector(n.selector);
                c.k = CExpr::K::Sel;
                c.adt = static_cast<std::uint32_t>(l.adt_index);
                c.ctor = static_cast<std::uint32_t>(l.ctor_index);
                c.field = static_cast<std::uint32_t>(l.field_index);
                c.lit = default_value(p, l.adt->ctors[l.ctor_index].fields[l.field_index].type);
                c.kids.push_back(compile_expr(p, slots, *n.arg));
            } else if constexpr (std::is_same_v<T, IsCtor>) {
                auto l = *p.find_ctor(n.ctor);
                c.k = CExpr::K::Is;
                c.ctor = static_cast<std::uint32_t>(l.ctor_index);
                c.kids.push_back(compile_expr(p, slots, *n.arg));
            }
        },
        e.node);
    return c;
}

std::uint32_t pred_slot(const Program& p, const std::string& name) {
    for (std::size_t i = 0; i < p.preds.size(); ++i)
        if (p.preds[i].name == name)
            return static_cast<std::uint32_t>(i);
    throw std::logic_error("unknown predicate " + name);
}

std::vector<CStmt> compile_block(const Program& p, const SlotMap& slots, const Block& b);

CStmt compile_stmt(const Program& p, const SlotMap& slots, const Stmt& s) {
    CStmt c;
    c.loc = s.loc;
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Assign>) {
                c.k = CStmt::K::Assign;
                c.a = slots.at(n.var);
                c.e = compile_expr(p, slots, *n.value);
            } else if constexpr (std::is_same_v<T, Alloc>) {
                c.k = CStmt::K::Alloc;
                c.a = slots.at(n.var);
                c.e = compile_expr(p, slots, *n.init);
            } else if constexpr (std::is_same_v<T, Read>) {
                c.k = CStmt::K::Read;
                c.a = slots.at(n.var);
                c.b = slots.at(n.addr);
            } else if constexpr (std::is_same_v<T, Write>) {
                c.k = CStmt::K::Write;
                c.b = slots.at(n.addr);
                c.e = compile_expr(p, slots, *n.value);
            } else if constexpr (std::is_same_v<T, Skip>) {
                c.k = CStmt::K::Skip;
            } else if constexpr (std::is_same_v<T, If>) {
                c.k = CStmt::K::If;
                c.e = compile_expr(p, slots, *n.cond);
                c.s1 = compile_block(p, slots, n.then_branch);
                c.s2 = compile_block(p, slots, n.else_branch);
            } else if constexpr (std::is_same_v<T, While>) {
                c.k = CStmt::K::While;
                c.e = compile_expr(p, slots, *n.cond);
                c.s1 = compile_block(p, slots, n.body);
            } else if constexpr (std::is_same_v<T, Assume> || std::is_same_v<T, Assert>) {
                c.k = std::is_same_v<T, Assume> ? CStmt::K::Assume : CStmt::K::Assert;
                c.e = compile_expr(p, slots, *n.cond);
            } else if constexpr (std::is_same_v<T, AssumePred> || std::is_same_v<T, AssertPred>) {
                c.k = std::is_same_v<T, AssumePred> ? CStmt::K::AssumeP : CStmt::K::AssertP;
                c.pred = pred_slot(p, n.app.pred);
                for (const auto& a : n.app.args)
                    c.args.push_back(compile_expr(p, slots, *a));
            } else if constexpr (std::is_same_v<T, Havoc>) {
                c.k = CStmt::K::Havoc;
                c.a = slots.at(n.var);
                c.plan = make_plan(p, p.find_var(n.var)->type);
            }
        },
        s.node);
    return c;
}

std::vector<CStmt> compile_block(const Program& p, const SlotMap& slots, const Block& b) {
    std::vector<CStmt> out;
    out.reserve(b.size());
    for (const auto& s : b)
        out.push_back(compile_stmt(p, slots, s));
    return out;
}

struct DivideByZero {};

}  // namespace

struct CompiledProgram {
    Program program;
    SlotMap slots;
    std::vector<CStmt> body;
    std::uint32_t input_slot = 0, seed_slot = 0;
    std::optional<std::uint32_t> prophecy_slot, fuel_slot;
    std::optional<Value> def;
    bool reads_seed = false;
};

namespace {

struct Signal {
    enum class K : std::uint8_t { Normal, Bot, Undef } k = K::Normal;
    bool fail = false;     // Bot of F
    bool blocked = false;  // Undef from a predicate assume
    std::uint32_t pred = 0;
    Tuple tuple;
    UndefinedReason reason = UndefinedReason::None;
};

template <class H>
class Machine {
public:
    Machine(const CompiledProgram& c, std::vector<Value>& s, H& h, const PredicateOracle& I, Fuel& fuel,
            const RunOptions& o)
        : c_(c), s_(s), h_(h), I_(I), fuel_(fuel), opts_(o) {}

    bool seed_used = false;
    std::optional<MemoryEvent> mem;

    Signal block(const std::vector<CStmt>& b) {
        for (const auto& st : b) {
            Signal r = stmt(st);
            if (r.k != Signal::K::Normal)
                return r;
        }
        return {};
    }

    Value eval(const CExpr& e) {
        switch (e.k) {
        case CExpr::K::Lit: return e.lit;
        case CExpr::K::Var:
            if (e.slot == c_.seed_slot)
                seed_used = true;
            return s_[e.slot];
        case CExpr::K::Neg: return -eval(e.kids[0]).as_int();
        case CExpr::K::Not: return Integer(eval(e.kids[0]).as_int().is_zero() ? 1 : 0);
        case CExpr::K::Bin: return binary(e);
        case CExpr::K::Ctor: {
            std::vector<Value> fs;
            fs.reserve(e.kids.size());
            for (const auto& k : e.kids)
                fs.push_back(eval(k));
            return Object(e.adt, e.ctor, std::move(fs));
        }
        case CExpr::K::Sel: {
            Value v = eval(e.kids[0]);
            const Object& o = v.as_obj();
            return o.ctor() == e.ctor ? o.fields()[e.field] : e.lit;
        }
        case CExpr::K::Is: return Integer(eval(e.kids[0]).as_obj().ctor() == e.ctor ? 1 : 0);
        }
        return Integer(0);
    }

private:
    const CompiledProgram& c_;
    std::vector<Value>& s_;
    H& h_;
    const PredicateOracle& I_;
    Fuel& fuel_;
    const RunOptions& opts_;
    std::vector<bool> written_;

    static Value flag(bool b) { return Integer(b ? 1 : 0); }

    Value binary(const CExpr& e) {
        Value a = eval(e.kids[0]);
        Value b = eval(e.kids[1]);
        switch (e.op) {
        case BinOp::Add: return a.as_int() + b.as_int();
        case BinOp::Sub: return a.as_int() - b.as_int();
        case BinOp::Mul: return a.as_int() * b.as_int();
        case BinOp::Div:
            if (b.as_int().is_zero())
                throw DivideByZero{};
            return a.as_int() / b.as_int();
        case BinOp::Mod:
            if (b.as_int().is_zero())
                throw DivideByZero{};
            return a.as_int() % b.as_int();
        case BinOp::Lt: return flag(a.as_int() < b.as_int());
        case BinOp::Le: return flag(a.as_int() <= b.as_int());
        case BinOp::Gt: return flag(a.as_int() > b.as_int());
        case BinOp::Ge: return flag(a.as_int() >= b.as_int());
        case BinOp::Eq: return flag(a == b);
        case BinOp::Ne: return flag(!(a == b));
        case BinOp::And: return flag(!a.as_int().is_zero() && !b.as_int().is_zero());
        case BinOp::Or: return flag(!a.as_int().is_zero() || !b.as_int().is_zero());
        }
        return Integer(0);
    }

    bool truthy(const CExpr& e) { return !eval(e).as_int().is_zero(); }

    Integer havoc_int() {
        seed_used = true;
        Integer sd = s_[c_.seed_slot].as_int();
        Integer x = -(sd % 2);
        sd = sd / 2;
        while (sd % 2 == 1) {
            sd = sd / 2;
            x = Integer(2) * x + sd % 2;
            sd = sd / 2;
        }
        sd = sd / 2;
        s_[c_.seed_slot] = sd;
        return x;
    }

    Value havoc(const HavocPlan& plan) {
        switch (plan.kind) {
        case TypeTag::Kind::Int: return havoc_int();
        case TypeTag::Kind::Addr: {
            Integer k = havoc_int();
            auto v = k.to_int64();
            std::uint64_t a = v ? static_cast<std::uint64_t>(*v < 0 ? -*v : *v) : 0;
            return Address{a};
        }
        case TypeTag::Kind::Obj: {
            std::size_t ctor = 0;
            if (plan.ctor_fields.size() > 1) {
                Integer k = havoc_int();
                auto v = k.to_int64();
                if (v && *v >= 0 && static_cast<std::size_t>(*v) < plan.ctor_fields.size())
                    ctor = static_cast<std::size_t>(*v);
            }
            std::vector<Value> fs;
            for (const auto& f : plan.ctor_fields[ctor])
                fs.push_back(havoc(f));
            return Object(plan.adt, static_cast<std::uint32_t>(ctor), std::move(fs));
        }
        }
        return Integer(0);
    }

    bool take_heap_fuel() {
        if (fuel_.heap_ops == 0)
            return false;
        --fuel_.heap_ops;
        return true;
    }

    static Signal undef(UndefinedReason r) {
        Signal s;
        s.k = Signal::K::Undef;
        s.reason = r;
        return s;
    }

    void note(MemoryEvent::Kind k, unsigned loc, Address a) {
        if (!mem)
            mem = MemoryEvent{k, loc, a.value};
    }

    Tuple args(const std::vector<CExpr>& es) {
        Tuple t;
        t.reserve(es.size());
        for (const auto& e : es)
            t.push_back(eval(e));
        return t;
    }

    Signal stmt(const CStmt& st) {
        switch (st.k) {
        case CStmt::K::Assign: s_[st.a] = eval(st.e); return {};
        case CStmt::K::Alloc: {
            if (!take_heap_fuel())
                return undef(UndefinedReason::FuelExhausted);
            Value o = eval(st.e);
            s_[st.a] = h_.allocate(std::move(o));
            if (opts_.monitor_memory)
                written_.push_back(opts_.alloc_initializes);
            return {};
        }
        case CStmt::K::Read: {
            if (!take_heap_fuel())
                return undef(UndefinedReason::FuelExhausted);
            Address p = s_[st.b].as_addr();
            if (opts_.monitor_memory) {
                if (!h_.valid(p))
                    note(MemoryEvent::Kind::InvalidRead, st.loc, p);
                else if (!written_[p.value - 1])
                    note(MemoryEvent::Kind::UninitializedRead, st.loc, p);
            }
            s_[st.a] = h_.read(p);
            return {};
        }
        case CStmt::K::Write: {
            if (!take_heap_fuel())
                return undef(UndefinedReason::FuelExhausted);
            Address p = s_[st.b].as_addr();
            Value o = eval(st.e);
            if (opts_.monitor_memory) {
                if (!h_.valid(p))
                    note(MemoryEvent::Kind::InvalidWrite, st.loc, p);
                else
                    written_[p.value - 1] = true;
            }
            h_.write(p, std::move(o));
            return {};
        }
        case CStmt::K::Skip: return {};
        case CStmt::K::If: return truthy(st.e) ? block(st.s1) : block(st.s2);
        case CStmt::K::While:
            while (truthy(st.e)) {
                if (fuel_.loop == 0)
                    return undef(UndefinedReason::FuelExhausted);
                --fuel_.loop;
                Signal r = block(st.s1);
                if (r.k != Signal::K::Normal)
                    return r;
            }
            return {};
        case CStmt::K::Assume:
            if (!truthy(st.e))
                return undef(UndefinedReason::AssumeFailed);
            return {};
        case CStmt::K::Assert:
            if (!truthy(st.e)) {
                Signal s;
                s.k = Signal::K::Bot;
                s.fail = true;
                return s;
            }
            return {};
        case CStmt::K::AssumeP: {
            Tuple t = args(st.args);
            if (!I_.holds(st.pred, t)) {
                Signal s = undef(UndefinedReason::AssumeFailed);
                s.pred = st.pred;
                s.tuple = std::move(t);
                s.blocked = true;
                return s;
            }
            return {};
        }
        case CStmt::K::AssertP: {
            Tuple t = args(st.args);
            if (!I_.holds(st.pred, t)) {
                Signal s;
                s.k = Signal::K::Bot;
                s.pred = st.pred;
                s.tuple = std::move(t);
                return s;
            }
            return {};
        }
        case CStmt::K::Havoc: s_[st.a] = havoc(st.plan); return {};
        }
        return {};
    }
};

bool static_reads_seed(const Program& p) {
    bool r = block_uses_var(p.body, p.seed_var);
    for_each_stmt(p.body, [&](const Stmt& s) {
        if (std::holds_alternative<Havoc>(s.node))
            r = true;
    });
    return r;
}

template <class H>
ExecResult execute(const CompiledProgram& c, std::vector<Value> stack, H heap, const PredicateOracle& I,
                   const RunOptions& opts) {
    ExecResult r;
    Fuel fuel = opts.fuel;
    Machine<H> m(c, stack, heap, I, fuel, opts);
    Signal sig;
    try {
        sig = m.block(c.body);
    } catch (const DivideByZero&) {
        sig.k = Signal::K::Bot;
        sig.fail = true;
    }
    switch (sig.k) {
    case Signal::K::Normal: r.outcome = Outcome::top(); break;
    case Signal::K::Bot:
        r.outcome = sig.fail ? Outcome::fail() : Outcome::bot(c.program.preds[sig.pred].name, std::move(sig.tuple));
        break;
    case Signal::K::Undef:
        r.outcome = Outcome::undefined(sig.reason);
        if (sig.blocked)
            r.blocked_on.emplace(sig.pred, std::move(sig.tuple));
        break;
    }
    r.seed_used = m.seed_used;
    r.memory_event = m.mem;
    r.remaining = fuel;
    r.heap_len = heap.size();
    if constexpr (std::is_same_v<H, Heap>) {
        r.heap = heap.objects();
    } else {
        for (std::uint64_t a = 1; a <= heap.size(); ++a)
            r.heap.push_back(heap.read(Address{a}));
    }
    r.stack = std::move(stack);
    return r;
}

}  // namespace

Evaluator::Evaluator(const Program& p) : c_(std::make_unique<CompiledProgram>()) {
    require_well_typed(p);
    c_->program = p;
    for (std::size_t i = 0; i < p.vars.size(); ++i)
        c_->slots.emplace(p.vars[i].name, static_cast<std::uint32_t>(i));
    c_->body = compile_block(c_->program, c_->slots, c_->program.body);
    c_->input_slot = c_->slots.at(p.input_var);
    c_->seed_slot = c_->slots.at(p.seed_var);
    if (p.prophecy_var)
        c_->prophecy_slot = c_->slots.at(*p.prophecy_var);
    if (p.fuel_var)
        c_->fuel_slot = c_->slots.at(*p.fuel_var);
    if (p.heap_type)
        c_->def = def_obj(p);
    c_->reads_seed = static_reads_seed(p);
}

Evaluator::~Evaluator() = default;
Evaluator::Evaluator(Evaluator&&) noexcept = default;

const Program& Evaluator::program() const { return c_->program; }

std::size_t Evaluator::slot(std::string_view var) const {
    auto s = find_slot(var);
    if (!s)
        throw std::out_of_range("unknown variable " + std::string(var));
    return *s;
}

std::optional<std::size_t> Evaluator::find_slot(std::string_view var) const {
    auto it = c_->slots.find(std::string(var));
    if (it == c_->slots.end())
        return std::nullopt;
    return it->second;
}

std::optional<std::size_t> Evaluator::pred_index(std::string_view pred) const {
    const auto& ps = c_->program.preds;
    for (std::size_t i = 0; i < ps.size(); ++i)
        if (ps[i].name == pred)
            return i;
    return std::nullopt;
}

std::vector<Value> Evaluator::initial_stack() const {
    std::vector<Value> s;
    s.reserve(c_->program.vars.size());
    for (const auto& v : c_->program.vars)
        s.push_back(default_value(c_->program, v.type));
    return s;
}

std::vector<Value> Evaluator::initial_stack(const Integer& in, const Integer& seed, const Integer& last_addr,
                                            std::uint64_t heap_op_fuel) const {
    auto s = initial_stack();
    s[c_->input_slot] = in;
    s[c_->seed_slot] = seed;
    if (c_->prophecy_slot)
        s[*c_->prophecy_slot] = last_addr;
    if (c_->fuel_slot)
        s[*c_->fuel_slot] = Integer(static_cast<std::int64_t>(heap_op_fuel));
    return s;
}

bool Evaluator::reads_seed() const { return c_->reads_seed; }

ExecResult Evaluator::run(std::vector<Value> stack, const PredicateOracle& I, const RunOptions& opts) const {
    Value def = c_->def ? *c_->def : Value(Integer(0));
    if (opts.trace_heap)
        return execute(*c_, std::move(stack), TraceHeap(def), I, opts);
    return execute(*c_, std::move(stack), Heap(def), I, opts);
}

ExecResult Evaluator::run(std::vector<Value> stack, Heap heap, const PredicateOracle& I, const RunOptions& opts) const {
    return execute(*c_, std::move(stack), std::move(heap), I, opts);
}

// ---- formulas ----

class CompiledFormulas {
public:
    CompiledFormulas(const Program& p, const std::vector<FormulaDef>& defs) {
        per_pred_.resize(p.preds.size());
        for (const auto& d : defs) {
            std::size_t idx = pred_slot(p, d.pred);
            Entry e;
            e.scope = p;
            e.scope.vars.clear();
            e.scope.body.clear();
            e.scope.prophecy_var.reset();
            e.scope.fuel_var.reset();
            SlotMap slots;
            for (std::size_t i = 0; i < d.params.size(); ++i) {
                e.scope.vars.push_back({d.params[i], p.preds[idx].params[i], {}});
                slots.emplace(d.params[i], static_cast<std::uint32_t>(i));
            }
            // a seed slot is needed by the machine; it is never read by formulas
            e.seed_slot = static_cast<std::uint32_t>(d.params.size());
            auto t = infer_type(e.scope, d.body);
            if (!t)
                throw DiagnosticError({Diagnostic{d.pos, "type mismatch: formula for '" + d.pred + "' is ill-typed"}});
            if (!t->is_int())
                throw DiagnosticError({Diagnostic{d.pos, "type mismatch: formula for '" + d.pred + "' must be Int"}});
            e.body = compile_expr(e.scope, slots, *d.body);
            per_pred_[idx] = std::move(e);
        }
    }

    bool holds(std::size_t pred, const Tuple& args) const {
        const auto& e = per_pred_[pred];
        if (!e)
            return false;
        CompiledProgram c;
        c.seed_slot = e->seed_slot;
        std::vector<Value> stack = args;
        stack.push_back(Integer(0));
        Heap h{Integer(0)};
        Fuel f;
        RunOptions o;
        EmptyOracle none;
        Machine<Heap> m(c, stack, h, none, f, o);
        try {
            return !m.eval(e->body).as_int().is_zero();
        } catch (const DivideByZero&) {
            return false;
        }
    }

private:
    struct Entry {
        Program scope;
        CExpr body;
        std::uint32_t seed_slot = 0;
    };
    std::vector<std::optional<Entry>> per_pred_;
};

FormulaOracle::FormulaOracle(const Program& p, const std::vector<FormulaDef>& defs)
    : impl_(std::make_unique<CompiledFormulas>(p, defs)) {}
FormulaOracle::~FormulaOracle() = default;
bool FormulaOracle::holds(std::size_t pred, const Tuple& args) const { return impl_->holds(pred, args); }

// ---- havoc expansion ----

Block expand_havoc_int(const std::string& x, const std::string& seed) {
    auto sv = [&] { return var(seed); };
    auto two = [] { return lit(2); };
    Block b;
    b.push_back(Assign{x, unary(UnOp::Neg, binary(BinOp::Mod, sv(), two()))});
    b.push_back(Assign{seed, binary(BinOp::Div, sv(), two())});
    Block body;
    body.push_back(Assign{seed, binary(BinOp::Div, sv(), two())});
    body.push_back(Assign{x, binary(BinOp::Add, binary(BinOp::Mul, two(), var(x)), binary(BinOp::Mod, sv(), two()))});
    body.push_back(Assign{seed, binary(BinOp::Div, sv(), two())});
    b.push_back(While{binary(BinOp::Eq, binary(BinOp::Mod, sv(), two()), lit(1)), std::move(body)});
    b.push_back(Assign{seed, binary(BinOp::Div, sv(), two())});
    return b;
}

namespace {

class HavocExpander {
public:
    explicit HavocExpander(Program& p, bool native) : p_(p), native_(native) {}

    void block(Block& b) {
        Block out;
        for (auto& s : b) {
            if (auto* h = std::get_if<Havoc>(&s.node); h && (!h->native || native_)) {
                const TypeTag& t = p_.find_var(h->var)->type;
                if (t.is_int()) {
                    for (auto& x : expand_havoc_int(h->var, p_.seed_var))
                        out.push_back(std::move(x));
                } else {
                    auto [stmts, value] = obj(t);
                    for (auto& x : stmts)
                        out.push_back(std::move(x));
                    out.push_back(Assign{h->var, value});
                }
                continue;
            }
            if (auto* i = std::get_if<If>(&s.node)) {
                block(i->then_branch);
                block(i->else_branch);
            } else if (auto* w = std::get_if<While>(&s.node)) {
                block(w->body);
            }
            out.push_back(std::move(s));
        }
        b = std::move(out);
    }

private:
    Program& p_;
    bool native_;
    int counter_ = 0;

    std::string fresh(const TypeTag& t) {
        std::string n;
        do {
            n = "$hv" + std::to_string(counter_++);
        } while (p_.name_taken(n));
        p_.vars.push_back({n, t, {}});
        return n;
    }

    std::pair<Block, ExprPtr> leaf(const TypeTag& t) {
        if (t.is_addr())
            throw std::invalid_argument("havoc of an object with Addr fields cannot be expanded");
        if (t.is_int()) {
            std::string v = fresh(TypeTag::integer());
            return {expand_havoc_int(v, p_.seed_var), var(v)};
        }
        return obj(t);
    }

    std::pair<Block, ExprPtr> build_ctor(const Constructor& c) {
        Block b;
        std::vector<ExprPtr> args;
        for (const auto& f : c.fields) {
            auto [stmts, v] = leaf(f.type);
            for (auto& s : stmts)
                b.push_back(std::move(s));
            args.push_back(v);
        }
        return {std::move(b), ctor_app(c.name, std::move(args))};
    }

    std::pair<Block, ExprPtr> obj(const TypeTag& t) {
        const AdtDecl adt = *p_.find_adt(t.adt);
        if (adt.ctors.size() == 1)
            return build_ctor(adt.ctors[0]);
        std::string k = fresh(TypeTag::integer());
        std::string r = fresh(t);
        Block b = expand_havoc_int(k, p_.seed_var);
        // if (k = 1) {..} else { if (k = 2) {..} else {default} }
        auto [d_stmts, d_val] = build_ctor(adt.ctors[0]);
        Block chain = std::move(d_stmts);
        chain.push_back(Assign{r, d_val});
        for (std::size_t i = adt.ctors.size() - 1; i >= 1; --i) {
            auto [stmts, v] = build_ctor(adt.ctors[i]);
            stmts.push_back(Assign{r, v});
            Block next;
            next.push_back(If{binary(BinOp::Eq, var(k), lit(static_cast<std::int64_t>(i))), std::move(stmts),
                              std::move(chain)});
            chain = std::move(next);
        }
        for (auto& s : chain)
            b.push_back(std::move(s));
        return {std::move(b), var(r)};
    }
};

}  // namespace

Program expand_havoc(const Program& p, bool expand_native) {
    Program q = p;
    HavocExpander(q, expand_native).block(q.body);
    assign_locations_in_place(q);
    return q;
}

}  // namespace heapinv
