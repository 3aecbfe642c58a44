#include "heapinv/fixpoint.hpp"

#include <map>
#include <sstream>

namespace heapinv {

using namespace ast;

const char* to_string(SafetyVerdict::Kind k) {
    switch (k) {
    case SafetyVerdict::Kind::Safe: return "Safe";
    case SafetyVerdict::Kind::Unsafe: return "Unsafe";
    case SafetyVerdict::Kind::Inconclusive: return "Inconclusive";
    }
    return "?";
}

void InputDomain::validate() const {
    auto check = [](const IntRange& r, const char* name) {
        if (r.hi < r.lo)
            throw std::invalid_argument(std::string(name) + " range is empty");
    };
    check(in, "in");
    check(seed, "seed");
    check(last_addr, "lastAddr");
    if (seed.lo < 0)
        throw std::invalid_argument("seed range must be non-negative");
    if (last_addr.lo < 0)
        throw std::invalid_argument("lastAddr range must be non-negative");
}

RunOptions InputDomain::run_options() const {
    RunOptions o;
    o.fuel.loop = loop_fuel;
    o.fuel.heap_ops = heap_op_fuel;
    return o;
}

namespace {

struct Cell {
    Outcome outcome;
    // tuple whose absence decided the run: failed predicate assert or assume
    std::optional<std::pair<std::size_t, Tuple>> query;
    bool seed_used = false;
};

// Grid evaluation grouped by (in, lastAddr). A group whose run never touched
// the seed stands for every seed value.
class GridEngine {
public:
    GridEngine(const Program& p, const InputDomain& D) : ev_(p), D_(D), opts_(D.run_options()) {
        D.validate();
        for (auto v = D.in.lo; v <= D.in.hi; ++v)
            for (auto a = D.last_addr.lo; a <= D.last_addr.hi; ++a)
                groups_.push_back({v, a, true, {}});
        if (ev_.reads_seed())
            for (auto s = D.seed.lo; s <= D.seed.hi; ++s)
                seeds_.push_back(s);
        else
            seeds_.push_back(D.seed.lo);
    }

    const Evaluator& evaluator() const { return ev_; }
    const Program& program() const { return ev_.program(); }

    void evaluate_all(const PredicateOracle& I) {
        for (auto& g : groups_)
            evaluate_group(g, I);
    }

    // rerun every cell whose deciding query is now in delta
    void refresh(const PredicateOracle& I, const Interpretation& delta) {
        for (auto& g : groups_) {
            if (g.collapsed) {
                if (waiting_on(g.cells[0], delta))
                    evaluate_group(g, I);
                continue;
            }
            for (std::size_t i = 0; i < g.cells.size(); ++i)
                if (waiting_on(g.cells[i], delta))
                    g.cells[i] = run(g.in, seeds_[i], g.last, I);
        }
    }

    // Bot tuples not yet in I
    Interpretation new_failures(const Interpretation& I) const {
        Interpretation delta;
        for (const auto& g : groups_)
            for (const auto& c : g.cells)
                if (c.outcome.is_bot() && c.outcome.pred != kFailPredicate && !I.contains(c.outcome.pred, c.outcome.tuple))
                    delta.insert(c.outcome.pred, c.outcome.tuple);
        return delta;
    }

    void collect_failures(Interpretation& into) const {
        for (const auto& g : groups_)
            for (const auto& c : g.cells)
                if (c.outcome.is_bot() && c.outcome.pred != kFailPredicate)
                    into.insert(c.outcome.pred, c.outcome.tuple);
    }

    std::vector<PointOutcome> outcomes() const {
        // lexicographic (in, seed, lastAddr)
        std::vector<PointOutcome> out;
        out.reserve(D_.grid_size());
        std::size_t per_in = D_.last_addr.size();
        for (std::size_t ii = 0; ii < D_.in.size(); ++ii) {
            for (auto s = D_.seed.lo; s <= D_.seed.hi; ++s) {
                for (std::size_t ai = 0; ai < per_in; ++ai) {
                    const Group& g = groups_[ii * per_in + ai];
                    const Cell& c = g.collapsed ? g.cells[0] : g.cells[static_cast<std::size_t>(s - D_.seed.lo)];
                    out.push_back({{g.in, s, g.last}, c.outcome});
                }
            }
        }
        return out;
    }

private:
    struct Group {
        std::int64_t in, last;
        bool collapsed;
        std::vector<Cell> cells;
    };

    Evaluator ev_;
    InputDomain D_;
    RunOptions opts_;
    std::vector<Group> groups_;
    std::vector<std::int64_t> seeds_;

    bool waiting_on(const Cell& c, const Interpretation& delta) const {
        return c.query && delta.contains(program().preds[c.query->first].name, c.query->second);
    }

    Cell run(std::int64_t in, std::int64_t seed, std::int64_t last, const PredicateOracle& I) const {
        auto r = ev_.run(ev_.initial_stack(in, seed, last, D_.heap_op_fuel), I, opts_);
        Cell c;
        c.seed_used = r.seed_used;
        if (r.outcome.is_bot() && r.outcome.pred != kFailPredicate) {
            auto idx = ev_.pred_index(r.outcome.pred);
            c.query.emplace(*idx, r.outcome.tuple);
        } else if (r.blocked_on) {
            c.query = std::move(r.blocked_on);
        }
        c.outcome = std::move(r.outcome);
        return c;
    }

    void evaluate_group(Group& g, const PredicateOracle& I) {
        g.cells.clear();
        g.cells.push_back(run(g.in, seeds_[0], g.last, I));
        if (!g.cells[0].seed_used || seeds_.size() == 1) {
            g.collapsed = true;
            return;
        }
        g.collapsed = false;
        for (std::size_t i = 1; i < seeds_.size(); ++i)
            g.cells.push_back(run(g.in, seeds_[i], g.last, I));
    }
};

}  // namespace

Interpretation immediate_consequence(const Program& p, const Interpretation& I, const InputDomain& D) {
    GridEngine e(p, D);
    BoundInterpretation oracle(e.program(), I);
    e.evaluate_all(oracle);
    Interpretation out = I;
    e.collect_failures(out);
    return out;
}

FixpointResult least_fixpoint(const Program& p, const InputDomain& D) {
    GridEngine e(p, D);
    std::size_t cap = D.iteration_cap.value_or(10 * D.grid_size());
    FixpointResult r;
    {
        BoundInterpretation oracle(e.program(), r.interpretation);
        e.evaluate_all(oracle);
    }
    for (;;) {
        Interpretation delta = e.new_failures(r.interpretation);
        if (delta.total_size() == 0)
            break;
        if (++r.iterations > cap) {
            std::ostringstream os;
            os << "fixpoint did not converge within " << cap << " iterations (" << r.interpretation.total_size()
               << " tuples so far)";
            throw FixpointDivergence(os.str());
        }
        r.interpretation.merge(delta);
        BoundInterpretation oracle(e.program(), r.interpretation);
        e.refresh(oracle, delta);
    }
    r.outcomes = e.outcomes();
    return r;
}

SafetyVerdict verdict_from(const FixpointResult& r) {
    SafetyVerdict v;
    for (const auto& po : r.outcomes) {
        if (po.outcome.is_bot()) {
            ++v.unsafe_count;
            if (!v.witness)
                v.witness = Witness{po.point, po.outcome.pred, po.outcome.tuple};
        } else if (po.outcome.is_undefined() && po.outcome.reason == UndefinedReason::FuelExhausted) {
            ++v.inconclusive_count;
        }
    }
    if (v.witness)
        v.kind = SafetyVerdict::Kind::Unsafe;
    else if (v.inconclusive_count)
        v.kind = SafetyVerdict::Kind::Inconclusive;
    return v;
}

SafetyVerdict check_safety(const Program& p, const InputDomain& D) { return verdict_from(least_fixpoint(p, D)); }

EquisafetyReport check_equisafety(const Program& p, const Program& q, const InputDomain& D) {
    EquisafetyReport r;
    r.original_fixpoint = least_fixpoint(p, D);
    r.encoded_fixpoint = least_fixpoint(q, D);
    r.original = verdict_from(r.original_fixpoint);
    r.encoded = verdict_from(r.encoded_fixpoint);
    return r;
}

namespace {

bool outcomes_match(const Outcome& a, const Outcome& b) {
    if (a.kind != b.kind || a.pred != b.pred || a.tuple.size() != b.tuple.size())
        return false;
    if (a.is_undefined() && a.reason != b.reason)
        return false;
    for (std::size_t i = 0; i < a.tuple.size(); ++i)
        if (!a.tuple[i].numerically_equal(b.tuple[i]))
            return false;
    return true;
}

}  // namespace

CosimReport cosimulate(const Program& p_star, const Program& q, const InputDomain& D, const CosimSpec& spec) {
    D.validate();
    CosimReport rep;
    Evaluator e1(p_star), e2(q);
    auto I1 = least_fixpoint(p_star, D).interpretation;
    auto I2 = least_fixpoint(q, D).interpretation;
    BoundInterpretation o1(p_star, I1), o2(q, I2);
    RunOptions opts = D.run_options();
    std::size_t last_slot = e2.slot(spec.last_var);
    std::size_t cnt_alloc_slot = e2.slot(spec.cnt_alloc_var);

    // common variables, except the seed which only encoder havocs consume
    std::vector<std::pair<std::size_t, std::size_t>> common;
    for (std::size_t i = 0; i < p_star.vars.size(); ++i) {
        const auto& name = p_star.vars[i].name;
        if (name == p_star.seed_var)
            continue;
        if (auto j = e2.find_slot(name))
            common.emplace_back(i, *j);
    }
    Value def = p_star.heap_type ? def_obj(p_star) : Value(Integer(0));

    std::map<std::pair<std::int64_t, std::int64_t>, ExecResult> cache1;
    auto run1 = [&](std::int64_t in, std::int64_t seed) -> const ExecResult& {
        auto key = std::make_pair(in, e1.reads_seed() ? seed : D.seed.lo);
        auto it = cache1.find(key);
        if (it == cache1.end())
            it = cache1.emplace(key, e1.run(e1.initial_stack(in, key.second, 0, D.heap_op_fuel), o1, opts)).first;
        return it->second;
    };

    auto violation = [&](const GridPoint& g, const std::string& what) {
        ++rep.violations;
        if (rep.samples.size() < 8) {
            std::ostringstream os;
            os << "in=" << g.in << " seed=" << g.seed << " lastAddr=" << g.last_addr << ": " << what;
            rep.samples.push_back(os.str());
        }
    };

    auto check = [&](const GridPoint& g, const ExecResult& r2, std::size_t weight) {
        const ExecResult& r1 = run1(g.in, g.seed);
        rep.points_checked += weight;
        if (!outcomes_match(r1.outcome, r2.outcome)) {
            violation(g, "outcome " + to_string(p_star, r1.outcome) + " vs " + to_string(q, r2.outcome));
            return;
        }
        for (auto [i, j] : common)
            if (!r1.stack[i].numerically_equal(r2.stack[j]))
                violation(g, "variable " + p_star.vars[i].name + ": " + to_string(p_star, r1.stack[i]) + " vs " +
                                 to_string(q, r2.stack[j]));
        Value tracked = def;
        if (g.last_addr > 0 && static_cast<std::size_t>(g.last_addr) <= r1.heap.size())
            tracked = r1.heap[static_cast<std::size_t>(g.last_addr) - 1];
        if (!tracked.numerically_equal(r2.stack[last_slot]))
            violation(g, spec.last_var + " = " + to_string(q, r2.stack[last_slot]) + " but heap holds " +
                             to_string(p_star, tracked));
        if (!r2.stack[cnt_alloc_slot].numerically_equal(Integer(static_cast<std::int64_t>(r1.heap.size()))))
            violation(g, spec.cnt_alloc_var + " = " + to_string(q, r2.stack[cnt_alloc_slot]) + " but heap length is " +
                             std::to_string(r1.heap.size()));
    };

    for (auto in = D.in.lo; in <= D.in.hi; ++in) {
        for (auto a = D.last_addr.lo; a <= D.last_addr.hi; ++a) {
            ++rep.total_groups;
            bool covered = false;
            auto r2 = e2.run(e2.initial_stack(in, D.seed.lo, a, D.heap_op_fuel), o2, opts);
            if (!r2.seed_used) {
                if (!r2.outcome.is_undefined()) {
                    covered = true;
                    check({in, D.seed.lo, a}, r2, D.seed.size());
                }
            } else {
                for (auto s = D.seed.lo; s <= D.seed.hi; ++s) {
                    if (s != D.seed.lo)
                        r2 = e2.run(e2.initial_stack(in, s, a, D.heap_op_fuel), o2, opts);
                    if (r2.outcome.is_undefined())
                        continue;
                    covered = true;
                    check({in, s, a}, r2, 1);
                }
            }
            if (!covered && !run1(in, D.seed.lo).outcome.is_undefined())
                ++rep.uncovered_groups;
        }
    }
    return rep;
}

std::optional<std::string> functional_violation(const Program& p, const Interpretation& I, const std::string& pred) {
    std::map<Tuple, Tuple, TupleLess> seen;
    for (const auto& t : I.relation(pred)) {
        if (t.size() < 2)
            continue;
        Tuple key(t.begin(), t.begin() + 2);
        Tuple rest(t.begin() + 2, t.end());
        auto [it, fresh] = seen.emplace(key, rest);
        if (!fresh && !(it->second == rest))
            return pred + to_string(p, key) + " maps to both " + to_string(p, it->second) + " and " +
                   to_string(p, rest);
    }
    return std::nullopt;
}

MemorySafetyReport check_memory_safety(const Program& p, const InputDomain& D, bool alloc_initializes) {
    MemorySafetyReport rep;
    auto fx = least_fixpoint(p, D);
    Evaluator ev(p);
    BoundInterpretation oracle(p, fx.interpretation);
    RunOptions opts = D.run_options();
    opts.monitor_memory = true;
    opts.alloc_initializes = alloc_initializes;
    bool seeds = ev.reads_seed();
    for (auto in = D.in.lo; in <= D.in.hi; ++in)
        for (auto s = D.seed.lo; s <= (seeds ? D.seed.hi : D.seed.lo); ++s)
            for (auto a = D.last_addr.lo; a <= (p.prophecy_var ? D.last_addr.hi : D.last_addr.lo); ++a) {
                auto r = ev.run(ev.initial_stack(in, s, a, D.heap_op_fuel), oracle, opts);
                if (!r.memory_event)
                    continue;
                rep.memory_safe = false;
                if (r.memory_event->kind != MemoryEvent::Kind::UninitializedRead)
                    rep.invalid_access = true;
                if (!rep.event || (rep.event->kind == MemoryEvent::Kind::UninitializedRead &&
                                   r.memory_event->kind != MemoryEvent::Kind::UninitializedRead)) {
                    rep.event = r.memory_event;
                    rep.point = GridPoint{in, s, a};
                }
            }
    return rep;
}

}  // namespace heapinv
