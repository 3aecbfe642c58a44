#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "heapinv/ast.hpp"
#include "heapinv/heap.hpp"
#include "heapinv/syntax.hpp"
#include "heapinv/value.hpp"

namespace heapinv {

inline constexpr const char* kFailPredicate = "F";

enum class OutcomeKind { Top, Bot, Undefined };
enum class UndefinedReason { None, AssumeFailed, FuelExhausted };

struct Outcome {
    OutcomeKind kind = OutcomeKind::Top;
    std::string pred;  // Bot only; "F" for a failed expression assertion
    Tuple tuple;       // Bot only
    UndefinedReason reason = UndefinedReason::None;

    static Outcome top() { return {}; }
    static Outcome bot(std::string pred, Tuple t) { return {OutcomeKind::Bot, std::move(pred), std::move(t), {}}; }
    static Outcome fail() { return bot(kFailPredicate, {}); }
    static Outcome undefined(UndefinedReason r) { return {OutcomeKind::Undefined, {}, {}, r}; }

    bool is_top() const { return kind == OutcomeKind::Top; }
    bool is_bot() const { return kind == OutcomeKind::Bot; }
    bool is_undefined() const { return kind == OutcomeKind::Undefined; }
    bool operator==(const Outcome&) const = default;
};

std::string to_string(const ast::Program& p, const Outcome& o);

struct Fuel {
    std::uint64_t loop = 64;
    std::uint64_t heap_ops = 32;
};

struct TupleLess {
    bool operator()(const Tuple& a, const Tuple& b) const { return compare_tuples(a, b) < 0; }
};
using TupleSet = std::set<Tuple, TupleLess>;

// Predicate name -> finite relation.
class Interpretation {
public:
    bool contains(const std::string& pred, const Tuple& t) const;
    bool insert(const std::string& pred, Tuple t);  // true if new
    const TupleSet& relation(const std::string& pred) const;
    const std::map<std::string, TupleSet>& relations() const { return rel_; }
    std::size_t total_size() const;
    bool subset_of(const Interpretation& other) const;
    void merge(const Interpretation& other);
    friend bool operator==(const Interpretation& a, const Interpretation& b);

private:
    std::map<std::string, TupleSet> rel_;
};

// Membership test for predicate applications, by index into program.preds.
class PredicateOracle {
public:
    virtual ~PredicateOracle() = default;
    virtual bool holds(std::size_t pred, const Tuple& args) const = 0;
};

class BoundInterpretation final : public PredicateOracle {
public:
    BoundInterpretation(const ast::Program& p, const Interpretation& I);
    bool holds(std::size_t pred, const Tuple& args) const override;

private:
    std::vector<const TupleSet*> sets_;
};

class CompiledFormulas;

// Predicates defined by closed formulas (interpretation files).
class FormulaOracle final : public PredicateOracle {
public:
    FormulaOracle(const ast::Program& p, const std::vector<FormulaDef>& defs);
    ~FormulaOracle() override;
    bool holds(std::size_t pred, const Tuple& args) const override;

private:
    std::unique_ptr<CompiledFormulas> impl_;
};

struct MemoryEvent {
    enum class Kind { InvalidRead, InvalidWrite, UninitializedRead } kind;
    unsigned loc = 0;
    std::uint64_t address = 0;
};
std::string to_string(const MemoryEvent& e);

struct RunOptions {
    Fuel fuel;
    bool trace_heap = false;
    // record memory-safety events (for the RWfun precondition check)
    bool monitor_memory = false;
    bool alloc_initializes = false;  // whether alloc counts as a write for the monitor
};

struct ExecResult {
    Outcome outcome;
    std::vector<Value> stack;  // aligned with program.vars
    std::vector<Value> heap;   // heap mode: final objects; trace mode: reconstructed
    std::size_t heap_len = 0;
    bool seed_used = false;
    // predicate assume that blocked the run (pred index, arguments)
    std::optional<std::pair<std::size_t, Tuple>> blocked_on;
    std::optional<MemoryEvent> memory_event;
    Fuel remaining;
};

struct CompiledProgram;

// Compiles a typechecked program once; runs are independent and may proceed
// concurrently.
class Evaluator {
public:
    explicit Evaluator(const ast::Program& p);
    ~Evaluator();
    Evaluator(Evaluator&&) noexcept;

    const ast::Program& program() const;
    std::size_t slot(std::string_view var) const;
    std::optional<std::size_t> find_slot(std::string_view var) const;
    std::optional<std::size_t> pred_index(std::string_view pred) const;

    // default values, with designated inputs overwritten
    std::vector<Value> initial_stack() const;
    std::vector<Value> initial_stack(const Integer& in, const Integer& seed, const Integer& last_addr,
                                     std::uint64_t heap_op_fuel) const;

    ExecResult run(std::vector<Value> stack, const PredicateOracle& I, const RunOptions& opts) const;
    // run against an explicit starting heap (heap mode only)
    ExecResult run(std::vector<Value> stack, Heap heap, const PredicateOracle& I, const RunOptions& opts) const;

    bool reads_seed() const;  // statically: havoc or a reference to the seed variable

private:
    std::unique_ptr<CompiledProgram> c_;
};

// Empty interpretation oracle.
class EmptyOracle final : public PredicateOracle {
public:
    bool holds(std::size_t, const Tuple&) const override { return false; }
};

// Literal expansion of havoc(x) into the seed macro; Obj targets use fresh Int
// temporaries declared in the returned program. Native havocs are kept unless
// expand_native is set.
ast::Program expand_havoc(const ast::Program& p, bool expand_native = false);
ast::Block expand_havoc_int(const std::string& x, const std::string& seed);

}  // namespace heapinv
