#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "heapinv/ast.hpp"
#include "heapinv/interp.hpp"

namespace heapinv {

struct IntRange {
    std::int64_t lo = 0;
    std::int64_t hi = 0;
    std::size_t size() const { return hi < lo ? 0 : static_cast<std::size_t>(hi - lo + 1); }
};

struct InputDomain {
    IntRange in{-3, 3};
    IntRange seed{0, 255};
    IntRange last_addr{0, 6};
    std::uint64_t loop_fuel = 64;
    std::uint64_t heap_op_fuel = 32;
    std::optional<std::size_t> iteration_cap;  // default 10 * grid size

    void validate() const;  // throws std::invalid_argument
    std::size_t grid_size() const { return in.size() * seed.size() * last_addr.size(); }
    RunOptions run_options() const;
};

struct GridPoint {
    std::int64_t in = 0, seed = 0, last_addr = 0;
    bool operator==(const GridPoint&) const = default;
};

struct Witness {
    GridPoint point;
    std::string pred;
    Tuple tuple;
};

struct SafetyVerdict {
    enum class Kind { Safe, Unsafe, Inconclusive } kind = Kind::Safe;
    std::optional<Witness> witness;      // first Bot in (in, seed, lastAddr) order
    std::size_t inconclusive_count = 0;  // fuel-exhausted grid points
    std::size_t unsafe_count = 0;        // grid points ending in Bot

    bool unsafe() const { return kind == Kind::Unsafe; }
};

const char* to_string(SafetyVerdict::Kind k);

class FixpointDivergence : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct PointOutcome {
    GridPoint point;
    Outcome outcome;
};

struct FixpointResult {
    Interpretation interpretation;
    std::size_t iterations = 0;  // number of strictly growing steps
    // outcome of every grid point under the final interpretation
    std::vector<PointOutcome> outcomes;
};

// T_p(I) over the whole grid.
Interpretation immediate_consequence(const ast::Program& p, const Interpretation& I, const InputDomain& D);

// Least fixed point from the empty interpretation. Points are re-evaluated
// only when the tuple they were blocked on (failed assume or assert) has
// been added, which yields the same sequence as naive iteration.
FixpointResult least_fixpoint(const ast::Program& p, const InputDomain& D);

SafetyVerdict verdict_from(const FixpointResult& r);
SafetyVerdict check_safety(const ast::Program& p, const InputDomain& D);

// Names needed to relate Enc_n(p) with its R encoding pointwise.
struct CosimSpec {
    std::string last_var;       // $last
    std::string cnt_alloc_var;  // $cnt_alloc
    std::string last_addr_var;  // prophecy variable
};

struct CosimReport {
    std::size_t points_checked = 0;
    std::size_t violations = 0;
    std::vector<std::string> samples;    // first few violations, human readable
    std::size_t uncovered_groups = 0;    // (in, lastAddr) pairs where no seed gave a defined run
    std::size_t total_groups = 0;
    bool ok() const { return violations == 0; }
};

// p_star = Enc_n(p), q = Enc_R(p_star)
CosimReport cosimulate(const ast::Program& p_star, const ast::Program& q, const InputDomain& D, const CosimSpec& spec);

struct EquisafetyReport {
    SafetyVerdict original;
    SafetyVerdict encoded;
    FixpointResult original_fixpoint;
    FixpointResult encoded_fixpoint;
    std::optional<CosimReport> cosim;
    bool agree() const { return original.unsafe() == encoded.unsafe(); }
};

EquisafetyReport check_equisafety(const ast::Program& p, const ast::Program& q, const InputDomain& D);

// Functional consistency of I*: no two tuples agree on the first two arguments
// (input, counter) but differ in the rest.
// Returns a description of the first violation.
std::optional<std::string> functional_violation(const ast::Program& p, const Interpretation& I,
                                                const std::string& pred);

struct MemorySafetyReport {
    bool memory_safe = true;      // no invalid access and no read of an unwritten address
    bool invalid_access = false;  // some read/write of an address outside 1..allocs
    std::optional<GridPoint> point;
    std::optional<MemoryEvent> event;
};

// Runs p (under its own I*) with the memory monitor over the grid.
MemorySafetyReport check_memory_safety(const ast::Program& p, const InputDomain& D, bool alloc_initializes = false);

}  // namespace heapinv
