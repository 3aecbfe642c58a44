#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "heapinv/ast.hpp"

namespace heapinv::chc {

// Minimal SMT-LIB term.
struct Term {
    std::string atom;  // used when args is empty and !is_app
    std::vector<Term> args;
    bool is_app = false;  // (atom args...)

    static Term sym(std::string s) { return {std::move(s), {}, false}; }
    static Term app(std::string head, std::vector<Term> args) { return {std::move(head), std::move(args), true}; }
    bool is_true() const { return !is_app && atom == "true"; }
    bool is_false() const { return !is_app && atom == "false"; }
    std::string to_string() const;
    bool operator==(const Term&) const = default;
};

struct PredicateSig {
    std::string name;
    std::vector<std::string> sorts;
    bool location = false;  // Inv_k
};

struct Clause {
    std::vector<std::pair<std::string, std::string>> vars;  // universally quantified (name, sort)
    std::vector<Term> atoms;                                // predicate applications in the body
    Term constraint = Term::sym("true");
    std::optional<Term> head;  // nullopt = false
};

struct ClauseSet {
    std::string datatypes;  // rendered declare-datatypes command, empty if none
    std::vector<PredicateSig> predicates;
    std::vector<Clause> clauses;
};

class ChcError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ChcOptions {
    // Objects become one Int per field (plus a constructor tag when there is
    // more than one constructor) instead of an SMT datatype.
    bool flatten_objects = false;
};

// Heap-free programs only. Havoc statements become unconstrained values;
// callers wanting the seed macro expand it first.
ClauseSet to_chc(const ast::Program& p, const ChcOptions& opts = {});

std::string emit_smtlib(const ClauseSet& cs);

std::string quote_symbol(const std::string& s);

enum class SolverAnswer { Sat, Unsat, Unknown, ToolError };
const char* to_string(SolverAnswer a);

struct SolveResult {
    SolverAnswer answer = SolverAnswer::ToolError;
    std::string detail;
};

// Template with a {file} placeholder; HEAPINV_SOLVER overrides it when set.
std::string default_solver_command();
bool solver_available(const std::string& command_template);
SolveResult solve(const std::string& path, const std::string& command_template, double timeout_seconds);

}  // namespace heapinv::chc
