#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "heapinv/chc.hpp"
#include "heapinv/encode.hpp"
#include "heapinv/fixpoint.hpp"
#include "support.hpp"

using namespace heapinv;
using namespace heapinv::chc;
using testing_support::parse;
namespace fs = std::filesystem;

namespace {

// Propositional reading of a clause set whose constraints are all literally
// true or false: a predicate is derivable when some clause with a true
// constraint has all its body predicates derivable. Exact when every clause
// argument is a distinct universally quantified variable.
bool ground_unsat(const ClauseSet& cs) {
    std::set<std::string> derived;
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& c : cs.clauses) {
            if (!c.constraint.is_true()) continue;
            bool fires = true;
            for (const auto& a : c.atoms) fires = fires && derived.count(a.atom);
            if (!fires) continue;
            if (!c.head) return true;
            if (derived.insert(c.head->atom).second) changed = true;
        }
    }
    return false;
}

struct SExpr {
    std::string atom;
    std::vector<SExpr> list;
    bool is_list = false;
};

class SExprReader {
public:
    explicit SExprReader(std::string s) : s_(std::move(s)) {}

    std::vector<SExpr> all() {
        std::vector<SExpr> out;
        skip_ws();
        while (i_ < s_.size()) {
            out.push_back(read());
            skip_ws();
        }
        return out;
    }

private:
    std::string s_;
    std::size_t i_ = 0;

    void skip_ws() {
        while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
    }
    SExpr read() {
        skip_ws();
        if (i_ >= s_.size()) throw std::runtime_error("unexpected end");
        if (s_[i_] == ')') throw std::runtime_error("unbalanced )");
        if (s_[i_] == '(') {
            ++i_;
            SExpr e;
            e.is_list = true;
            for (;;) {
                skip_ws();
                if (i_ >= s_.size()) throw std::runtime_error("unclosed (");
                if (s_[i_] == ')') {
                    ++i_;
                    return e;
                }
                e.list.push_back(read());
            }
        }
        SExpr e;
        if (s_[i_] == '|') {
            auto end = s_.find('|', i_ + 1);
            if (end == std::string::npos) throw std::runtime_error("unclosed |");
            e.atom = s_.substr(i_, end - i_ + 1);
            i_ = end + 1;
            return e;
        }
        while (i_ < s_.size() && !std::isspace(static_cast<unsigned char>(s_[i_])) && s_[i_] != '(' && s_[i_] != ')')
            e.atom += s_[i_++];
        return e;
    }
};

std::size_t count_commands(const std::string& text, const std::string& head) {
    std::size_t n = 0;
    for (const auto& e : SExprReader(text).all())
        if (e.is_list && !e.list.empty() && e.list[0].atom == head) ++n;
    return n;
}

ast::Program encoded(const std::string& name, EncodingBase base) {
    EncodingConfig cfg;
    cfg.base = base;
    cfg.native_havoc = true;
    return encode(testing_support::corpus_program(name).program, cfg).program;
}

std::string read_text(const fs::path& p) {
    std::ifstream f(p);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

fs::path temp_file(const std::string& name, const std::string& text) {
    auto dir = fs::temp_directory_path() / ("heapinv_chc_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    auto p = dir / name;
    std::ofstream(p) << text;
    return p;
}

fs::path script(const std::string& name, const std::string& body) {
    auto p = temp_file(name, "#!/bin/sh\n" + body + "\n");
    fs::permissions(p, fs::perms::owner_all);
    return p;
}

}  // namespace

TEST(Chc, SkipOnlyProgram) {
    auto cs = to_chc(parse("prog { var in: Int; skip; }"));
    ASSERT_EQ(cs.clauses.size(), 1u);
    EXPECT_TRUE(cs.clauses[0].atoms.empty());
    ASSERT_TRUE(cs.clauses[0].head.has_value());
    EXPECT_FALSE(ground_unsat(cs));
}

TEST(Chc, AssertZeroProgram) {
    auto cs = to_chc(parse("prog { var in: Int; assert(0); }"));
    ASSERT_EQ(cs.clauses.size(), 2u);
    EXPECT_FALSE(cs.clauses[1].head.has_value());
    ASSERT_EQ(cs.clauses[1].atoms.size(), 1u);
    EXPECT_EQ(cs.clauses[1].atoms[0].atom, cs.clauses[0].head->atom);
    EXPECT_TRUE(ground_unsat(cs));
}

TEST(Chc, PredicatePositions) {
    auto cs = to_chc(parse("prog { pred P(Int); var in: Int; var x: Int; assume(P(in)); x := in; assert(P(x)); }"));
    bool body = false, head = false;
    for (const auto& c : cs.clauses) {
        for (const auto& a : c.atoms) body = body || a.atom == "P";
        head = head || (c.head && c.head->atom == "P");
    }
    EXPECT_TRUE(body);
    EXPECT_TRUE(head);
}

TEST(Chc, RejectsHeapPrograms) {
    EXPECT_THROW(to_chc(parse("prog { adt C { C(v: Int) } var in: Int; var p: Addr; p := alloc(defObj); }")), ChcError);
}

TEST(Chc, EmptyClauseSet) {
    EXPECT_EQ(emit_smtlib(ClauseSet{}), "(set-logic HORN)\n(check-sat)\n");
}

TEST(Chc, QuotesSymbols) {
    EXPECT_EQ(quote_symbol("x"), "x");
    EXPECT_EQ(quote_symbol("$cnt"), "|$cnt|");
    EXPECT_EQ(quote_symbol("assert"), "|assert|");
}

TEST(Chc, CorpusEncodingsAreWellFormed) {
    for (const auto& cp : testing_support::corpus()) {
        for (auto base : {EncodingBase::R, EncodingBase::RW, EncodingBase::RWfun, EncodingBase::RWmem}) {
            for (bool flat : {false, true}) {
                ChcOptions o;
                o.flatten_objects = flat;
                auto cs = to_chc(encoded(cp.entry.name, base), o);
                std::size_t entry = 0;
                for (const auto& c : cs.clauses) {
                    ASSERT_LE(c.atoms.size(), 2u) << cp.entry.name;
                    if (c.atoms.empty() && c.head && c.head->atom == "Inv_0") ++entry;
                }
                EXPECT_EQ(entry, 1u) << cp.entry.name;
                auto text = emit_smtlib(cs);
                EXPECT_EQ(text, emit_smtlib(to_chc(encoded(cp.entry.name, base), o)));
                EXPECT_EQ(count_commands(text, "assert"), cs.clauses.size()) << cp.entry.name;
                EXPECT_EQ(count_commands(text, "declare-fun"), cs.predicates.size()) << cp.entry.name;
                EXPECT_EQ(count_commands(text, "check-sat"), 1u);
            }
        }
    }
}

TEST(Chc, AssumePredicateGivesNonlinearClause) {
    auto cs = to_chc(encoded("single_write_read", EncodingBase::R));
    bool two = false;
    for (const auto& c : cs.clauses)
        if (c.atoms.size() == 2) two = true;
    EXPECT_TRUE(two);
}

TEST(Chc, GoldenMotivatingExample) {
    auto text = emit_smtlib(to_chc(encoded("list_build_traverse", EncodingBase::RWfun)));
    auto golden = testing_support::golden_dir() / "list_build_traverse.rwfun.smt2";
    ASSERT_TRUE(fs::exists(golden));
    EXPECT_EQ(text, read_text(golden));
}

TEST(Solve, MapsSolverOutput) {
    auto f = temp_file("x.smt2", "(check-sat)\n");
    EXPECT_EQ(solve(f, script("sat.sh", "echo sat").string() + " {file}", 10).answer, SolverAnswer::Sat);
    EXPECT_EQ(solve(f, script("unsat.sh", "echo unsat").string(), 10).answer, SolverAnswer::Unsat);
    EXPECT_EQ(solve(f, script("unk.sh", "echo unknown").string(), 10).answer, SolverAnswer::Unknown);
    auto junk = solve(f, script("junk.sh", "echo 'syntax error'").string(), 10);
    EXPECT_EQ(junk.answer, SolverAnswer::ToolError);
    EXPECT_EQ(junk.detail, "syntax error");
    auto slow = solve(f, script("slow.sh", "sleep 5; echo sat").string(), 0.3);
    EXPECT_EQ(slow.answer, SolverAnswer::ToolError);
    EXPECT_EQ(slow.detail, "timeout");
    EXPECT_EQ(solve(f, "/nonexistent/solver {file}", 10).answer, SolverAnswer::ToolError);
    EXPECT_EQ(solve(f, script("silent.sh", "exit 0").string(), 10).answer, SolverAnswer::ToolError);
    EXPECT_FALSE(solver_available("/nonexistent/solver {file}"));
}

class WithSolver : public testing::Test {
protected:
    void SetUp() override {
        cmd_ = default_solver_command();
        if (!solver_available(cmd_)) GTEST_SKIP() << "no Horn solver found for '" << cmd_ << "'";
    }
    SolverAnswer run(const ClauseSet& cs, double timeout = 30) {
        auto f = temp_file("q.smt2", emit_smtlib(cs));
        return solve(f, cmd_, timeout).answer;
    }
    std::string cmd_;
};

TEST_F(WithSolver, TrivialVerdicts) {
    EXPECT_EQ(run(to_chc(parse("prog { var in: Int; assert(1); }"))), SolverAnswer::Sat);
    EXPECT_EQ(run(to_chc(parse("prog { var in: Int; assert(0); }"))), SolverAnswer::Unsat);
    EXPECT_EQ(run(to_chc(parse("prog { var in: Int; var x: Int; x := 7 / (in - in); }"))), SolverAnswer::Unsat);
    EXPECT_EQ(run(to_chc(parse("prog { var in: Int; var x: Int; x := in * in; assert(x >= 0); }"))),
              SolverAnswer::Sat);
    EXPECT_EQ(run(to_chc(parse("prog { var in: Int; var x: Int; x := -7 / 2; assert(x = -3); }"))),
              SolverAnswer::Sat);
}

// Definite solver answers never contradict the bounded oracle.
TEST_F(WithSolver, VerdictCoherenceOnCorpus) {
    std::size_t definite = 0;
    for (const auto& cp : testing_support::corpus()) {
        if (!cp.entry.memory_safe) continue;
        for (bool flat : {false, true}) {
            ChcOptions o;
            o.flatten_objects = flat;
            auto a = run(to_chc(encoded(cp.entry.name, EncodingBase::RWfun), o), 5);
            if (a == SolverAnswer::Sat) {
                EXPECT_FALSE(cp.entry.expected_unsafe) << cp.entry.name;
            }
            if (a == SolverAnswer::Unsat) {
                EXPECT_TRUE(cp.entry.expected_unsafe) << cp.entry.name;
            }
            if (a == SolverAnswer::Sat || a == SolverAnswer::Unsat) ++definite;
        }
    }
    EXPECT_GT(definite, 0u);
}
