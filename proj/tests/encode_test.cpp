#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "heapinv/encode.hpp"
#include "heapinv/fixpoint.hpp"
#include "heapinv/pipeline.hpp"
#include "heapinv/syntax.hpp"
#include "heapinv/typecheck.hpp"
#include "support.hpp"

using namespace heapinv;
using namespace heapinv::ast;
using testing_support::parse;

namespace {

const char* kCell = R"(prog {
  adt C { C(v: Int) }
  var in: Int;
  var p: Addr;
  var o: C;
  p := alloc(C(5));
  write(p, C(6));
  o := read(p);
  assert(v(o) = 6);
})";

std::string body_of(const Program& p) { return print_block(p.body); }

bool contains(const std::string& hay, const std::string& needle) { return hay.find(needle) != std::string::npos; }

std::vector<EncodingConfig> all_configs() {
    std::vector<EncodingConfig> v;
    for (auto b : {EncodingBase::R, EncodingBase::RW, EncodingBase::RWfun, EncodingBase::RWmem})
        for (int flags = 0; flags < 4; ++flags) {
            EncodingConfig c;
            c.base = b;
            c.tagging = flags & 1;
            c.caching = flags & 2;
            v.push_back(c);
        }
    return v;
}

void expect_structural(const Program& q) {
    EXPECT_NO_THROW(require_well_typed(q));
    EXPECT_FALSE(has_heap_ops(q.body));
    for (const auto& v : q.vars) EXPECT_FALSE(v.type.is_addr()) << v.name;
    EXPECT_EQ(parse_program(pretty_print(q)), q);
}

testing_support::GenOptions encodable() {
    testing_support::GenOptions o;
    o.havoc = false;
    return o;
}

}  // namespace

TEST(Encode, StructuralOnRandomPrograms) {
    std::mt19937_64 rng(21);
    for (int i = 0; i < 60; ++i) {
        Program p = testing_support::random_program(rng, encodable());
        Program pn = enc_n(p);
        expect_structural(encode(pn, EncodingConfig{}).program);
        for (const auto& cfg : all_configs()) {
            auto e = encode(pn, cfg);
            expect_structural(e.program);
        }
    }
}

TEST(Encode, StructuralOnCorpus) {
    for (const auto& cp : testing_support::corpus()) {
        Program pn = enc_n(cp.program);
        for (const auto& cfg : all_configs()) expect_structural(encode(pn, cfg).program);
    }
}

TEST(Encode, FreshSessionsGiveIdenticalResults) {
    for (const auto& cp : testing_support::corpus())
        for (const auto& cfg : all_configs()) {
            auto a = encode(enc_n(cp.program), cfg);
            auto b = encode(enc_n(cp.program), cfg);
            ASSERT_EQ(a.program, b.program) << cp.entry.name;
        }
}

TEST(Encode, IntroducedNamesAreReserved) {
    auto e = encode(enc_n(parse(kCell)), EncodingConfig{});
    for (const auto& n : {e.names.cnt_alloc, e.names.cnt, e.names.last, e.names.last_addr}) {
        ASSERT_FALSE(n.empty());
        EXPECT_EQ(n[0], '$') << n;
    }
    // user names that look like the auxiliaries are left alone
    Program p = parse(R"(prog {
  adt C { C(v: Int) }
  var in: Int; var cnt: Int; var last: C; var cnt_alloc: Int;
  var p: Addr;
  p := alloc(C(1));
  last := read(p);
  cnt := cnt_alloc;
  assert(v(last) = 1);
})");
    auto q = enc_r(enc_n(p)).program;
    EXPECT_NE(q.find_var("cnt"), nullptr);
    EXPECT_NE(q.find_var("$cnt"), nullptr);
    EXPECT_TRUE(contains(body_of(q), "  last := $last;\n"));
}

TEST(Encode, RejectsUnencodablePrograms) {
    EXPECT_THROW(enc_r(parse("prog { adt C { C(v: Int) } pred R(Int); var in: Int; var p: Addr; p := alloc(C(1)); }")),
                 EncodingError);
    EXPECT_THROW(enc_r(parse("prog { adt C { C(v: Int) } var in: Int; var seed: Int; var x: Int; havoc(x); }")),
                 EncodingError);
    EXPECT_THROW(enc_r(parse("prog { var in: Int; in := 1; }")), EncodingError);
}

TEST(EncodeN, PrefixesHeapStatements) {
    Program pn = enc_n(parse(kCell));
    ASSERT_TRUE(pn.fuel_var.has_value());
    std::string c = *pn.fuel_var;
    std::string guard = c + " := " + c + " - 1;\nassume(" + c + " >= 0);\n";
    EXPECT_EQ(body_of(pn), guard + "p := alloc(C(5));\n" + guard + "write(p, C(6));\n" + guard +
                               "o := read(p);\nassert(v(o) = 6);\n");
}

TEST(EncodeN, NoHeapOpsLeavesBody) {
    Program p = parse("prog { var in: Int; var x: Int; x := in + 1; assert(x > in); }");
    Program pn = enc_n(p);
    EXPECT_EQ(pn.body, p.body);
    EXPECT_EQ(pn.vars.size(), p.vars.size() + 1);
}

TEST(EncodeR, TableRows) {
    auto q = enc_r(enc_n(parse(kCell))).program;
    std::string b = body_of(q);
    EXPECT_TRUE(contains(b, "$cnt_alloc := 0;\n$cnt := 0;\n$last := defObj;\n"));
    EXPECT_TRUE(contains(b, "$cnt_alloc := $cnt_alloc + 1;\np := $cnt_alloc;\nif ($last_addr = p) {\n  $last := C(5);\n}\n"));
    EXPECT_TRUE(contains(b, "if ($last_addr = p && (0 < p && p <= $cnt_alloc)) {\n  $last := C(6);\n}\n"));
    EXPECT_TRUE(contains(b, "$cnt := $cnt + 1;\nif ($last_addr = p) {\n  assert(R(in, $cnt, $last));\n  o := $last;\n"
                            "} else {\n  havoc(o);\n  assume(R(in, $cnt, o));\n}\n"));
    ASSERT_NE(q.find_pred("R"), nullptr);
    EXPECT_EQ(q.find_pred("R")->params.size(), 3u);
}

TEST(EncodeRW, TableRows) {
    auto q = enc_rw(enc_n(parse(kCell))).program;
    std::string b = body_of(q);
    EXPECT_TRUE(contains(b, "$t := 0;\nassert(W(in, 0, defObj));\n"));
    EXPECT_TRUE(contains(b, "$cnt := $cnt + 1;\nif (0 < p && p <= $cnt_alloc) {\n  assert(W(in, $cnt, C(6)));\n"
                            "  if ($last_addr = p) {\n    $cnt_last := $cnt;\n  }\n}\n"));
    EXPECT_TRUE(contains(b, "havoc(o);\nassume(W(in, $t, o));\n"));
    EXPECT_EQ(q.find_pred("R")->params.size(), 3u);
    EXPECT_EQ(q.find_pred("W")->params.size(), 3u);
}

TEST(EncodeRWfun, AllocIsCounterAndAssignOnly) {
    auto q = enc_rwfun(parse(kCell)).program;
    std::string b = body_of(q);
    EXPECT_FALSE(contains(b, "W(in, 0, defObj)"));
    EXPECT_FALSE(contains(b, "C(5)"));
    EXPECT_TRUE(contains(b, "$cnt_alloc := $cnt_alloc + 1;\np := $cnt_alloc;\n$cnt := $cnt + 1;\nif (0 < p"));
    auto adjusted = body_of(enc_rwfun(enc_n(parse(kCell)), true).program);
    EXPECT_TRUE(contains(adjusted, "assert(W(in, $cnt, C(5)));"));
}

TEST(EncodeRWmem, ValidityAsserts) {
    auto q = enc_rwmem(enc_n(parse(kCell))).program;
    std::string b = body_of(q);
    EXPECT_TRUE(contains(b, "$cnt := $cnt + 1;\nassert(0 < p && p <= $cnt_alloc);\nif ($last_addr = p) {"));
    EXPECT_TRUE(contains(b, "} else {\n  assert(0);\n}\n"));
    EXPECT_TRUE(contains(b, "assert(v(o) = 6);"));
    EXPECT_FALSE(contains(body_of(enc_rwmem(enc_n(parse(kCell)), true).program), "assert(v(o) = 6);"));
}

TEST(EncodeRWmem, FlagsReadOfUnallocatedAddress) {
    Program p = parse(R"(prog {
  adt C { C(v: Int) }
  var in: Int; var p: Addr; var o: C;
  o := read(p);
})");
    InputDomain D;
    EXPECT_FALSE(check_safety(p, D).unsafe());
    EXPECT_TRUE(check_safety(enc_rwmem(enc_n(p)).program, D).unsafe());
    EXPECT_FALSE(check_safety(enc_rwfun(enc_n(p)).program, D).unsafe());
    auto mem = check_memory_safety(p, D);
    EXPECT_FALSE(mem.memory_safe);
    EXPECT_TRUE(mem.invalid_access);
}

TEST(Tagging, LocationArguments) {
    Program p = assign_locations(parse(kCell));
    auto e = apply_tagging(enc_r(enc_n(p)));
    std::string b = body_of(e.program);
    // locations of the original statements after the fuel guards: alloc 3, write 6, read 9
    EXPECT_TRUE(contains(b, "  $last := C(6);\n  $last_loc := 6;\n"));
    EXPECT_TRUE(contains(b, "assert(R(in, $cnt, $last, $last_loc, 9));"));
    EXPECT_TRUE(contains(b, "havoc($loc);\n  assume(R(in, $cnt, o, $loc, 9));"));
    EXPECT_EQ(e.program.find_pred("R")->params.size(), 5u);
    auto w = apply_tagging(enc_rw(enc_n(p)));
    EXPECT_EQ(w.program.find_pred("R")->params.size(), 5u);
    EXPECT_EQ(w.program.find_pred("W")->params.size(), 4u);
}

TEST(ScopeVars, AppendsCurrentValues) {
    const auto& cp = testing_support::corpus_program("counter_cell");
    auto e = enc_r(enc_n(cp.program));
    EXPECT_EQ(apply_scope_vars(e, {}).program, e.program);
    auto s = apply_scope_vars(e, {"i"});
    EXPECT_TRUE(contains(body_of(s.program), "assume(R(in, $cnt, t, i));"));
    EXPECT_EQ(s.program.find_pred("R")->params.size(), 4u);
    EXPECT_THROW(apply_scope_vars(e, {"nope"}), EncodingError);
    EXPECT_THROW(apply_scope_vars(e, {"t"}), EncodingError);
}

TEST(DropArgs, RemovesEverywhere) {
    auto e = enc_r(enc_n(parse(kCell)));
    EXPECT_EQ(remove_arguments(e, {}).program, e.program);
    auto d = remove_arguments(e, parse_drop_spec("R:1"));
    std::string b = body_of(d.program);
    EXPECT_TRUE(contains(b, "assert(R(in, $last));"));
    EXPECT_TRUE(contains(b, "assume(R(in, o));"));
    EXPECT_EQ(d.program.find_pred("R")->params.size(), 2u);
    EXPECT_THROW(remove_arguments(e, parse_drop_spec("R:3")), EncodingError);
    EXPECT_THROW(remove_arguments(e, parse_drop_spec("Q:0")), EncodingError);
    EXPECT_THROW(parse_drop_spec("R"), std::invalid_argument);
    EXPECT_EQ(parse_drop_spec("R:1,W:0,W:2"), (std::map<std::string, std::vector<std::size_t>>{{"R", {1}}, {"W", {0, 2}}}));
}

TEST(Caching, ReadsServedFromCache) {
    Program p = parse(R"(prog {
  adt C { C(v: Int) }
  var in: Int; var p: Addr; var o: C; var o2: C;
  p := alloc(C(1));
  o := read(p);
  o2 := read(p);
  assert(v(o2) = 1);
})");
    auto e = apply_caching(enc_r(enc_n(p)));
    std::string b = body_of(e.program);
    EXPECT_TRUE(contains(b, "$lastc_addr := 0;\n$lastc_data := defObj;\n"));
    EXPECT_TRUE(contains(b, "if ($lastc_addr = p) {\n  o2 := $lastc_data;\n} else {"));
    // with the cache, the alloc already fills it, so no R tuple is ever needed
    auto r = least_fixpoint(e.program, InputDomain{});
    EXPECT_EQ(r.interpretation.relation("R").size(), 0u);
    EXPECT_FALSE(verdict_from(r).unsafe());
    auto plain = least_fixpoint(enc_r(enc_n(p)).program, InputDomain{});
    EXPECT_GT(plain.interpretation.relation("R").size(), 0u);
}

TEST(Composition, TaggingAndCachingCommuteOnVerdicts) {
    for (const auto& cp : testing_support::corpus()) {
        if (!cp.entry.memory_safe) continue;
        auto base = enc_r(enc_n(cp.program));
        auto tc = apply_caching(apply_tagging(base));
        auto ct = apply_tagging(apply_caching(base));
        InputDomain D;
        EXPECT_EQ(check_safety(tc.program, D).unsafe(), check_safety(ct.program, D).unsafe()) << cp.entry.name;
        EXPECT_EQ(check_safety(tc.program, D).unsafe(), cp.entry.expected_unsafe) << cp.entry.name;
    }
}

class CorpusEquisafe : public testing::TestWithParam<std::string> {};

TEST_P(CorpusEquisafe, SmallConfigs) {
    const auto& cp = testing_support::corpus_program(GetParam());
    for (auto base : {EncodingBase::N, EncodingBase::R, EncodingBase::RW}) {
        EquisafeOptions o;
        o.config.base = base;
        auto out = run_equisafe(cp.program, o);
        EXPECT_EQ(out.status, EquisafeOutcome::Status::Agree) << to_string(base);
        EXPECT_EQ(out.report->original.unsafe(), cp.entry.expected_unsafe);
        if (base == EncodingBase::R) {
            ASSERT_TRUE(out.report->cosim.has_value());
            EXPECT_EQ(out.report->cosim->violations, 0u);
            EXPECT_GT(out.report->cosim->points_checked, 0u);
        }
    }
}

INSTANTIATE_TEST_SUITE_P(Corpus, CorpusEquisafe,
                         testing::Values("single_write_read", "single_write_read_bad", "aliasing_bad", "two_cells",
                                         "union_adt_bad", "counter_cell"));

TEST(Encode, RandomProgramsNoFalseAlarms) {
    // an Unsafe encoded verdict always has an Unsafe original
    std::mt19937_64 rng(23);
    InputDomain D;
    D.in = {-1, 1};
    D.seed = {0, 63};
    D.last_addr = {0, 6};
    D.heap_op_fuel = 6;
    D.loop_fuel = 16;
    int agree = 0, total = 0;
    for (int i = 0; i < 40; ++i) {
        Program p = testing_support::random_program(rng, encodable());
        bool orig;
        try {
            orig = check_safety(p, D).unsafe();
        } catch (const FixpointDivergence&) {
            continue;
        }
        auto q = enc_r(enc_n(p)).program;
        bool enc = check_safety(q, D).unsafe();
        if (enc) {
            EXPECT_TRUE(orig) << pretty_print(p);
        }
        agree += enc == orig;
        ++total;
    }
    EXPECT_GT(agree * 10, total * 8);
}

TEST(Encode, GoldenListEncoding) {
    const auto& cp = testing_support::corpus_program("list_build_traverse");
    auto q = enc_r(cp.program).program;
    std::ifstream f(testing_support::golden_dir() / "list_build_traverse.r.up");
    ASSERT_TRUE(f) << "missing golden file";
    std::stringstream ss;
    ss << f.rdbuf();
    EXPECT_EQ(pretty_print(q), ss.str());
}
