#include <gtest/gtest.h>

#include <set>

#include "heapinv/heap.hpp"
#include "heapinv/interp.hpp"
#include "heapinv/syntax.hpp"
#include "heapinv/typecheck.hpp"
#include "support.hpp"

using namespace heapinv;
using namespace heapinv::ast;
using testing_support::parse;

namespace {

// two constructors with one-bit fields
const Program& bit_adt() {
    static const Program p = parse("prog {\n  adt B { Zero(b: Int) | One(c: Int) }\n  var x: Int;\n}\n");
    return p;
}

std::vector<Value> all_objects() {
    std::vector<Value> v;
    for (std::uint32_t c = 0; c < 2; ++c)
        for (int f = 0; f < 2; ++f) v.emplace_back(Object(0, c, std::vector<Value>{Value(Integer(f))}));
    return v;
}

void all_heaps(std::size_t len, std::vector<Value>& cur, const std::vector<Value>& objs,
               std::vector<std::vector<Value>>& out) {
    out.push_back(cur);
    if (cur.size() == len) return;
    for (const auto& o : objs) {
        cur.push_back(o);
        all_heaps(len, cur, objs, out);
        cur.pop_back();
    }
}

ExecResult run(const Program& p, std::int64_t in = 0, std::int64_t seed = 0, Fuel fuel = {},
               const PredicateOracle& I = EmptyOracle()) {
    Evaluator ev(p);
    RunOptions o;
    o.fuel = fuel;
    return ev.run(ev.initial_stack(Integer(in), Integer(seed), Integer(0), fuel.heap_ops), I, o);
}

Value var_value(const Program& p, const ExecResult& r, const std::string& name) {
    for (std::size_t i = 0; i < p.vars.size(); ++i)
        if (p.vars[i].name == name) return r.stack[i];
    throw std::runtime_error("no var " + name);
}

}  // namespace

// Exhaustive read/write/allocate laws on heaps of length <= 4, against a plain vector model.
TEST(HeapTheory, LawsExhaustive) {
    const Value def = def_obj(bit_adt());
    auto objs = all_objects();
    std::vector<std::vector<Value>> heaps;
    std::vector<Value> cur;
    all_heaps(4, cur, objs, heaps);
    ASSERT_EQ(heaps.size(), 1u + 4 + 16 + 64 + 256);

    auto model_read = [&](const std::vector<Value>& m, std::uint64_t a) -> Value {
        return a >= 1 && a <= m.size() ? m[a - 1] : def;
    };
    std::size_t checks = 0;
    for (const auto& m : heaps) {
        Heap h(def);
        TraceHeap t(def);
        for (const auto& o : m) {
            h.allocate(o);
            t.allocate(o);
        }
        for (std::uint64_t a = 0; a <= 6; ++a) {
            ASSERT_EQ(h.read(Address{a}), model_read(m, a));
            ASSERT_EQ(t.read(Address{a}), model_read(m, a));
            for (const auto& o : objs) {
                Heap h2 = h;
                TraceHeap t2 = t;
                h2.write(Address{a}, o);
                t2.write(Address{a}, o);
                bool valid = a >= 1 && a <= m.size();
                // invalid write is a no-op
                if (!valid) {
                    ASSERT_EQ(h2.objects(), h.objects());
                }
                for (std::uint64_t b = 0; b <= 6; ++b) {
                    Value expect = (b == a && valid) ? o : model_read(m, b);
                    ASSERT_EQ(h2.read(Address{b}), expect);
                    ASSERT_EQ(t2.read(Address{b}), expect);
                    ++checks;
                }
            }
        }
        for (const auto& o : objs) {
            auto [h2, a] = heap_allocate(h, o);
            ASSERT_EQ(a.value, m.size() + 1);
            ASSERT_EQ(heap_read(h2, a), o);
            ASSERT_EQ(h2.size(), m.size() + 1);
            for (std::uint64_t b = 1; b <= m.size(); ++b) ASSERT_EQ(h2.read(Address{b}), m[b - 1]);
        }
    }
    EXPECT_GT(checks, 60000u);
}

TEST(Interp, LanguageLevelHeapOps) {
    Program p = parse(R"(prog {
  adt Node { Node(data: Int, next: Addr) }
  var a: Int; var b: Int; var c: Int;
  var p: Addr; var q: Addr;
  var o: Node;
  o := read(p);
  a := data(o);
  p := alloc(Node(5, null));
  q := alloc(Node(6, p));
  write(q, Node(7, q));
  o := read(q);
  b := data(o);
  p := null;
  write(p, Node(9, null));
  o := read(p);
  c := data(o);
})");
    auto r = run(p);
    EXPECT_TRUE(r.outcome.is_top());
    EXPECT_EQ(var_value(p, r, "a"), Value(Integer(0)));
    EXPECT_EQ(var_value(p, r, "b"), Value(Integer(7)));
    EXPECT_EQ(var_value(p, r, "c"), Value(Integer(0)));
    EXPECT_EQ(r.heap_len, 2u);
}

TEST(Interp, OutcomeRows) {
    EXPECT_EQ(run(parse("prog { var x: Int; assert(0); }")).outcome, Outcome::fail());
    EXPECT_EQ(run(parse("prog { var x: Int; assume(0); }")).outcome,
              Outcome::undefined(UndefinedReason::AssumeFailed));
    Program pp = parse("prog { pred P(Int); var x: Int; assert(P(1)); }");
    Interpretation I;
    I.insert("P", {Value(Integer(1))});
    EXPECT_TRUE(run(pp, 0, 0, {}, BoundInterpretation(pp, I)).outcome.is_top());
    EXPECT_EQ(run(pp).outcome, Outcome::bot("P", {Value(Integer(1))}));
    Program assume_p = parse("prog { pred P(Int); var x: Int; assume(P(2)); assert(0); }");
    EXPECT_EQ(run(assume_p).outcome, Outcome::undefined(UndefinedReason::AssumeFailed));
    EXPECT_EQ(run(parse("prog { var x: Int; x := 1 / (x - x); }")).outcome, Outcome::fail());
    EXPECT_EQ(run(parse("prog { var x: Int; while (1) { x := x + 1; } }")).outcome,
              Outcome::undefined(UndefinedReason::FuelExhausted));
    Program heap = parse("prog { adt C { C(v: Int) } var p: Addr; p := alloc(defObj); }");
    EXPECT_EQ(run(heap, 0, 0, Fuel{64, 0}).outcome, Outcome::undefined(UndefinedReason::FuelExhausted));
    EXPECT_TRUE(run(heap, 0, 0, Fuel{64, 1}).outcome.is_top());
}

TEST(Interp, ArithmeticAndLogic) {
    Program p = parse(R"(prog {
  adt T { A(f: Int) | B(g: Int) }
  var a: Int; var b: Int; var c: Int; var d: Int; var e: Int; var sel: Int; var big: Int;
  var t: T;
  a := -7 / 2;
  b := -7 % 2;
  c := 7 % -2;
  d := 3 && 5;
  e := !4 || 0;
  t := B(3);
  sel := f(t);
  big := 1000000000000 * 1000000000000;
})");
    auto r = run(p);
    ASSERT_TRUE(r.outcome.is_top());
    EXPECT_EQ(var_value(p, r, "a"), Value(Integer(-3)));
    EXPECT_EQ(var_value(p, r, "b"), Value(Integer(-1)));
    EXPECT_EQ(var_value(p, r, "c"), Value(Integer(1)));
    EXPECT_EQ(var_value(p, r, "d"), Value(Integer(1)));
    EXPECT_EQ(var_value(p, r, "e"), Value(Integer(0)));
    EXPECT_EQ(var_value(p, r, "sel"), Value(Integer(0)));
    EXPECT_EQ(to_string(p, var_value(p, r, "big")), "1000000000000000000000000");
}

TEST(Havoc, SeedTableMatchesReference) {
    Program p = parse("prog { var seed: Int; var x: Int; havoc(x); }");
    Program macro = expand_havoc(p, true);
    ASSERT_FALSE(has_heap_ops(macro.body));
    ASSERT_NE(macro, p);
    EXPECT_EQ(run(p, 0, 0).stack, run(p, 0, 0).stack);
    for (std::uint64_t s = 0; s < 4096; ++s) {
        auto ref = testing_support::havoc_reference(s);
        auto r = run(p, 0, static_cast<std::int64_t>(s));
        ASSERT_EQ(var_value(p, r, "x"), Value(ref.value)) << s;
        ASSERT_EQ(var_value(p, r, "seed"), Value(ref.rest)) << s;
        // the literal macro computes the same values
        auto m = run(macro, 0, static_cast<std::int64_t>(s), Fuel{1000, 32});
        ASSERT_EQ(var_value(macro, m, "x"), Value(ref.value)) << s;
        ASSERT_EQ(var_value(macro, m, "seed"), Value(ref.rest)) << s;
    }
    auto zero = run(p, 0, 0);
    EXPECT_EQ(var_value(p, zero, "x"), Value(Integer(0)));
    EXPECT_EQ(var_value(p, zero, "seed"), Value(Integer(0)));
}

TEST(Havoc, HandDecodedSeeds) {
    // seed -> (x, remaining seed), decoded by hand from the bit layout
    struct Row {
        std::int64_t seed, x, rest;
    };
    const Row rows[] = {{0, 0, 0}, {1, -1, 0}, {3, -2, 0}, {6, 1, 0}, {7, -1, 0}, {14, 2, 0}, {16, 0, 4}};
    Program p = parse("prog { var seed: Int; var x: Int; havoc(x); }");
    for (const auto& r : rows) {
        auto res = run(p, 0, r.seed);
        EXPECT_EQ(var_value(p, res, "x"), Value(Integer(r.x))) << r.seed;
        EXPECT_EQ(var_value(p, res, "seed"), Value(Integer(r.rest))) << r.seed;
    }
}

TEST(Havoc, RepeatedCallsUseDisjointBits) {
    Program p = parse("prog { var seed: Int; var x: Int; var y: Int; havoc(x); havoc(y); }");
    std::set<std::pair<std::int64_t, std::int64_t>> seen;
    for (std::int64_t s = 0; s < (1 << 16); ++s) {
        auto r = run(p, 0, s);
        auto x = var_value(p, r, "x").as_int().to_int64();
        auto y = var_value(p, r, "y").as_int().to_int64();
        if (x && y && *x >= -3 && *x <= 3 && *y >= -3 && *y <= 3) seen.insert({*x, *y});
    }
    for (int a = -3; a <= 3; ++a)
        for (int b = -3; b <= 3; ++b) EXPECT_TRUE(seen.count({a, b})) << a << "," << b;
}

TEST(Havoc, ObjectTargets) {
    Program p = parse("prog { adt T { A(f: Int) | B(g: Int, h: Int) } var seed: Int; var t: T; havoc(t); }");
    std::set<Value> seen;
    std::set<std::uint32_t> ctors;
    for (int s = 0; s < 1024; ++s) {
        Value v = var_value(p, run(p, 0, s), "t");
        ctors.insert(v.as_obj().ctor());
        seen.insert(v);
    }
    EXPECT_EQ(ctors.size(), 2u);
    EXPECT_GT(seen.size(), 20u);
    Program macro = expand_havoc(p, true);
    for (int s = 0; s < 1024; ++s) {
        auto a = run(p, 0, s), b = run(macro, 0, s, Fuel{1000, 32});
        ASSERT_EQ(var_value(p, a, "t"), var_value(macro, b, "t")) << s;
        ASSERT_EQ(var_value(p, a, "seed"), var_value(macro, b, "seed")) << s;
    }
}

TEST(Interp, TraceModeAgreesWithHeapModeOnRandomPrograms) {
    std::mt19937_64 rng(3);
    auto D = testing_support::small_domain();
    for (int i = 0; i < 150; ++i) {
        Program p = testing_support::random_program(rng);
        Evaluator ev(p);
        EmptyOracle none;
        RunOptions heap_opts = D.run_options(), trace_opts = D.run_options();
        trace_opts.trace_heap = true;
        for (auto in = D.in.lo; in <= D.in.hi; ++in)
            for (auto s = D.seed.lo; s <= D.seed.hi; ++s) {
                auto st = ev.initial_stack(Integer(in), Integer(s), Integer(0), D.heap_op_fuel);
                auto a = ev.run(st, none, heap_opts);
                auto b = ev.run(st, none, trace_opts);
                ASSERT_EQ(a.outcome, b.outcome) << pretty_print(p);
                ASSERT_EQ(a.stack, b.stack) << pretty_print(p);
                ASSERT_EQ(a.heap_len, b.heap_len);
            }
    }
}

TEST(Interp, FuelMonotonicity) {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 200; ++i) {
        Program p = testing_support::random_program(rng);
        Evaluator ev(p);
        EmptyOracle none;
        for (std::int64_t in = -2; in <= 2; ++in) {
            for (std::uint64_t f : {1u, 3u, 8u}) {
                RunOptions small, big;
                small.fuel = {f, f};
                big.fuel = {f + 7, f + 5};
                auto a = ev.run(ev.initial_stack(Integer(in), Integer(i), Integer(0), f), none, small);
                if (a.outcome.is_undefined()) continue;
                auto b = ev.run(ev.initial_stack(Integer(in), Integer(i), Integer(0), f), none, big);
                ASSERT_EQ(a.outcome, b.outcome) << pretty_print(p);
                ASSERT_EQ(a.stack, b.stack);
                ASSERT_EQ(a.heap, b.heap);
            }
        }
    }
}

TEST(Interp, Deterministic) {
    std::mt19937_64 rng(9);
    for (int i = 0; i < 50; ++i) {
        Program p = testing_support::random_program(rng);
        auto a = run(p, 1, 77), b = run(p, 1, 77);
        EXPECT_EQ(a.outcome, b.outcome);
        EXPECT_EQ(a.stack, b.stack);
    }
}
