#include <gtest/gtest.h>

#include <fstream>

#include "heapinv/syntax.hpp"
#include "heapinv/typecheck.hpp"
#include "support.hpp"

using namespace heapinv;
using namespace heapinv::ast;
using testing_support::parse;

namespace {

std::string first_diagnostic(const std::string& text) {
    try {
        load_program(text);
    } catch (const DiagnosticError& e) {
        return e.render("t.up");
    }
    return {};
}

std::string read_text(const std::filesystem::path& f) {
    std::ifstream in(f);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const char* kHeader = "prog {\n  adt Node { Node(data: Int, next: Addr) }\n  var x: Int;\n  var p: Addr;\n  var o: Node;\n";

}  // namespace

TEST(Syntax, RandomProgramsRoundTrip) {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 1000; ++i) {
        testing_support::GenOptions opts;
        opts.preds = i % 3 == 0;
        Program p = testing_support::random_program(rng, opts);
        std::string text = pretty_print(p);
        Program q = parse_program(text);
        ASSERT_EQ(p, q) << text;
        ASSERT_EQ(text, pretty_print(q));
    }
}

TEST(Syntax, CorpusRoundTrip) {
    for (const auto& c : testing_support::corpus()) {
        Program q = parse_program(pretty_print(c.program));
        EXPECT_EQ(c.program, q) << c.entry.name;
    }
}

TEST(Syntax, GoldenPrettyPrint) {
    const auto& c = testing_support::corpus_program("list_build_traverse");
    EXPECT_EQ(pretty_print(c.program), read_text(testing_support::golden_dir() / "list_build_traverse.pretty.up"));
}

TEST(Syntax, MinimalProgram) {
    Program p = parse("prog { var x: Int; x := 0; }");
    ASSERT_EQ(p.body.size(), 1u);
    EXPECT_TRUE(std::holds_alternative<Assign>(p.body[0].node));
    EXPECT_NE(p.find_var("in"), nullptr);
    EXPECT_NE(p.find_var("seed"), nullptr);
}

TEST(Syntax, LocationsArePreorder) {
    Program p = parse(std::string(kHeader) +
                      "  x := 1;\n  if (x) { x := 2; } else { while (x < 3) { x := x + 1; } }\n  skip;\n}\n");
    std::vector<unsigned> locs;
    for_each_stmt(p.body, [&](const Stmt& s) { locs.push_back(s.loc); });
    EXPECT_EQ(locs, (std::vector<unsigned>{1, 2, 3, 4, 5, 6}));
}

TEST(Syntax, Precedence) {
    Program p = parse(std::string(kHeader) + "  x := 1 + 2 * 3 - -4 / 2;\n}\n");
    auto& a = std::get<Assign>(p.body[0].node);
    EXPECT_EQ(print_expr(a.value), "1 + 2 * 3 - -4 / 2");
    auto* b = std::get_if<Binary>(&a.value->node);
    ASSERT_NE(b, nullptr);
    EXPECT_EQ(b->op, BinOp::Sub);
    Program q = parse(std::string(kHeader) + "  x := (1 || 0) && 0;\n}\n");
    EXPECT_EQ(print_expr(std::get<Assign>(q.body[0].node).value), "(1 || 0) && 0");
}

TEST(Syntax, ParseErrorsCarryPositions) {
    std::string d = first_diagnostic("prog {\n  var x: Int;\n  x := ;\n}\n");
    EXPECT_EQ(d.rfind("t.up:3:", 0), 0u) << d;
    d = first_diagnostic("prog {\n  var x: Int\n}\n");
    EXPECT_EQ(d.rfind("t.up:3:", 0), 0u) << d;
}

struct Rejection {
    std::string body;
    std::string message;
};

class TypeRejections : public ::testing::TestWithParam<Rejection> {};

TEST_P(TypeRejections, Rejected) {
    std::string d = first_diagnostic(std::string(kHeader) + GetParam().body + "}\n");
    EXPECT_NE(d.find(GetParam().message), std::string::npos) << d;
}

INSTANTIATE_TEST_SUITE_P(
    Mutations, TypeRejections,
    ::testing::Values(Rejection{"  x := p + 1;\n", "arithmetic on Addr"},
                      Rejection{"  x := o;\n", "type mismatch"},
                      Rejection{"  p := 1;\n", "type mismatch"},
                      Rejection{"  x := z;\n", "unknown identifier"},
                      Rejection{"  o := Node(1);\n", "arity mismatch"},
                      Rejection{"  o := Node(p, 1);\n", "type mismatch"},
                      Rejection{"  x := data(x);\n", "type mismatch"},
                      Rejection{"  o := read(x);\n", "type mismatch"},
                      Rejection{"  write(p, 3);\n", "type mismatch"},
                      Rejection{"  x := alloc(o);\n", "type mismatch"},
                      Rejection{"  if (p) { skip; }\n", "type mismatch"},
                      Rejection{"  assert(o);\n", "type mismatch"},
                      Rejection{"  var x: Int;\n", "duplicate declaration"}));

TEST(Typecheck, DeclarationErrors) {
    EXPECT_NE(first_diagnostic("prog {\n  adt T { T(a: Int, b: T) }\n  var x: Int;\n}\n").find("recursive ADT"),
              std::string::npos);
    // ADTs are declared before use, so mutual recursion cannot be written
    EXPECT_NE(first_diagnostic("prog {\n  adt A { A(a: B) }\n  adt B { B(b: A) }\n}\n").find("unknown type 'B'"),
              std::string::npos);
    EXPECT_NE(first_diagnostic("prog {\n  pred F(Int);\n  var x: Int;\n}\n").find("reserved"), std::string::npos);
    EXPECT_NE(first_diagnostic("prog {\n  pred R(Int);\n  var x: Int;\n  assert(R(x, x));\n}\n").find("arity mismatch"),
              std::string::npos);
    EXPECT_NE(first_diagnostic("prog {\n  var p: Addr;\n  write(p, 0);\n}\n").find("heap type"), std::string::npos);
}

TEST(Typecheck, RandomProgramsAreWellTyped) {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 200; ++i) {
        auto p = testing_support::random_program(rng);
        EXPECT_TRUE(typecheck(p).ok());
    }
}

TEST(Syntax, FormulaFile) {
    Program p = parse("prog {\n  adt Node { Node(data: Int, next: Int) }\n  pred R(Int, Int, Node);\n  var x: Int;\n}\n");
    auto defs = parse_formula_file("R(a, b, n) := a < b && data(n) = 2; // note\n", p);
    ASSERT_EQ(defs.size(), 1u);
    EXPECT_EQ(defs[0].pred, "R");
    EXPECT_EQ(defs[0].params, (std::vector<std::string>{"a", "b", "n"}));
    EXPECT_THROW(parse_formula_file("R(a, b, n) := x < 1;", p), DiagnosticError);
    EXPECT_THROW(parse_formula_file("Q(a) := 1;", p), DiagnosticError);
}
