#include "support.hpp"

#include "heapinv/typecheck.hpp"

namespace testing_support {

using namespace heapinv;
using namespace heapinv::ast;

namespace {

class Gen {
public:
    Gen(std::mt19937_64& rng, const GenOptions& o) : rng_(rng), o_(o) {}

    Program program() {
        Program p;
        p.adts.push_back(AdtDecl{"Node",
                                 {Constructor{"Node", {{"data", TypeTag::integer()}, {"next", TypeTag::address()}}},
                                  Constructor{"Leaf", {{"v", TypeTag::integer()}}}},
                                 {}});
        p.heap_type = "Node";
        if (o_.preds) p.preds.push_back(PredDecl{"P", {TypeTag::integer(), TypeTag::integer()}, {}});
        for (auto n : {"in", "seed", "x", "y"}) p.vars.push_back(VarDecl{n, TypeTag::integer(), {}});
        for (auto n : {"p", "q"}) p.vars.push_back(VarDecl{n, TypeTag::address(), {}});
        p.vars.push_back(VarDecl{"o", TypeTag::object("Node"), {}});
        p.body = block(o_.max_depth, o_.max_stmts);
        return assign_locations(p);
    }

private:
    std::mt19937_64& rng_;
    GenOptions o_;

    int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }
    bool coin(int percent) { return pick(100) < percent; }

    ExprPtr int_expr(int d) {
        int k = d <= 0 ? pick(3) : pick(12);
        switch (k) {
        case 0: return lit(pick(7) - 3);
        case 1: return var(std::vector<std::string>{"x", "y", "in"}[pick(3)]);
        case 2: return var(pick(2) ? "x" : "y");
        case 3: return binary(std::vector<BinOp>{BinOp::Add, BinOp::Sub, BinOp::Mul}[pick(3)], int_expr(d - 1),
                              int_expr(d - 1));
        case 4: return binary(pick(2) ? BinOp::Div : BinOp::Mod, int_expr(d - 1), int_expr(d - 1));
        case 5: return binary(std::vector<BinOp>{BinOp::Lt, BinOp::Le, BinOp::Gt, BinOp::Ge}[pick(4)],
                              int_expr(d - 1), int_expr(d - 1));
        case 6: return binary(pick(2) ? BinOp::Eq : BinOp::Ne, int_expr(d - 1), int_expr(d - 1));
        case 7: return binary(pick(2) ? BinOp::And : BinOp::Or, int_expr(d - 1), int_expr(d - 1));
        case 8: return unary(pick(2) ? UnOp::Neg : UnOp::Not, int_expr(d - 1));
        case 9: return select(pick(2) ? "data" : "v", obj_expr(d - 1));
        case 10: return is_ctor(pick(2) ? "Node" : "Leaf", obj_expr(d - 1));
        default: return binary(pick(2) ? BinOp::Eq : BinOp::Ne, addr_expr(d - 1), addr_expr(d - 1));
        }
    }

    ExprPtr addr_expr(int d) {
        int k = d <= 0 ? pick(3) : pick(4);
        switch (k) {
        case 0: return var("p");
        case 1: return var("q");
        case 2: return null_lit();
        default: return select("next", obj_expr(d - 1));
        }
    }

    ExprPtr obj_expr(int d) {
        int k = d <= 0 ? pick(2) : pick(4);
        switch (k) {
        case 0: return var("o");
        case 1: return def_obj();
        case 2: return ctor_app("Node", {int_expr(d - 1), addr_expr(d - 1)});
        default: return ctor_app("Leaf", {int_expr(d - 1)});
        }
    }

    Block block(int depth, int n) {
        Block b;
        int count = 1 + pick(n);
        for (int i = 0; i < count; ++i) b.push_back(stmt(depth));
        return b;
    }

    Stmt stmt(int depth) {
        for (;;) {
            int k = pick(14);
            switch (k) {
            case 0:
            case 1: return Assign{pick(2) ? "x" : "y", int_expr(2)};
            case 2: return Assign{pick(2) ? "p" : "q", addr_expr(1)};
            case 3: return Assign{"o", obj_expr(2)};
            case 4:
                if (!o_.heap) continue;
                return Alloc{pick(2) ? "p" : "q", obj_expr(1)};
            case 5:
                if (!o_.heap) continue;
                return Read{"o", pick(2) ? "p" : "q"};
            case 6:
                if (!o_.heap) continue;
                return Write{pick(2) ? "p" : "q", obj_expr(1)};
            case 7:
                if (depth <= 0) continue;
                return If{int_expr(2), block(depth - 1, 3), coin(50) ? block(depth - 1, 3) : Block{}};
            case 8: {
                if (depth <= 0) continue;
                // counted loop: x runs up to a small bound
                std::string c = pick(2) ? "x" : "y";
                Block body = block(depth - 1, 3);
                body.push_back(Assign{c, binary(BinOp::Add, var(c), lit(1))});
                return While{binary(BinOp::Lt, var(c), lit(pick(4))), std::move(body)};
            }
            case 9:
                if (depth <= 0 || !coin(30)) continue;
                return While{int_expr(1), block(depth - 1, 2)};
            case 10:
                if (!o_.asserts || !coin(40)) continue;
                return Assert{int_expr(2)};
            case 11:
                if (!coin(40)) continue;
                return Assume{int_expr(1)};
            case 12:
                if (!o_.havoc) continue;
                return Havoc{pick(3) == 0 ? "o" : (pick(2) ? "x" : "y"), false};
            default:
                if (!o_.preds) continue;
                if (coin(50))
                    return AssertPred{PredApp{"P", {int_expr(1), int_expr(1)}}};
                return AssumePred{PredApp{"P", {var(pick(2) ? "x" : "in"), int_expr(1)}}};
            }
        }
    }
};

}  // namespace

Program random_program(std::mt19937_64& rng, const GenOptions& opts) {
    Program p = Gen(rng, opts).program();
    require_well_typed(p);
    return p;
}

std::filesystem::path corpus_dir() { return HEAPINV_CORPUS_DIR; }
std::filesystem::path golden_dir() { return HEAPINV_GOLDEN_DIR; }

const std::vector<CorpusProgram>& corpus() {
    static const std::vector<CorpusProgram> all = [] {
        std::vector<CorpusProgram> v;
        for (auto& e : load_manifest(corpus_dir())) {
            auto prog = load_program_file(e.file);
            v.push_back({std::move(e), std::move(prog)});
        }
        return v;
    }();
    return all;
}

const CorpusProgram& corpus_program(const std::string& name) {
    for (const auto& c : corpus())
        if (c.entry.name == name) return c;
    throw std::runtime_error("no corpus entry " + name);
}

InputDomain small_domain() {
    InputDomain D;
    D.in = {-2, 2};
    D.seed = {0, 15};
    D.last_addr = {0, 3};
    D.loop_fuel = 16;
    D.heap_op_fuel = 12;
    return D;
}

Program parse(const std::string& text) { return load_program(text); }

HavocRef havoc_reference(std::uint64_t seed) {
    // bit 0: sign; then pairs (continue, payload); a 0 continue bit is consumed as the end mark
    std::uint64_t bits = seed;
    auto next = [&] {
        std::uint64_t b = bits & 1u;
        bits >>= 1;
        return b;
    };
    std::int64_t x = next() ? -1 : 0;
    while (bits & 1u) {
        next();
        x = 2 * x + static_cast<std::int64_t>(next());
    }
    next();
    return {Integer(x), Integer(static_cast<std::int64_t>(bits))};
}

}  // namespace testing_support
