#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "heapinv/ast.hpp"
#include "heapinv/fixpoint.hpp"
#include "heapinv/pipeline.hpp"

namespace testing_support {

struct GenOptions {
    int max_stmts = 6;
    int max_depth = 2;
    bool heap = true;
    bool havoc = true;
    bool preds = false;
    bool asserts = true;
};

// Well-typed random program over
//   adt Node { Node(data: Int, next: Addr) | Leaf(v: Int) }
// with Int vars x, y, Addr vars p, q and an Obj var o.
heapinv::ast::Program random_program(std::mt19937_64& rng, const GenOptions& opts = {});

struct CorpusProgram {
    heapinv::CorpusEntry entry;
    heapinv::ast::Program program;
};
const std::vector<CorpusProgram>& corpus();
const CorpusProgram& corpus_program(const std::string& name);

std::filesystem::path corpus_dir();
std::filesystem::path golden_dir();

// small domain for tests that loop over many programs
heapinv::InputDomain small_domain();

heapinv::ast::Program parse(const std::string& text);

// reference reading of the havoc macro: decode seed bits directly
struct HavocRef {
    heapinv::Integer value;
    heapinv::Integer rest;  // remaining seed
};
HavocRef havoc_reference(std::uint64_t seed);

}  // namespace testing_support
