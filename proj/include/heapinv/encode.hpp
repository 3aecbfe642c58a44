#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "heapinv/ast.hpp"

namespace heapinv {

enum class EncodingBase { N, R, RW, RWfun, RWmem };

const char* to_string(EncodingBase b);
EncodingBase parse_encoding_base(std::string_view s);  // n, r, rw, rwfun, rwmem

struct EncodingConfig {
    EncodingBase base = EncodingBase::R;
    bool tagging = false;
    bool caching = false;
    std::vector<std::string> scope_vars;
    std::map<std::string, std::vector<std::size_t>> drop_args;
    bool native_havoc = false;
    bool fun_alloc_write = false;  // RWfun/RWmem: alloc also asserts W of the initial object
    bool strip_asserts = false;    // RWmem: drop the program's own expression asserts
};

// Auxiliary names chosen by the encoder (empty when unused).
struct IntroducedNames {
    std::string fuel, cnt_alloc, cnt, last, last_addr, cnt_last, t, last_loc, loc, lastc_addr, lastc_data, obj;
    std::string r_pred, w_pred;
};

struct EncodedProgram {
    ast::Program program;
    IntroducedNames names;
    EncodingConfig config;
    ast::Program source;  // the program that was encoded
};

class EncodingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Prefixes every heap statement with `$c := $c - 1; assume($c >= 0);`.
ast::Program enc_n(const ast::Program& p);

EncodedProgram encode(const ast::Program& p, const EncodingConfig& cfg);

EncodedProgram enc_r(const ast::Program& p);
EncodedProgram enc_rw(const ast::Program& p);
EncodedProgram enc_rwfun(const ast::Program& p, bool fun_alloc_write = false);
EncodedProgram enc_rwmem(const ast::Program& p, bool strip_asserts = false);

// Tagging and caching change the rewrite of each heap statement, so they
// re-run the rewrite on the kept source with the extended configuration.
EncodedProgram apply_tagging(const EncodedProgram& e);
EncodedProgram apply_caching(const EncodedProgram& e);
// Post-passes over predicate applications.
EncodedProgram apply_scope_vars(const EncodedProgram& e, const std::vector<std::string>& vars);
EncodedProgram remove_arguments(const EncodedProgram& e, const std::map<std::string, std::vector<std::size_t>>& drop);

// "R:1,W:2" style
std::map<std::string, std::vector<std::size_t>> parse_drop_spec(std::string_view spec);

}  // namespace heapinv
