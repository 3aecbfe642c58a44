#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "heapinv/ast.hpp"

namespace heapinv {

struct Diagnostic {
    ast::SourcePos pos;
    std::string message;
};

std::string format_diagnostic(std::string_view file, const Diagnostic& d);

// Thrown by the parser (first syntax error) and by load_program (all type errors).
class DiagnosticError : public std::runtime_error {
public:
    explicit DiagnosticError(std::vector<Diagnostic> diags);
    const std::vector<Diagnostic>& diagnostics() const { return diags_; }
    std::string render(std::string_view file) const;

private:
    std::vector<Diagnostic> diags_;
};

// Parses and numbers statements; does not typecheck.
ast::Program parse_program(std::string_view text);

// Expression in the scope of a program, with extra Int/Obj-typed names bound.
ast::ExprPtr parse_expr(std::string_view text, const ast::Program& scope);

// `P(a, b, c) := expr;` definitions, one per predicate, typed against the
// predicate declarations of `scope`.
struct FormulaDef {
    std::string pred;
    std::vector<std::string> params;
    ast::ExprPtr body;
    ast::SourcePos pos;
};
std::vector<FormulaDef> parse_formula_file(std::string_view text, const ast::Program& scope);

std::string pretty_print(const ast::Program& p);
std::string print_expr(const ast::ExprPtr& e);
std::string print_block(const ast::Block& b, int indent = 0);

}  // namespace heapinv
