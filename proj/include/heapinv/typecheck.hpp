#pragma once

#include <optional>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "heapinv/ast.hpp"
#include "heapinv/syntax.hpp"

namespace heapinv {

struct TypedProgram {
    ast::Program program;
    std::unordered_map<const ast::Expr*, ast::TypeTag> types;  // keyed by node identity

    const ast::TypeTag& type_of(const ast::ExprPtr& e) const { return types.at(e.get()); }
};

struct TypecheckResult {
    std::optional<TypedProgram> typed;
    std::vector<Diagnostic> diagnostics;
    bool ok() const { return diagnostics.empty(); }
};

TypecheckResult typecheck(const ast::Program& p);

// parse + typecheck; throws DiagnosticError carrying every diagnostic
ast::Program load_program(std::string_view text);
// throws DiagnosticError if p does not typecheck
void require_well_typed(const ast::Program& p);

// Type of an expression in p's scope, nullopt if ill-typed.
std::optional<ast::TypeTag> infer_type(const ast::Program& p, const ast::ExprPtr& e);

}  // namespace heapinv
