#include <sstream>

#include "heapinv/syntax.hpp"

namespace heapinv {

using namespace ast;

namespace {

int precedence(BinOp op) {
    switch (op) {
    case BinOp::Or: return 1;
    case BinOp::And: return 2;
    case BinOp::Eq:
    case BinOp::Ne: return 3;
    case BinOp::Lt:
    case BinOp::Le:
    case BinOp::Gt:
    case BinOp::Ge: return 4;
    case BinOp::Add:
    case BinOp::Sub: return 5;
    default: return 6;
    }
}

constexpr int kUnaryPrec = 7;
constexpr int kAtomPrec = 8;

void emit(std::ostream& os, const ExprPtr& e, int min_prec);

void emit_args(std::ostream& os, const std::vector<ExprPtr>& args) {
    os << '(';
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (i)
            os << ", ";
        emit(os, args[i], 0);
    }
    os << ')';
}

void emit(std::ostream& os, const ExprPtr& e, int min_prec) {
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, IntLit>) {
                os << n.value.to_string();
            } else if constexpr (std::is_same_v<T, VarRef>) {
                os << n.name;
            } else if constexpr (std::is_same_v<T, NullLit>) {
                os << "null";
            } else if constexpr (std::is_same_v<T, DefObjLit>) {
                os << "defObj";
            } else if constexpr (std::is_same_v<T, Unary>) {
                bool paren = min_prec > kUnaryPrec;
                if (paren)
                    os << '(';
                os << to_string(n.op);
                if (n.op == UnOp::Neg && std::holds_alternative<IntLit>(n.operand->node)) {
                    // "-3" would read back as a literal
                    os << '(';
                    emit(os, n.operand, 0);
                    os << ')';
                } else {
                    emit(os, n.operand, kUnaryPrec);
                }
                if (paren)
                    os << ')';
            } else if constexpr (std::is_same_v<T, Binary>) {
                int p = precedence(n.op);
                bool paren = min_prec > p;
                if (paren)
                    os << '(';
                emit(os, n.lhs, p);
                os << ' ' << to_string(n.op) << ' ';
                emit(os, n.rhs, p + 1);
                if (paren)
                    os << ')';
            } else if constexpr (std::is_same_v<T, CtorApp>) {
                os << n.ctor;
                emit_args(os, n.args);
            } else if constexpr (std::is_same_v<T, Select>) {
                os << n.selector << '(';
                emit(os, n.arg, 0);
                os << ')';
            } else if constexpr (std::is_same_v<T, IsCtor>) {
                os << "is_" << n.ctor << '(';
                emit(os, n.arg, 0);
                os << ')';
            }
        },
        e->node);
    (void)kAtomPrec;
}

void indent_to(std::ostream& os, int indent) {
    for (int i = 0; i < indent; ++i)
        os << "  ";
}

void emit_block(std::ostream& os, const Block& b, int indent);

void emit_stmt(std::ostream& os, const Stmt& s, int indent) {
    indent_to(os, indent);
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Assign>) {
                os << n.var << " := ";
                emit(os, n.value, 0);
                os << ";\n";
            } else if constexpr (std::is_same_v<T, Alloc>) {
                os << n.var << " := alloc(";
                emit(os, n.init, 0);
                os << ");\n";
            } else if constexpr (std::is_same_v<T, Read>) {
                os << n.var << " := read(" << n.addr << ");\n";
            } else if constexpr (std::is_same_v<T, Write>) {
                os << "write(" << n.addr << ", ";
                emit(os, n.value, 0);
                os << ");\n";
            } else if constexpr (std::is_same_v<T, Skip>) {
                os << "skip;\n";
            } else if constexpr (std::is_same_v<T, If>) {
                os << "if (";
                emit(os, n.cond, 0);
                os << ") {\n";
                emit_block(os, n.then_branch, indent + 1);
                indent_to(os, indent);
                if (n.else_branch.empty()) {
                    os << "}\n";
                } else {
                    os << "} else {\n";
                    emit_block(os, n.else_branch, indent + 1);
                    indent_to(os, indent);
                    os << "}\n";
                }
            } else if constexpr (std::is_same_v<T, While>) {
                os << "while (";
                emit(os, n.cond, 0);
                os << ") {\n";
                emit_block(os, n.body, indent + 1);
                indent_to(os, indent);
                os << "}\n";
            } else if constexpr (std::is_same_v<T, Assume> || std::is_same_v<T, Assert>) {
                os << (std::is_same_v<T, Assume> ? "assume(" : "assert(");
                emit(os, n.cond, 0);
                os << ");\n";
            } else if constexpr (std::is_same_v<T, AssumePred> || std::is_same_v<T, AssertPred>) {
                os << (std::is_same_v<T, AssumePred> ? "assume(" : "assert(") << n.app.pred;
                emit_args(os, n.app.args);
                os << ");\n";
            } else if constexpr (std::is_same_v<T, Havoc>) {
                if (n.native)
                    os << n.var << " := nondet();\n";
                else
                    os << "havoc(" << n.var << ");\n";
            }
        },
        s.node);
}

void emit_block(std::ostream& os, const Block& b, int indent) {
    for (const auto& s : b)
        emit_stmt(os, s, indent);
}

}  // namespace

std::string print_expr(const ExprPtr& e) {
    std::ostringstream os;
    emit(os, e, 0);
    return os.str();
}

std::string print_block(const Block& b, int indent) {
    std::ostringstream os;
    emit_block(os, b, indent);
    return os.str();
}

std::string pretty_print(const Program& p) {
    std::ostringstream os;
    os << "prog {\n";
    for (const auto& a : p.adts) {
        os << "  adt " << a.name << " { ";
        for (std::size_t c = 0; c < a.ctors.size(); ++c) {
            if (c)
                os << " | ";
            os << a.ctors[c].name << '(';
            for (std::size_t f = 0; f < a.ctors[c].fields.size(); ++f) {
                if (f)
                    os << ", ";
                os << a.ctors[c].fields[f].name << ": " << a.ctors[c].fields[f].type.to_string();
            }
            os << ')';
        }
        os << " }\n";
    }
    if (p.heap_type)
        os << "  heaptype " << *p.heap_type << ";\n";
    for (const auto& d : p.preds) {
        os << "  pred " << d.name << '(';
        for (std::size_t i = 0; i < d.params.size(); ++i) {
            if (i)
                os << ", ";
            os << d.params[i].to_string();
        }
        os << ");\n";
    }
    for (const auto& v : p.vars)
        os << "  var " << v.name << ": " << v.type.to_string() << ";\n";
    os << "  input " << p.input_var << ";\n";
    os << "  seed " << p.seed_var << ";\n";
    if (p.prophecy_var)
        os << "  prophecy " << *p.prophecy_var << ";\n";
    if (p.fuel_var)
        os << "  fuel " << *p.fuel_var << ";\n";
    if (!p.body.empty()) {
        os << '\n';
        emit_block(os, p.body, 1);
    }
    os << "}\n";
    return os.str();
}

}  // namespace heapinv
