#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <type_traits>
#include <variant>

#include "tapead/detail/format.hpp"
#include "tapead/error.hpp"

namespace tapead {

// Variable name -> value at the evaluation point.
using Bindings = std::map<std::string, double, std::less<>>;

namespace ast {

enum class UnaryOp { neg };
enum class BinaryOp { add, sub, mul, div, pow };
enum class Function { log, sin, cos, exp };

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Literal {
    double value = 0.0;
};
struct Variable {
    std::string name;
};
struct Unary {
    UnaryOp op = UnaryOp::neg;
    ExprPtr operand;
};
// For BinaryOp::pow the right operand is always a Literal.
struct Binary {
    BinaryOp op = BinaryOp::add;
    ExprPtr lhs;
    ExprPtr rhs;
};
struct Call {
    Function func = Function::log;
    ExprPtr arg;
};

// Immutable parse tree; subtrees are shared between copies.
struct Expr {
    std::variant<Literal, Variable, Unary, Binary, Call> node;
};

inline ExprPtr literal(double v) { return std::make_shared<const Expr>(Expr{Literal{v}}); }
inline ExprPtr variable(std::string name) { return std::make_shared<const Expr>(Expr{Variable{std::move(name)}}); }
inline ExprPtr unary(UnaryOp op, ExprPtr e) { return std::make_shared<const Expr>(Expr{Unary{op, std::move(e)}}); }
inline ExprPtr binary(BinaryOp op, ExprPtr l, ExprPtr r) {
    return std::make_shared<const Expr>(Expr{Binary{op, std::move(l), std::move(r)}});
}
inline ExprPtr call(Function f, ExprPtr arg) { return std::make_shared<const Expr>(Expr{Call{f, std::move(arg)}}); }

constexpr std::string_view function_name(Function f) {
    switch (f) {
    case Function::log: return "log";
    case Function::sin: return "sin";
    case Function::cos: return "cos";
    case Function::exp: return "exp";
    }
    return "?";
}

constexpr std::string_view binary_symbol(BinaryOp op) {
    switch (op) {
    case BinaryOp::add: return "+";
    case BinaryOp::sub: return "-";
    case BinaryOp::mul: return "*";
    case BinaryOp::div: return "/";
    case BinaryOp::pow: return "^";
    }
    return "?";
}

// Structural equality; literals compare by exact value.
inline bool equal(const Expr& a, const Expr& b) {
    if (a.node.index() != b.node.index()) {
        return false;
    }
    return std::visit(
        [&](const auto& x) -> bool {
            using T = std::decay_t<decltype(x)>;
            const auto& y = std::get<T>(b.node);
            if constexpr (std::is_same_v<T, Literal>) {
                return x.value == y.value;
            } else if constexpr (std::is_same_v<T, Variable>) {
                return x.name == y.name;
            } else if constexpr (std::is_same_v<T, Unary>) {
                return x.op == y.op && equal(*x.operand, *y.operand);
            } else if constexpr (std::is_same_v<T, Binary>) {
                return x.op == y.op && equal(*x.lhs, *y.lhs) && equal(*x.rhs, *y.rhs);
            } else {
                return x.func == y.func && equal(*x.arg, *y.arg);
            }
        },
        a.node);
}

inline bool operator==(const Expr& a, const Expr& b) { return equal(a, b); }

namespace detail {

// Binding strength used by the printer: + - < * / < unary - < ^ < atoms.
inline int precedence(const Expr& e) {
    if (const auto* b = std::get_if<Binary>(&e.node)) {
        switch (b->op) {
        case BinaryOp::add:
        case BinaryOp::sub: return 1;
        case BinaryOp::mul:
        case BinaryOp::div: return 2;
        case BinaryOp::pow: return 4;
        }
    }
    if (std::holds_alternative<Unary>(e.node)) {
        return 3;
    }
    return 5;
}

inline void print(const Expr& e, std::string& out) {
    auto wrapped = [&out](const Expr& sub, bool parens) {
        if (parens) out += '(';
        print(sub, out);
        if (parens) out += ')';
    };
    std::visit(
        [&](const auto& x) {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, Literal>) {
                out += tapead::detail::shortest(x.value);
            } else if constexpr (std::is_same_v<T, Variable>) {
                out += x.name;
            } else if constexpr (std::is_same_v<T, Unary>) {
                out += '-';
                wrapped(*x.operand, precedence(*x.operand) < 3);
            } else if constexpr (std::is_same_v<T, Binary>) {
                const int p = precedence(e);
                if (x.op == BinaryOp::pow) {
                    wrapped(*x.lhs, precedence(*x.lhs) <= p);
                    out += '^';
                    print(*x.rhs, out);
                } else {
                    wrapped(*x.lhs, precedence(*x.lhs) < p);
                    out += ' ';
                    out += binary_symbol(x.op);
                    out += ' ';
                    wrapped(*x.rhs, precedence(*x.rhs) <= p);
                }
            } else {
                out += function_name(x.func);
                out += '(';
                print(*x.arg, out);
                out += ')';
            }
        },
        e.node);
}

} // namespace detail

// Text with the minimum parentheses needed to parse back to the same tree.
inline std::string to_string(const Expr& e) {
    std::string out;
    detail::print(e, out);
    return out;
}

// Direct recursive interpretation, independent of any graph machinery.
// Applies the same domain rules as graph construction.
inline double evaluate(const Expr& e, const Bindings& bindings) {
    auto checked = [](double v, const char* what, double operand) {
        if (!std::isfinite(v)) {
            throw domain_error(std::string("non-finite result of ") + what + "(" +
                               tapead::detail::general(operand, 6) + ")");
        }
        return v;
    };
    return std::visit(
        [&](const auto& x) -> double {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, Literal>) {
                return x.value;
            } else if constexpr (std::is_same_v<T, Variable>) {
                auto it = bindings.find(x.name);
                if (it == bindings.end()) {
                    throw unbound_variable(x.name);
                }
                return it->second;
            } else if constexpr (std::is_same_v<T, Unary>) {
                return -evaluate(*x.operand, bindings);
            } else if constexpr (std::is_same_v<T, Binary>) {
                const double a = evaluate(*x.lhs, bindings);
                const double b = evaluate(*x.rhs, bindings);
                switch (x.op) {
                case BinaryOp::add: return checked(a + b, "add", a);
                case BinaryOp::sub: return checked(a - b, "sub", a);
                case BinaryOp::mul: return checked(a * b, "mul", a);
                case BinaryOp::div:
                    if (b == 0.0) {
                        throw domain_error("division by zero: denominator 0");
                    }
                    return checked(a / b, "div", a);
                case BinaryOp::pow:
                    if (a < 0.0 && std::trunc(b) != b) {
                        throw domain_error("pow of negative base " + tapead::detail::general(a, 6) +
                                           " with non-integer exponent " + tapead::detail::shortest(b));
                    }
                    if (a == 0.0 && b < 0.0) {
                        throw domain_error("pow of 0 with negative exponent " + tapead::detail::shortest(b));
                    }
                    return checked(std::pow(a, b), "pow", a);
                }
                return 0.0;
            } else {
                const double a = evaluate(*x.arg, bindings);
                switch (x.func) {
                case Function::log:
                    if (!(a > 0.0)) {
                        throw domain_error("log of " + tapead::detail::general(a, 6));
                    }
                    return std::log(a);
                case Function::sin: return std::sin(a);
                case Function::cos: return std::cos(a);
                case Function::exp: return checked(std::exp(a), "exp", a);
                }
                return 0.0;
            }
        },
        e.node);
}

} // namespace ast
} // namespace tapead
