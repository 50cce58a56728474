#pragma once

#include <stdexcept>
#include <string_view>

#include "tapead/ast.hpp"
#include "tapead/error.hpp"

// Numerical oracle. Works on the parse tree only and must never depend on
// the graph headers, so that it stays an independent check of both modes.

namespace tapead {

// Central difference (f(x + h e_var) - f(x - h e_var)) / 2h by direct
// interpretation of the tree.
inline double finite_difference(const ast::Expr& expr, const Bindings& bindings, std::string_view var, double h) {
    if (!(h > 0.0)) {
        throw std::invalid_argument("finite difference step must be positive");
    }
    auto it = bindings.find(var);
    if (it == bindings.end()) {
        throw unbound_variable(std::string(var));
    }
    Bindings shifted = bindings;
    double& x = shifted.find(var)->second;
    const double x0 = it->second;

    x = x0 + h;
    const double up = ast::evaluate(expr, shifted);
    x = x0 - h;
    const double down = ast::evaluate(expr, shifted);
    return (up - down) / (2.0 * h);
}

} // namespace tapead
