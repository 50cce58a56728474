#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "tapead/ast.hpp"
#include "tapead/graph.hpp"

namespace tapead {

struct LoweredGraph {
    Graph graph;
    NodeId output;
};

namespace detail {

// Builds the graph by a post-order fold over the tree. Variables are created
// first (in order of first appearance) and shared by every occurrence; every
// other tree node becomes exactly one graph node.
class Lowering {
public:
    Lowering(const Bindings& bindings) : bindings_(bindings) {}

    LoweredGraph run(const ast::Expr& root) {
        collect_variables(root);
        number_operations(root);

        LoweredGraph out;
        for (const std::string& name : variable_order_) {
            auto it = bindings_.find(name);
            if (it == bindings_.end()) {
                throw unbound_variable(name);
            }
            out.graph.new_variable(name, it->second);
        }
        next_op_ = 0;
        out.output = build(root, out.graph);
        return out;
    }

private:
    void collect_variables(const ast::Expr& e) {
        std::visit(
            [&](const auto& x) {
                using T = std::decay_t<decltype(x)>;
                if constexpr (std::is_same_v<T, ast::Variable>) {
                    if (std::find(variable_order_.begin(), variable_order_.end(), x.name) == variable_order_.end()) {
                        variable_order_.push_back(x.name);
                    }
                } else if constexpr (std::is_same_v<T, ast::Unary>) {
                    collect_variables(*x.operand);
                } else if constexpr (std::is_same_v<T, ast::Binary>) {
                    collect_variables(*x.lhs);
                    if (x.op != ast::BinaryOp::pow) {
                        collect_variables(*x.rhs);
                    }
                } else if constexpr (std::is_same_v<T, ast::Call>) {
                    collect_variables(*x.arg);
                }
            },
            e.node);
    }

    // Depth of each operation node (leaves are 0) in creation order.
    int levels(const ast::Expr& e) {
        return std::visit(
            [&](const auto& x) -> int {
                using T = std::decay_t<decltype(x)>;
                int level = 0;
                if constexpr (std::is_same_v<T, ast::Unary>) {
                    level = levels(*x.operand) + 1;
                } else if constexpr (std::is_same_v<T, ast::Binary>) {
                    const int l = levels(*x.lhs);
                    const int r = x.op == ast::BinaryOp::pow ? 0 : levels(*x.rhs);
                    level = std::max(l, r) + 1;
                } else if constexpr (std::is_same_v<T, ast::Call>) {
                    level = levels(*x.arg) + 1;
                } else {
                    return 0;
                }
                op_levels_.push_back(level);
                return level;
            },
            e.node);
    }

    // Operation nodes are named v1, v2, ... by (depth, creation order), which
    // lists every node after its operands and reproduces the familiar
    // numbering of hand-written evaluation traces.
    void number_operations(const ast::Expr& root) {
        levels(root);
        std::vector<std::size_t> order(op_levels_.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return op_levels_[a] < op_levels_[b]; });
        op_names_.resize(order.size());
        for (std::size_t rank = 0; rank < order.size(); ++rank) {
            op_names_[order[rank]] = "v" + std::to_string(rank + 1);
        }
    }

    NodeId build(const ast::Expr& e, Graph& g) {
        return std::visit(
            [&](const auto& x) -> NodeId {
                using T = std::decay_t<decltype(x)>;
                if constexpr (std::is_same_v<T, ast::Literal>) {
                    return g.new_constant(x.value);
                } else if constexpr (std::is_same_v<T, ast::Variable>) {
                    return *g.find_variable(x.name);
                } else if constexpr (std::is_same_v<T, ast::Unary>) {
                    const NodeId a = build(*x.operand, g);
                    return g.apply({OpKind::neg}, {a}, next_name());
                } else if constexpr (std::is_same_v<T, ast::Binary>) {
                    if (x.op == ast::BinaryOp::pow) {
                        const NodeId a = build(*x.lhs, g);
                        const double c = std::get<ast::Literal>(x.rhs->node).value;
                        return g.apply(Operator::pow(c), {a}, next_name());
                    }
                    const NodeId a = build(*x.lhs, g);
                    const NodeId b = build(*x.rhs, g);
                    return g.apply({binary_kind(x.op)}, {a, b}, next_name());
                } else {
                    const NodeId a = build(*x.arg, g);
                    return g.apply({function_kind(x.func)}, {a}, next_name());
                }
            },
            e.node);
    }

    std::string next_name() { return op_names_.at(next_op_++); }

    static OpKind binary_kind(ast::BinaryOp op) {
        switch (op) {
        case ast::BinaryOp::add: return OpKind::add;
        case ast::BinaryOp::sub: return OpKind::sub;
        case ast::BinaryOp::mul: return OpKind::mul;
        case ast::BinaryOp::div: return OpKind::div;
        case ast::BinaryOp::pow: return OpKind::pow_const;
        }
        return OpKind::add;
    }

    static OpKind function_kind(ast::Function f) {
        switch (f) {
        case ast::Function::log: return OpKind::log;
        case ast::Function::sin: return OpKind::sin;
        case ast::Function::cos: return OpKind::cos;
        case ast::Function::exp: return OpKind::exp;
        }
        return OpKind::log;
    }

    const Bindings& bindings_;
    std::vector<std::string> variable_order_;
    std::vector<int> op_levels_;
    std::vector<std::string> op_names_;
    std::size_t next_op_ = 0;
};

} // namespace detail

// Lowers a parsed expression into a fresh graph evaluated at `bindings`.
// Throws unbound_variable or domain_error.
inline LoweredGraph lower(const ast::Expr& expr, const Bindings& bindings) {
    return detail::Lowering(bindings).run(expr);
}

} // namespace tapead
