#pragma once

#include <cmath>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "tapead/detail/format.hpp"
#include "tapead/error.hpp"

namespace tapead {

// Handle of a node inside one Graph. Ids are dense and follow creation order.
struct NodeId {
    std::uint32_t index = 0;

    friend constexpr auto operator<=>(NodeId, NodeId) = default;
};

enum class OpKind {
    var,
    constant,
    add,
    sub,
    mul,
    div,
    neg,
    log,
    sin,
    cos,
    exp,
    pow_const,
};

struct Operator {
    OpKind kind = OpKind::var;
    double exponent = 0.0; // only meaningful for pow_const

    static constexpr Operator pow(double c) { return {OpKind::pow_const, c}; }

    friend constexpr bool operator==(const Operator&, const Operator&) = default;
};

constexpr std::size_t arity(OpKind kind) {
    switch (kind) {
    case OpKind::var:
    case OpKind::constant:
        return 0;
    case OpKind::add:
    case OpKind::sub:
    case OpKind::mul:
    case OpKind::div:
        return 2;
    default:
        return 1;
    }
}

constexpr std::string_view op_name(OpKind kind) {
    switch (kind) {
    case OpKind::var: return "var";
    case OpKind::constant: return "const";
    case OpKind::add: return "add";
    case OpKind::sub: return "sub";
    case OpKind::mul: return "mul";
    case OpKind::div: return "div";
    case OpKind::neg: return "neg";
    case OpKind::log: return "log";
    case OpKind::sin: return "sin";
    case OpKind::cos: return "cos";
    case OpKind::exp: return "exp";
    case OpKind::pow_const: return "pow_const";
    }
    return "?";
}

inline std::string op_label(const Operator& op) {
    if (op.kind == OpKind::pow_const) {
        return "pow_const(" + detail::shortest(op.exponent) + ")";
    }
    return std::string(op_name(op.kind));
}

struct Node {
    double value = 0.0;
    Operator op;
    std::vector<NodeId> parents;
    std::vector<NodeId> children;
    std::vector<double> grad_wrt_parents; // d(self)/d(parents[i]) at the primal point
    double partial_derivative = 0.0;      // forward accumulator
    double adjoint = 0.0;                 // reverse accumulator
    std::string name;
};

// Primal value and local partials of one operation, before it becomes a node.
struct LocalResult {
    double value = 0.0;
    std::vector<double> grad_wrt_parents;
};

namespace detail {

inline std::string operand_text(double v, std::string_view operand) {
    std::string s = general(v, 6);
    if (!operand.empty()) {
        s += " (operand ";
        s += operand;
        s += ")";
    }
    return s;
}

} // namespace detail

// Evaluates `op` on operand values and its local partial derivatives.
// Throws domain_error when the result would leave the reals. `names` is only
// used to label the offending operand in the error message.
inline LocalResult evaluate_local(const Operator& op, std::span<const double> in,
                                  std::span<const std::string_view> names = {}) {
    auto name = [&](std::size_t i) { return i < names.size() ? names[i] : std::string_view{}; };
    LocalResult r;
    switch (op.kind) {
    case OpKind::add:
        r.value = in[0] + in[1];
        r.grad_wrt_parents = {1.0, 1.0};
        break;
    case OpKind::sub:
        r.value = in[0] - in[1];
        r.grad_wrt_parents = {1.0, -1.0};
        break;
    case OpKind::mul:
        r.value = in[0] * in[1];
        r.grad_wrt_parents = {in[1], in[0]};
        break;
    case OpKind::div:
        if (in[1] == 0.0) {
            throw domain_error("division by zero: denominator " + detail::operand_text(in[1], name(1)));
        }
        r.value = in[0] / in[1];
        r.grad_wrt_parents = {1.0 / in[1], -in[0] / (in[1] * in[1])};
        break;
    case OpKind::neg:
        r.value = -in[0];
        r.grad_wrt_parents = {-1.0};
        break;
    case OpKind::log:
        if (!(in[0] > 0.0)) {
            throw domain_error("log of " + detail::operand_text(in[0], name(0)));
        }
        r.value = std::log(in[0]);
        r.grad_wrt_parents = {1.0 / in[0]};
        break;
    case OpKind::sin:
        r.value = std::sin(in[0]);
        r.grad_wrt_parents = {std::cos(in[0])};
        break;
    case OpKind::cos:
        r.value = std::cos(in[0]);
        r.grad_wrt_parents = {-std::sin(in[0])};
        break;
    case OpKind::exp:
        r.value = std::exp(in[0]);
        r.grad_wrt_parents = {r.value};
        break;
    case OpKind::pow_const: {
        const double c = op.exponent;
        if (in[0] < 0.0 && std::trunc(c) != c) {
            throw domain_error("pow of negative base " + detail::operand_text(in[0], name(0)) +
                               " with non-integer exponent " + detail::shortest(c));
        }
        if (in[0] == 0.0 && c < 0.0) {
            throw domain_error("pow of 0 with negative exponent " + detail::shortest(c));
        }
        r.value = std::pow(in[0], c);
        r.grad_wrt_parents = {c * std::pow(in[0], c - 1.0)};
        break;
    }
    case OpKind::var:
    case OpKind::constant:
        throw invalid_node(std::string("operator '") + std::string(op_name(op.kind)) +
                           "' cannot be applied to operands");
    }

    bool finite = std::isfinite(r.value);
    for (double g : r.grad_wrt_parents) {
        finite = finite && std::isfinite(g);
    }
    if (!finite) {
        std::string args;
        for (std::size_t i = 0; i < in.size(); ++i) {
            args += (i ? ", " : "") + detail::operand_text(in[i], name(i));
        }
        throw domain_error("non-finite result of " + op_label(op) + "(" + args + ")");
    }
    return r;
}

// Arena of nodes for one expression evaluation. Append-only: after a node is
// created only its two derivative accumulators ever change.
class Graph {
public:
    NodeId new_variable(std::string name, double value) {
        if (variable_index_.count(name) != 0) {
            throw duplicate_variable(name);
        }
        Node n;
        n.value = value;
        n.op = {OpKind::var};
        n.name = name;
        const NodeId id = push(std::move(n));
        variable_index_.emplace(std::move(name), id);
        variables_.push_back(id);
        return id;
    }

    NodeId new_constant(double value, std::string name = {}) {
        Node n;
        n.value = value;
        n.op = {OpKind::constant};
        n.name = name.empty() ? detail::shortest(value) : std::move(name);
        return push(std::move(n));
    }

    // Wrapping function: computes the primal value, records the edges to the
    // operands (writing the new id back into each operand's children) and
    // stores the local partials. Exactly one node is appended on success.
    NodeId apply(const Operator& op, std::span<const NodeId> operands, std::string name = {}) {
        if (op.kind == OpKind::var || op.kind == OpKind::constant) {
            throw invalid_node("apply() cannot create leaf nodes");
        }
        if (operands.size() != arity(op.kind)) {
            throw invalid_node(op_label(op) + " expects " + std::to_string(arity(op.kind)) +
                               " operands, got " + std::to_string(operands.size()));
        }
        std::vector<double> in;
        std::vector<std::string_view> names;
        for (NodeId p : operands) {
            const Node& pn = node(p);
            in.push_back(pn.value);
            names.push_back(pn.name);
        }
        LocalResult local = evaluate_local(op, in, names);

        Node n;
        n.value = local.value;
        n.op = op;
        n.parents.assign(operands.begin(), operands.end());
        n.grad_wrt_parents = std::move(local.grad_wrt_parents);
        n.name = std::move(name);
        const NodeId id = push(std::move(n));
        for (NodeId p : operands) {
            nodes_[p.index].children.push_back(id);
        }
        return id;
    }

    NodeId apply(const Operator& op, std::initializer_list<NodeId> operands, std::string name = {}) {
        return apply(op, std::span<const NodeId>(operands.begin(), operands.size()), std::move(name));
    }

    std::size_t size() const noexcept { return nodes_.size(); }

    bool contains(NodeId id) const noexcept { return id.index < nodes_.size(); }

    const Node& node(NodeId id) const {
        if (!contains(id)) {
            throw invalid_node("node id " + std::to_string(id.index) + " out of range (graph has " +
                               std::to_string(nodes_.size()) + " nodes)");
        }
        return nodes_[id.index];
    }

    const Node& operator[](NodeId id) const { return node(id); }

    std::span<const Node> nodes() const noexcept { return nodes_; }

    // Variable ids in creation order.
    std::span<const NodeId> variables() const noexcept { return variables_; }

    std::optional<NodeId> find_variable(std::string_view name) const {
        auto it = variable_index_.find(std::string(name));
        if (it == variable_index_.end()) {
            return std::nullopt;
        }
        return it->second;
    }

    // Accumulator access for the derivative passes.
    void clear_partial_derivatives() noexcept {
        for (Node& n : nodes_) n.partial_derivative = 0.0;
    }
    void clear_adjoints() noexcept {
        for (Node& n : nodes_) n.adjoint = 0.0;
    }
    void set_partial_derivative(NodeId id, double v) { mutable_node(id).partial_derivative = v; }
    void set_adjoint(NodeId id, double v) { mutable_node(id).adjoint = v; }

    // Number of derivative passes (tape traversals) run on this graph.
    std::uint64_t passes() const noexcept { return passes_; }
    void count_pass() noexcept { ++passes_; }

private:
    NodeId push(Node n) {
        const NodeId id{static_cast<std::uint32_t>(nodes_.size())};
        nodes_.push_back(std::move(n));
        return id;
    }

    Node& mutable_node(NodeId id) {
        node(id);
        return nodes_[id.index];
    }

    std::vector<Node> nodes_;
    std::vector<NodeId> variables_;
    std::unordered_map<std::string, NodeId> variable_index_;
    std::uint64_t passes_ = 0;
};

inline NodeId add(Graph& g, NodeId a, NodeId b) { return g.apply({OpKind::add}, {a, b}); }
inline NodeId sub(Graph& g, NodeId a, NodeId b) { return g.apply({OpKind::sub}, {a, b}); }
inline NodeId mul(Graph& g, NodeId a, NodeId b) { return g.apply({OpKind::mul}, {a, b}); }
inline NodeId div(Graph& g, NodeId a, NodeId b) { return g.apply({OpKind::div}, {a, b}); }
inline NodeId neg(Graph& g, NodeId a) { return g.apply({OpKind::neg}, {a}); }
inline NodeId log(Graph& g, NodeId a) { return g.apply({OpKind::log}, {a}); }
inline NodeId sin(Graph& g, NodeId a) { return g.apply({OpKind::sin}, {a}); }
inline NodeId cos(Graph& g, NodeId a) { return g.apply({OpKind::cos}, {a}); }
inline NodeId exp(Graph& g, NodeId a) { return g.apply({OpKind::exp}, {a}); }
inline NodeId pow_const(Graph& g, NodeId a, double c) { return g.apply(Operator::pow(c), {a}); }

// y = log(x1) + x1*x2 - sin(x2) at (2, 5), named as in the classic worked
// example: v1 = log x1, v2 = x1*x2, v3 = sin x2, v4 = v1 + v2, v5 = v4 - v3.
inline NodeId build_example(Graph& g) {
    const NodeId x1 = g.new_variable("x1", 2.0);
    const NodeId x2 = g.new_variable("x2", 5.0);
    const NodeId v1 = g.apply({OpKind::log}, {x1}, "v1");
    const NodeId v2 = g.apply({OpKind::mul}, {x1, x2}, "v2");
    const NodeId v4 = g.apply({OpKind::add}, {v1, v2}, "v4");
    const NodeId v3 = g.apply({OpKind::sin}, {x2}, "v3");
    return g.apply({OpKind::sub}, {v4, v3}, "v5");
}

} // namespace tapead

template <>
struct std::hash<tapead::NodeId> {
    std::size_t operator()(tapead::NodeId id) const noexcept { return std::hash<std::uint32_t>{}(id.index); }
};
