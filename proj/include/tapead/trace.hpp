#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "tapead/detail/format.hpp"
#include "tapead/forward_mode.hpp"
#include "tapead/graph.hpp"
#include "tapead/reverse_mode.hpp"

namespace tapead {

enum class Notation { ascii, unicode };

// One line of an evaluation or derivative table.
struct TraceRow {
    std::string name;
    std::string formula;
    double value = 0.0;
};

struct Trace {
    std::vector<TraceRow> primal;
    std::vector<TraceRow> derivative;
};

// Display name of a node; unnamed nodes fall back to their id.
inline std::string display_name(const Graph& g, NodeId id) {
    const std::string& n = g.node(id).name;
    return n.empty() ? "n" + std::to_string(id.index) : n;
}

// All nodes ordered by (depth, id). Depth strictly grows along every edge, so
// this is a topological order that lists the inputs first.
inline std::vector<NodeId> evaluation_order(const Graph& g) {
    std::vector<int> depth(g.size(), 0);
    std::vector<NodeId> order;
    for (std::uint32_t i = 0; i < g.size(); ++i) {
        for (NodeId p : g.node(NodeId{i}).parents) {
            depth[i] = std::max(depth[i], depth[p.index] + 1);
        }
        order.push_back(NodeId{i});
    }
    std::stable_sort(order.begin(), order.end(),
                     [&](NodeId a, NodeId b) { return depth[a.index] < depth[b.index]; });
    return order;
}

namespace detail {

inline std::string_view times(Notation n) { return n == Notation::unicode ? " × " : " * "; }

// Tangent / adjoint symbol of a node: d(v1) or bar(v1), or the name with a
// combining dot / macron over its first character.
inline std::string decorated(std::string_view name, Notation n, bool adjoint) {
    if (n == Notation::ascii) {
        return std::string(adjoint ? "bar(" : "d(") + std::string(name) + ")";
    }
    std::size_t first = 1;
    while (first < name.size() && (static_cast<unsigned char>(name[first]) & 0xC0) == 0x80) {
        ++first;
    }
    return std::string(name.substr(0, first)) + (adjoint ? "\u0304" : "\u0307") + std::string(name.substr(first));
}

inline std::string primal_formula(const Graph& g, NodeId id, Notation n) {
    const Node& v = g.node(id);
    auto arg = [&](std::size_t i) { return display_name(g, v.parents[i]); };
    switch (v.op.kind) {
    case OpKind::var: return "input";
    case OpKind::constant: return "constant";
    case OpKind::add: return arg(0) + " + " + arg(1);
    case OpKind::sub: return arg(0) + " - " + arg(1);
    case OpKind::mul: return arg(0) + std::string(times(n)) + arg(1);
    case OpKind::div: return arg(0) + " / " + arg(1);
    case OpKind::neg: return "-" + arg(0);
    case OpKind::log: return "log(" + arg(0) + ")";
    case OpKind::sin: return "sin(" + arg(0) + ")";
    case OpKind::cos: return "cos(" + arg(0) + ")";
    case OpKind::exp: return "exp(" + arg(0) + ")";
    case OpKind::pow_const: return arg(0) + "^" + shortest(v.op.exponent);
    }
    return {};
}

struct Term {
    bool negative = false;
    std::string text;
};

// `symbol` times the local partial d(node)/d(parents[slot]), written with
// the operand names instead of numbers.
inline Term chain_term(const Graph& g, NodeId id, std::size_t slot, const std::string& symbol, Notation n) {
    const Node& v = g.node(id);
    auto arg = [&](std::size_t i) { return display_name(g, v.parents[i]); };
    const std::string x(times(n));
    switch (v.op.kind) {
    case OpKind::add: return {false, symbol};
    case OpKind::sub: return {slot == 1, symbol};
    case OpKind::mul: return {false, symbol + x + arg(1 - slot)};
    case OpKind::div:
        if (slot == 0) return {false, symbol + " / " + arg(1)};
        return {true, symbol + x + arg(0) + " / " + arg(1) + "^2"};
    case OpKind::neg: return {true, symbol};
    case OpKind::log: return {false, symbol + " / " + arg(0)};
    case OpKind::sin: return {false, symbol + x + "cos(" + arg(0) + ")"};
    case OpKind::cos: return {true, symbol + x + "sin(" + arg(0) + ")"};
    case OpKind::exp: return {false, symbol + x + "exp(" + arg(0) + ")"};
    case OpKind::pow_const: {
        const double c = v.op.exponent;
        const std::string power = c - 1.0 == 1.0 ? arg(0) : arg(0) + "^" + shortest(c - 1.0);
        return {false, symbol + x + shortest(c) + x + power};
    }
    case OpKind::var:
    case OpKind::constant: break;
    }
    return {false, symbol};
}

inline std::vector<TraceRow> primal_rows(const Graph& g, Notation n) {
    std::vector<TraceRow> rows;
    for (NodeId id : evaluation_order(g)) {
        rows.push_back({display_name(g, id), primal_formula(g, id, n), g.node(id).value});
    }
    return rows;
}

} // namespace detail

// Primal table plus the tangent of every node on the forward tape of `seed`,
// in tape order.
inline Trace forward_trace(Graph& g, NodeId seed, Notation n = Notation::ascii) {
    Trace t;
    t.primal = detail::primal_rows(g, n);
    forward_derivatives(g, seed, [&](NodeId id) {
        const Node& v = g.node(id);
        TraceRow row{detail::decorated(display_name(g, id), n, false), "1", v.partial_derivative};
        if (id != seed) {
            row.formula.clear();
            for (std::size_t i = 0; i < v.parents.size(); ++i) {
                const auto term =
                    detail::chain_term(g, id, i, detail::decorated(display_name(g, v.parents[i]), n, false), n);
                if (row.formula.empty()) {
                    row.formula = (term.negative ? "-" : "") + term.text;
                } else {
                    row.formula += (term.negative ? " - " : " + ") + term.text;
                }
            }
        }
        t.derivative.push_back(std::move(row));
    });
    return t;
}

// Primal table plus one row per adjoint scatter step of the reverse pass, so
// partially accumulated adjoints are visible.
inline Trace reverse_trace(Graph& g, NodeId output, Notation n = Notation::ascii) {
    Trace t;
    t.primal = detail::primal_rows(g, n);
    t.derivative.push_back({detail::decorated(display_name(g, output), n, true), "1", 1.0});
    reverse_derivatives(g, output, [&](const AdjointStep& step) {
        const std::string target = detail::decorated(display_name(g, step.parent), n, true);
        const auto term =
            detail::chain_term(g, step.node, step.slot, detail::decorated(display_name(g, step.node), n, true), n);
        std::string formula;
        if (step.first) {
            if (!term.negative) {
                formula = term.text;
            } else if (term.text.find(' ') == std::string::npos) {
                formula = term.text + std::string(detail::times(n)) + "(-1)";
            } else {
                formula = "-(" + term.text + ")";
            }
        } else {
            formula = target + (term.negative ? " - " : " + ") + term.text;
        }
        t.derivative.push_back({target, std::move(formula), step.accumulated});
    });
    return t;
}

namespace detail {

// Terminal columns taken by UTF-8 text; combining marks take none.
inline std::size_t display_width(std::string_view s) {
    std::size_t w = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const auto c = static_cast<unsigned char>(s[i]);
        if ((c & 0xC0) == 0x80) continue;
        // U+0300..U+036F
        if (i + 1 < s.size() && (c == 0xCC || (c == 0xCD && static_cast<unsigned char>(s[i + 1]) < 0xB0))) continue;
        ++w;
    }
    return w;
}

} // namespace detail

// Aligned "name | formula | value" table, values at 3 decimals, with a rule
// between the primal and the derivative rows.
inline std::string format_table(const Trace& t) {
    std::size_t name_w = 0, formula_w = 0, value_w = 0;
    auto measure = [&](const std::vector<TraceRow>& rows) {
        for (const auto& r : rows) {
            name_w = std::max(name_w, detail::display_width(r.name));
            formula_w = std::max(formula_w, detail::display_width(r.formula));
            value_w = std::max(value_w, detail::fixed(r.value, 3).size());
        }
    };
    measure(t.primal);
    measure(t.derivative);

    auto pad = [](std::string s, std::size_t width) {
        s.append(width - std::min(width, detail::display_width(s)), ' ');
        return s;
    };
    std::string out;
    auto emit = [&](const std::vector<TraceRow>& rows) {
        for (const auto& r : rows) {
            const std::string v = detail::fixed(r.value, 3);
            out += pad(r.name, name_w) + " | " + pad(r.formula, formula_w) + " | " +
                   std::string(value_w - v.size(), ' ') + v + "\n";
        }
    };
    emit(t.primal);
    out += std::string(name_w + formula_w + value_w + 6, '-') + "\n";
    emit(t.derivative);
    return out;
}

} // namespace tapead
