#pragma once

#include <string>

#include "tapead/detail/format.hpp"
#include "tapead/graph.hpp"
#include "tapead/trace.hpp"

namespace tapead {

namespace detail {

inline std::string dot_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out;
}

} // namespace detail

// Graphviz digraph: one record per node in creation order, labelled
// name / operator / value, and one parent -> child edge per operand slot.
inline std::string to_dot(const Graph& g) {
    std::string out = "digraph computational_graph {\n  rankdir=LR;\n";
    for (std::uint32_t i = 0; i < g.size(); ++i) {
        const NodeId id{i};
        const Node& n = g.node(id);
        out += "  n" + std::to_string(i) + " [label=\"" + detail::dot_escape(display_name(g, id)) + "\\n" +
               detail::dot_escape(op_label(n.op)) + "\\n" + detail::fixed(n.value, 3) + "\"];\n";
    }
    for (std::uint32_t i = 0; i < g.size(); ++i) {
        for (NodeId p : g.node(NodeId{i}).parents) {
            out += "  n" + std::to_string(p.index) + " -> n" + std::to_string(i) + ";\n";
        }
    }
    out += "}\n";
    return out;
}

} // namespace tapead
