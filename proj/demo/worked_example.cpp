// Builds y = log(x1) + x1*x2 - sin(x2) at (2, 5) with the graph API and
// prints its value and gradient in both modes, plus the trace tables.

#include <cstdio>
#include <iostream>

#include "tapead/forward_mode.hpp"
#include "tapead/graph.hpp"
#include "tapead/reverse_mode.hpp"
#include "tapead/trace.hpp"

int main() {
    using namespace tapead;

    Graph g;
    const NodeId x1 = g.new_variable("x1", 2.0);
    const NodeId x2 = g.new_variable("x2", 5.0);
    const NodeId y = sub(g, add(g, log(g, x1), mul(g, x1, x2)), sin(g, x2));
    std::printf("y = %.6f\n", g[y].value);

    // one forward pass per input
    for (NodeId x : {x1, x2}) {
        const NodeValues d = forward_derivatives(g, x);
        std::printf("forward: dy/d%s = %.6f\n", g[x].name.c_str(), d[y]);
    }

    // one reverse pass for all inputs
    const NodeValues adj = reverse_derivatives(g, y);
    std::printf("reverse: dy/dx1 = %.6f, dy/dx2 = %.6f\n", adj[x1], adj[x2]);
    std::printf("passes: %llu\n\n", static_cast<unsigned long long>(g.passes()));

    // the same graph with the conventional names, as tables
    Graph named;
    const NodeId out = build_example(named);
    std::cout << format_table(forward_trace(named, NodeId{0}, Notation::unicode)) << "\n";
    std::cout << format_table(reverse_trace(named, out, Notation::unicode));
    return 0;
}
