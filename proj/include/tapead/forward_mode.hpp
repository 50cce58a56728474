#pragma once

#include <string>
#include <vector>

#include "tapead/derivatives.hpp"
#include "tapead/graph.hpp"
#include "tapead/ordering.hpp"

namespace tapead {

// Tangents v' = dv/d(seed) for every node. Nodes off the forward tape are
// not reachable from the seed and keep 0.
//
// `observe(NodeId)` is called once per tape node after its tangent is final.
template <class Observer = NoObserver>
NodeValues forward_derivatives(Graph& g, NodeId seed, Observer&& observe = {}) {
    if (g.node(seed).op.kind != OpKind::var) {
        throw seed_not_variable("seed '" + g.node(seed).name + "' is a " +
                                std::string(op_name(g.node(seed).op.kind)) + " node, not a variable");
    }
    const Tape tape = forward_tape(g, seed);

    g.clear_partial_derivatives();
    g.set_partial_derivative(seed, 1.0);
    g.count_pass();
    observe(seed);

    for (std::size_t k = 1; k < tape.order.size(); ++k) {
        const NodeId id = tape.order[k];
        const Node& v = g.node(id);
        double sum = 0.0;
        for (std::size_t i = 0; i < v.parents.size(); ++i) {
            sum += v.grad_wrt_parents[i] * g.node(v.parents[i]).partial_derivative;
        }
        g.set_partial_derivative(id, sum);
        observe(id);
    }

    std::vector<double> out(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        out[i] = g.nodes()[i].partial_derivative;
    }
    return NodeValues(std::move(out));
}

} // namespace tapead
