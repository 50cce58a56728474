#pragma once

#include <vector>

#include "tapead/derivatives.hpp"
#include "tapead/graph.hpp"
#include "tapead/ordering.hpp"

namespace tapead {

// Adjoints v_bar = d(output)/dv for every node in one pass. Each tape node
// scatters adjoint * local partial into every parent occurrence, so repeated
// operands (x*x) collect one contribution per edge. Non-ancestors keep 0.
//
// `observe(const AdjointStep&)` sees each scatter step in processing order.
template <class Observer = NoObserver>
NodeValues reverse_derivatives(Graph& g, NodeId output, Observer&& observe = {}) {
    const Tape tape = reverse_tape(g, output);

    g.clear_adjoints();
    g.set_adjoint(output, 1.0);
    g.count_pass();

    std::vector<char> touched(g.size(), 0);
    touched[output.index] = 1;

    for (NodeId id : tape.order) {
        const Node& v = g.node(id);
        for (std::size_t i = 0; i < v.parents.size(); ++i) {
            const NodeId p = v.parents[i];
            const double contribution = v.grad_wrt_parents[i] * v.adjoint;
            const double accumulated = g.node(p).adjoint + contribution;
            g.set_adjoint(p, accumulated);
            observe(AdjointStep{id, i, p, contribution, accumulated, !touched[p.index]});
            touched[p.index] = 1;
        }
    }

    std::vector<double> out(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        out[i] = g.nodes()[i].adjoint;
    }
    return NodeValues(std::move(out));
}

} // namespace tapead
