#pragma once

#include <algorithm>
#include <cstddef>
#include <deque>
#include <utility>
#include <vector>

#include "tapead/graph.hpp"

namespace tapead {

enum class TapeDirection { forward_from_seed, reverse_from_output };

// Topologically ordered node sequence read linearly by a derivative pass.
// Forward tapes list every node before its children, reverse tapes list
// every node before its parents; the anchor is always first.
struct Tape {
    std::vector<NodeId> order;
    TapeDirection direction = TapeDirection::forward_from_seed;
    NodeId anchor;
};

namespace detail {

inline const std::vector<NodeId>& successors(const Node& n, TapeDirection dir) {
    return dir == TapeDirection::forward_from_seed ? n.children : n.parents;
}

// Depth-first search from `anchor`, appending each node only after all of its
// successors were explored, then reversing. Iterative so that long chains do
// not exhaust the call stack. Children are explored newest first so that
// older children come first on the finished tape; parents are explored in
// operand order.
inline Tape depth_first_tape(const Graph& g, NodeId anchor, TapeDirection dir) {
    g.node(anchor);

    Tape tape;
    tape.direction = dir;
    tape.anchor = anchor;

    std::vector<char> visited(g.size(), 0);
    // (node, index of next successor to explore)
    std::vector<std::pair<NodeId, std::size_t>> stack;
    stack.emplace_back(anchor, 0);
    visited[anchor.index] = 1;

    while (!stack.empty()) {
        auto& [id, next] = stack.back();
        const auto& succ = successors(g.node(id), dir);
        if (next < succ.size()) {
            const std::size_t k = next++;
            const NodeId s = dir == TapeDirection::forward_from_seed ? succ[succ.size() - 1 - k] : succ[k];
            if (!visited[s.index]) {
                visited[s.index] = 1;
                stack.emplace_back(s, 0);
            }
            continue;
        }
        tape.order.push_back(id);
        stack.pop_back();
    }

    std::reverse(tape.order.begin(), tape.order.end());
    return tape;
}

// Breadth-first reachability, kept separate from the DFS used for tapes.
inline std::vector<char> reachable_from(const Graph& g, NodeId anchor, TapeDirection dir) {
    std::vector<char> seen(g.size(), 0);
    std::deque<NodeId> queue{anchor};
    seen[anchor.index] = 1;
    while (!queue.empty()) {
        const NodeId id = queue.front();
        queue.pop_front();
        for (NodeId s : successors(g.node(id), dir)) {
            if (!seen[s.index]) {
                seen[s.index] = 1;
                queue.push_back(s);
            }
        }
    }
    return seen;
}

} // namespace detail

// Nodes reachable from `seed` along child edges, each before its children.
inline Tape forward_tape(const Graph& g, NodeId seed) {
    return detail::depth_first_tape(g, seed, TapeDirection::forward_from_seed);
}

// Ancestors-or-self of `output` along parent edges, each before its parents.
inline Tape reverse_tape(const Graph& g, NodeId output) {
    return detail::depth_first_tape(g, output, TapeDirection::reverse_from_output);
}

// True iff the tape starts at its anchor, has no duplicates, covers exactly
// the nodes reachable from the anchor in its direction, and orders every
// in-tape edge according to that direction.
inline bool check_tape(const Graph& g, const Tape& tape) {
    if (!g.contains(tape.anchor) || tape.order.empty() || tape.order.front() != tape.anchor) {
        return false;
    }
    constexpr std::size_t absent = static_cast<std::size_t>(-1);
    std::vector<std::size_t> position(g.size(), absent);
    for (std::size_t i = 0; i < tape.order.size(); ++i) {
        const NodeId id = tape.order[i];
        if (!g.contains(id) || position[id.index] != absent) {
            return false;
        }
        position[id.index] = i;
    }

    const auto expected = detail::reachable_from(g, tape.anchor, tape.direction);
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (static_cast<bool>(expected[i]) != (position[i] != absent)) {
            return false;
        }
    }

    for (NodeId id : tape.order) {
        for (NodeId s : detail::successors(g.node(id), tape.direction)) {
            if (position[s.index] != absent && position[s.index] <= position[id.index]) {
                return false;
            }
        }
    }
    return true;
}

} // namespace tapead
