#pragma once

#include <cstddef>
#include <vector>

#include "tapead/graph.hpp"

namespace tapead {

// Dense NodeId -> real mapping covering every node of a graph.
class NodeValues {
public:
    NodeValues() = default;
    explicit NodeValues(std::vector<double> values) : values_(std::move(values)) {}

    double operator[](NodeId id) const { return values_.at(id.index); }
    std::size_t size() const noexcept { return values_.size(); }
    const std::vector<double>& values() const noexcept { return values_; }

private:
    std::vector<double> values_;
};

// One scatter step of the reverse pass: parents[slot] of `node` received
// `contribution` and now holds `accumulated`.
struct AdjointStep {
    NodeId node;
    std::size_t slot = 0;
    NodeId parent;
    double contribution = 0.0;
    double accumulated = 0.0;
    bool first = false; // parent had no earlier contribution in this pass
};

struct NoObserver {
    template <class... Args>
    constexpr void operator()(Args&&...) const noexcept {}
};

} // namespace tapead
