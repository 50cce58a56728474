#include <functional>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "tapead/gradcheck.hpp"
#include "tapead/graph.hpp"
#include "tapead/lower.hpp"
#include "tapead/ordering.hpp"

namespace tapead {
namespace {

NodeId id_of(const Graph& g, const std::string& name) {
    for (std::uint32_t i = 0; i < g.size(); ++i) {
        if (g.node(NodeId{i}).name == name) return NodeId{i};
    }
    ADD_FAILURE() << "no node named " << name;
    return NodeId{};
}

std::vector<std::string> names(const Graph& g, const Tape& t) {
    std::vector<std::string> out;
    for (NodeId id : t.order) out.push_back(g.node(id).name);
    return out;
}

// The tempting variant that appends a node before visiting its children.
std::vector<NodeId> preorder_dfs(const Graph& g, NodeId seed) {
    std::vector<NodeId> out;
    std::vector<char> seen(g.size(), 0);
    std::function<void(NodeId)> visit = [&](NodeId id) {
        seen[id.index] = 1;
        out.push_back(id);
        for (NodeId c : g.node(id).children) {
            if (!seen[c.index]) visit(c);
        }
    };
    visit(seed);
    return out;
}

TEST(OrderingTest, ForwardTapeOfWorkedExample) {
    Graph g;
    build_example(g);
    const Tape t = forward_tape(g, id_of(g, "x1"));
    EXPECT_EQ(names(g, t), (std::vector<std::string>{"x1", "v1", "v2", "v4", "v5"}));
    EXPECT_EQ(t.direction, TapeDirection::forward_from_seed);
    EXPECT_EQ(t.anchor, id_of(g, "x1"));
    EXPECT_TRUE(check_tape(g, t));
}

TEST(OrderingTest, PreorderCounterexampleIsRejected) {
    Graph g;
    build_example(g);
    const NodeId x1 = id_of(g, "x1");
    Tape bad{preorder_dfs(g, x1), TapeDirection::forward_from_seed, x1};
    EXPECT_EQ(names(g, bad), (std::vector<std::string>{"x1", "v1", "v4", "v5", "v2"}));
    EXPECT_FALSE(check_tape(g, bad));

    // our tape never places v2 after its child v4
    const Tape good = forward_tape(g, x1);
    auto pos = [&](const std::string& n) {
        return std::find(good.order.begin(), good.order.end(), id_of(g, n)) - good.order.begin();
    };
    EXPECT_LT(pos("v2"), pos("v4"));
}

TEST(OrderingTest, SinkSeedGivesSingleton) {
    Graph g;
    const NodeId y = build_example(g);
    const Tape t = forward_tape(g, y);
    EXPECT_EQ(t.order, std::vector<NodeId>{y});
    EXPECT_TRUE(check_tape(g, t));
}

TEST(OrderingTest, ReverseTapeOfWorkedExample) {
    Graph g;
    const NodeId y = build_example(g);
    const Tape t = reverse_tape(g, y);
    EXPECT_EQ(t.order.front(), y);
    EXPECT_EQ(t.order.size(), 7u);
    EXPECT_TRUE(check_tape(g, t));

    // another valid order; validated by the checker, not by sequence
    Tape alternative{{}, TapeDirection::reverse_from_output, y};
    for (const char* n : {"v5", "v4", "v1", "v2", "v3", "x2", "x1"}) alternative.order.push_back(id_of(g, n));
    EXPECT_TRUE(check_tape(g, alternative));
}

TEST(OrderingTest, ReverseTapeOfLeaf) {
    Graph g;
    build_example(g);
    const NodeId x1 = id_of(g, "x1");
    const Tape t = reverse_tape(g, x1);
    EXPECT_EQ(t.order, std::vector<NodeId>{x1});
    EXPECT_TRUE(check_tape(g, t));
}

TEST(OrderingTest, CheckTapeRejectsMalformedTapes) {
    Graph g;
    const NodeId y = build_example(g);
    const NodeId x1 = id_of(g, "x1");
    Tape t = forward_tape(g, x1);

    Tape missing_anchor = t;
    missing_anchor.order.erase(missing_anchor.order.begin());
    EXPECT_FALSE(check_tape(g, missing_anchor));

    Tape wrong_anchor = t;
    wrong_anchor.anchor = id_of(g, "x2");
    EXPECT_FALSE(check_tape(g, wrong_anchor));

    Tape duplicate = t;
    duplicate.order.push_back(y);
    EXPECT_FALSE(check_tape(g, duplicate));

    Tape extra = t;
    extra.order.push_back(id_of(g, "v3"));
    EXPECT_FALSE(check_tape(g, extra));

    Tape short_tape = t;
    short_tape.order.pop_back();
    EXPECT_FALSE(check_tape(g, short_tape));

    Tape out_of_range = t;
    out_of_range.order.push_back(NodeId{99});
    EXPECT_FALSE(check_tape(g, out_of_range));

    EXPECT_FALSE(check_tape(g, Tape{{}, TapeDirection::forward_from_seed, x1}));

    Tape wrong_direction = t;
    wrong_direction.direction = TapeDirection::reverse_from_output;
    EXPECT_FALSE(check_tape(g, wrong_direction));
}

TEST(OrderingTest, InvalidAnchorThrows) {
    Graph g;
    build_example(g);
    EXPECT_THROW(forward_tape(g, NodeId{42}), invalid_node);
    EXPECT_THROW(reverse_tape(g, NodeId{42}), invalid_node);
}

TEST(OrderingTest, RandomGraphsProduceValidDeterministicTapes) {
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        const auto r = random_expression(seed, 8, 1 + static_cast<int>(seed % 6));
        const LoweredGraph lg = lower(*r.expr, r.bindings);
        for (NodeId x : lg.graph.variables()) {
            const Tape t = forward_tape(lg.graph, x);
            ASSERT_TRUE(check_tape(lg.graph, t)) << "seed " << seed;
            ASSERT_EQ(t.order, forward_tape(lg.graph, x).order);
        }
        const Tape rt = reverse_tape(lg.graph, lg.output);
        ASSERT_TRUE(check_tape(lg.graph, rt)) << "seed " << seed;
        ASSERT_EQ(rt.order, reverse_tape(lg.graph, lg.output).order);
        // every node of a lowered expression feeds the output
        ASSERT_EQ(rt.order.size(), lg.graph.size());
    }
}

TEST(OrderingTest, DeepChainDoesNotOverflow) {
    Graph g;
    const NodeId x = g.new_variable("x", 0.3);
    NodeId v = x;
    constexpr std::size_t depth = 200000;
    for (std::size_t i = 0; i < depth; ++i) v = sin(g, v);
    const Tape ft = forward_tape(g, x);
    EXPECT_EQ(ft.order.size(), depth + 1);
    EXPECT_EQ(ft.order.back(), v);
    EXPECT_TRUE(check_tape(g, ft));
    const Tape rt = reverse_tape(g, v);
    EXPECT_EQ(rt.order.size(), depth + 1);
    EXPECT_EQ(rt.order.back(), x);
    EXPECT_TRUE(check_tape(g, rt));
}

} // namespace
} // namespace tapead
