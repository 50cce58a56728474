#include <string>

#include <gtest/gtest.h>

#include "tapead/ast.hpp"
#include "tapead/gradcheck.hpp"
#include "tapead/lower.hpp"
#include "tapead/parser.hpp"

namespace tapead {
namespace {

using namespace ast;

std::size_t error_offset(const std::string& text) {
    try {
        parse(text);
    } catch (const parse_error& e) {
        return e.offset();
    }
    ADD_FAILURE() << "'" << text << "' parsed";
    return static_cast<std::size_t>(-1);
}

TEST(ParserTest, WorkedExampleStructure) {
    const ExprPtr e = parse("log(x1) + x1*x2 - sin(x2)");
    const ExprPtr expected = binary(BinaryOp::sub,
                                    binary(BinaryOp::add, call(Function::log, variable("x1")),
                                           binary(BinaryOp::mul, variable("x1"), variable("x2"))),
                                    call(Function::sin, variable("x2")));
    EXPECT_EQ(*e, *expected);
}

TEST(ParserTest, UnaryMinusBindsLooserThanPower) {
    EXPECT_EQ(*parse("-x^2"), *unary(UnaryOp::neg, binary(BinaryOp::pow, variable("x"), literal(2))));
    EXPECT_EQ(*parse("(-x)^2"), *binary(BinaryOp::pow, unary(UnaryOp::neg, variable("x")), literal(2)));
}

TEST(ParserTest, PrecedenceAndAssociativity) {
    EXPECT_EQ(*parse("a - b - c"),
              *binary(BinaryOp::sub, binary(BinaryOp::sub, variable("a"), variable("b")), variable("c")));
    EXPECT_EQ(*parse("a / b * c"),
              *binary(BinaryOp::mul, binary(BinaryOp::div, variable("a"), variable("b")), variable("c")));
    EXPECT_EQ(*parse("a + b * c"),
              *binary(BinaryOp::add, variable("a"), binary(BinaryOp::mul, variable("b"), variable("c"))));
    EXPECT_EQ(*parse("-a * b"), *binary(BinaryOp::mul, unary(UnaryOp::neg, variable("a")), variable("b")));
    EXPECT_EQ(*parse("x^-1"), *binary(BinaryOp::pow, variable("x"), literal(-1)));
    EXPECT_EQ(*parse("x^(0.5)"), *binary(BinaryOp::pow, variable("x"), literal(0.5)));
}

TEST(ParserTest, WhitespaceAndLiterals) {
    EXPECT_EQ(*parse("  3*x_1  "), *binary(BinaryOp::mul, literal(3), variable("x_1")));
    EXPECT_EQ(*parse("1.5e-3"), *literal(1.5e-3));
    EXPECT_EQ(*parse(".25"), *literal(0.25));
    EXPECT_EQ(*parse("exp(\tcos(y)\n)"), *call(Function::exp, call(Function::cos, variable("y"))));
}

TEST(ParserTest, ErrorsCarryOffsets) {
    EXPECT_EQ(error_offset("x1 +"), 4u);
    EXPECT_EQ(error_offset(""), 0u);
    EXPECT_EQ(error_offset("(x"), 2u);
    EXPECT_EQ(error_offset("x y"), 2u);
    EXPECT_EQ(error_offset("x ^ y"), 4u);  // exponent must be a literal
    EXPECT_EQ(error_offset("x^2^3"), 2u);
    EXPECT_EQ(error_offset("tan(x)"), 0u); // unknown function
    EXPECT_EQ(error_offset("sin x"), 4u);
    EXPECT_EQ(error_offset("2x"), 1u);     // no implicit multiplication
    EXPECT_EQ(error_offset("1e"), 2u);
    EXPECT_EQ(error_offset("x $ 1"), 2u);
}

TEST(ParserTest, ErrorMessageNamesExpectation) {
    try {
        parse("x1 +");
        FAIL();
    } catch (const parse_error& e) {
        EXPECT_NE(std::string(e.what()).find("offset 4"), std::string::npos);
        EXPECT_NE(e.expected().find("variable"), std::string::npos);
    }
}

TEST(ParserTest, PrinterUsesMinimalParentheses) {
    EXPECT_EQ(to_string(*parse("log(x1) + x1*x2 - sin(x2)")), "log(x1) + x1 * x2 - sin(x2)");
    EXPECT_EQ(to_string(*parse("a - (b - c)")), "a - (b - c)");
    EXPECT_EQ(to_string(*parse("(a - b) - c")), "a - b - c");
    EXPECT_EQ(to_string(*parse("-(x^2)")), "-x^2");
    EXPECT_EQ(to_string(*parse("(-x)^2")), "(-x)^2");
    EXPECT_EQ(to_string(*parse("(x^2)^3")), "(x^2)^3");
    EXPECT_EQ(to_string(*parse("x^-1")), "x^-1");
}

TEST(LowerTest, WorkedExample) {
    const LoweredGraph lg = lower(*parse("log(x1) + x1*x2 - sin(x2)"), {{"x1", 2.0}, {"x2", 5.0}});
    EXPECT_EQ(lg.graph.size(), 7u);
    EXPECT_NEAR(lg.graph[lg.output].value, 11.652, 5e-4);
    // variables come first, in order of appearance
    EXPECT_EQ(lg.graph[NodeId{0}].name, "x1");
    EXPECT_EQ(lg.graph[NodeId{1}].name, "x2");
    // operations are numbered by depth: sin is v3, the sum v4
    EXPECT_EQ(lg.graph[lg.output].name, "v5");
    for (const Node& n : lg.graph.nodes()) {
        if (n.name == "v3") {
            EXPECT_EQ(n.op.kind, OpKind::sin);
        }
        if (n.name == "v4") {
            EXPECT_EQ(n.op.kind, OpKind::add);
        }
    }
}

TEST(LowerTest, VariablesAreShared) {
    const LoweredGraph lg = lower(*parse("x + x"), {{"x", 1.0}});
    EXPECT_EQ(lg.graph.size(), 2u);
    EXPECT_EQ(lg.graph[lg.output].value, 2.0);
    EXPECT_EQ(lg.graph[lg.output].parents[0], lg.graph[lg.output].parents[1]);
}

TEST(LowerTest, NoCommonSubexpressionMerging) {
    const LoweredGraph lg = lower(*parse("sin(x) + sin(x)"), {{"x", 1.0}});
    EXPECT_EQ(lg.graph.size(), 4u);
}

TEST(LowerTest, ConstantsAndPowers) {
    const LoweredGraph lg = lower(*parse("3*x^2"), {{"x", 2.0}});
    EXPECT_EQ(lg.graph.size(), 4u); // x, 3, pow, mul: the exponent is not a node
    EXPECT_EQ(lg.graph[lg.output].value, 12.0);
}

TEST(LowerTest, Errors) {
    EXPECT_THROW(lower(*parse("log(x)"), {{"x", -1.0}}), domain_error);
    EXPECT_THROW(lower(*parse("x / (y - y)"), {{"x", 1.0}, {"y", 2.0}}), domain_error);
    try {
        lower(*parse("x + z"), {{"x", 1.0}});
        FAIL();
    } catch (const unbound_variable& e) {
        EXPECT_EQ(e.name(), "z");
    }
    EXPECT_THROW(evaluate(*parse("x + z"), {{"x", 1.0}}), unbound_variable);
}

TEST(LowerTest, ExtraBindingsAreIgnored) {
    const LoweredGraph lg = lower(*parse("2"), {{"x", 1.0}});
    EXPECT_EQ(lg.graph.size(), 1u);
    EXPECT_TRUE(lg.graph.variables().empty());
}

// print -> parse is the identity on trees, and lowering evaluates exactly
// like the direct interpreter.
TEST(ParserPropertyTest, RoundTripAndEvaluationEquivalence) {
    for (std::uint64_t seed = 0; seed < 500; ++seed) {
        const auto r = random_expression(seed, 8, 1 + static_cast<int>(seed % 6));
        const std::string text = to_string(*r.expr);
        const ExprPtr reparsed = parse(text);
        ASSERT_EQ(*reparsed, *r.expr) << text;
        ASSERT_EQ(to_string(*reparsed), text);

        const LoweredGraph lg = lower(*r.expr, r.bindings);
        ASSERT_EQ(lg.graph[lg.output].value, evaluate(*r.expr, r.bindings)) << text;
    }
}

TEST(ParserPropertyTest, DistinctVariablesMapToOneNodeEach) {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const auto r = random_expression(seed, 6, 3);
        const LoweredGraph lg = lower(*r.expr, r.bindings);
        const std::string text = to_string(*r.expr);
        std::size_t distinct = 0;
        for (const auto& [name, value] : r.bindings) {
            // names are x1..x3, never prefixes of each other
            if (text.find(name) != std::string::npos) ++distinct;
        }
        ASSERT_EQ(lg.graph.variables().size(), distinct) << text;
    }
}

} // namespace
} // namespace tapead
