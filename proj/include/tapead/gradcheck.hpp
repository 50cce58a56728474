#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "tapead/ast.hpp"
#include "tapead/finite_difference.hpp"
#include "tapead/lower.hpp"
#include "tapead/reverse_mode.hpp"

namespace tapead {

// |a - b| / max(1, |a|, |b|)
inline double relative_error(double a, double b) {
    return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

struct VariableCheck {
    std::string name;
    double ad_value = 0.0;
    double fd_value = 0.0;
    double rel_error = 0.0;
};

struct CheckReport {
    std::vector<VariableCheck> variables;
    bool pass = true;
    double tolerance = 0.0;
};

// Compares one reverse pass against central differences for every variable
// of the expression, with step 1e-6 * max(1, |x|).
inline CheckReport check_gradient(const ast::Expr& expr, const Bindings& bindings, double tolerance) {
    if (!(tolerance > 0.0)) {
        throw std::invalid_argument("tolerance must be positive");
    }
    LoweredGraph lowered = lower(expr, bindings);
    const NodeValues adjoints = reverse_derivatives(lowered.graph, lowered.output);

    CheckReport report;
    report.tolerance = tolerance;
    for (NodeId id : lowered.graph.variables()) {
        const std::string& name = lowered.graph.node(id).name;
        const double x = lowered.graph.node(id).value;
        const double h = 1e-6 * std::max(1.0, std::abs(x));
        double fd = 0.0;
        try {
            fd = finite_difference(expr, bindings, name, h);
        } catch (const domain_error& e) {
            throw domain_error("finite difference in '" + name + "': " + e.what());
        }
        VariableCheck c{name, adjoints[id], fd, relative_error(adjoints[id], fd)};
        report.pass = report.pass && c.rel_error <= tolerance;
        report.variables.push_back(std::move(c));
    }
    return report;
}

struct RandomExpression {
    ast::ExprPtr expr;
    Bindings bindings;
};

namespace detail {

// Margin kept from every domain boundary so that perturbed evaluations used
// by finite differences stay valid and well conditioned.
inline constexpr double domain_margin = 0.05;
inline constexpr double magnitude_limit = 1e6;
// sin/cos of a huge argument oscillates too fast for central differences
inline constexpr double trig_argument_limit = 100.0;

// Evaluates like ast::evaluate but reports failure instead of throwing and
// also rejects points near a domain boundary or with huge intermediates.
inline std::optional<double> guarded_evaluate(const ast::Expr& e, const Bindings& b) {
    auto ok = [](double v) -> std::optional<double> {
        if (!std::isfinite(v) || std::abs(v) > magnitude_limit) return std::nullopt;
        return v;
    };
    return std::visit(
        [&](const auto& x) -> std::optional<double> {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, ast::Literal>) {
                return x.value;
            } else if constexpr (std::is_same_v<T, ast::Variable>) {
                return b.at(x.name);
            } else if constexpr (std::is_same_v<T, ast::Unary>) {
                auto a = guarded_evaluate(*x.operand, b);
                if (!a) return std::nullopt;
                return -*a;
            } else if constexpr (std::is_same_v<T, ast::Binary>) {
                auto a = guarded_evaluate(*x.lhs, b);
                if (!a) return std::nullopt;
                if (x.op == ast::BinaryOp::pow) {
                    const double c = std::get<ast::Literal>(x.rhs->node).value;
                    const bool integral = std::trunc(c) == c;
                    if ((!integral && *a < domain_margin) || (c < 0 && std::abs(*a) < domain_margin)) {
                        return std::nullopt;
                    }
                    return ok(std::pow(*a, c));
                }
                auto r = guarded_evaluate(*x.rhs, b);
                if (!r) return std::nullopt;
                switch (x.op) {
                case ast::BinaryOp::add: return ok(*a + *r);
                case ast::BinaryOp::sub: return ok(*a - *r);
                case ast::BinaryOp::mul: return ok(*a * *r);
                case ast::BinaryOp::div:
                    if (std::abs(*r) < domain_margin) return std::nullopt;
                    return ok(*a / *r);
                case ast::BinaryOp::pow: break;
                }
                return std::nullopt;
            } else {
                auto a = guarded_evaluate(*x.arg, b);
                if (!a) return std::nullopt;
                switch (x.func) {
                case ast::Function::log:
                    if (*a < domain_margin) return std::nullopt;
                    return ok(std::log(*a));
                case ast::Function::sin:
                case ast::Function::cos:
                    if (std::abs(*a) > trig_argument_limit) return std::nullopt;
                    return x.func == ast::Function::sin ? std::sin(*a) : std::cos(*a);
                case ast::Function::exp: return ok(std::exp(*a));
                }
                return std::nullopt;
            }
        },
        e.node);
}

class ExpressionGenerator {
public:
    ExpressionGenerator(std::uint64_t seed, int n_vars) : rng_(seed), n_vars_(n_vars) {}

    ast::ExprPtr tree(int depth) {
        if (depth <= 1 || chance(0.15)) {
            return leaf();
        }
        switch (pick(10)) {
        case 0:
        case 1: return ast::binary(ast::BinaryOp::add, tree(depth - 1), tree(depth - 1));
        case 2: return ast::binary(ast::BinaryOp::sub, tree(depth - 1), tree(depth - 1));
        case 3:
        case 4: return ast::binary(ast::BinaryOp::mul, tree(depth - 1), tree(depth - 1));
        case 5: return ast::binary(ast::BinaryOp::div, tree(depth - 1), tree(depth - 1));
        case 6: return ast::unary(ast::UnaryOp::neg, tree(depth - 1));
        case 7: {
            static constexpr double exponents[] = {2.0, 3.0, 0.5, -1.0};
            return ast::binary(ast::BinaryOp::pow, tree(depth - 1), ast::literal(exponents[pick(4)]));
        }
        default: {
            static constexpr ast::Function funcs[] = {ast::Function::log, ast::Function::sin, ast::Function::cos,
                                                      ast::Function::exp};
            return ast::call(funcs[pick(4)], tree(depth - 1));
        }
        }
    }

    Bindings point() {
        Bindings b;
        std::uniform_real_distribution<double> u(-2.0, 2.0);
        for (int i = 1; i <= n_vars_; ++i) {
            b["x" + std::to_string(i)] = u(rng_);
        }
        return b;
    }

private:
    ast::ExprPtr leaf() {
        if (chance(0.8)) {
            return ast::variable("x" + std::to_string(1 + pick(static_cast<unsigned>(n_vars_))));
        }
        // short literals keep printed expressions readable
        std::uniform_int_distribution<int> tenths(1, 30);
        return ast::literal(tenths(rng_) / 10.0);
    }

    bool chance(double p) { return std::bernoulli_distribution(p)(rng_); }

    unsigned pick(unsigned n) { return std::uniform_int_distribution<unsigned>(0, n - 1)(rng_); }

    std::mt19937_64 rng_;
    int n_vars_;
};

} // namespace detail

// Deterministic random expression over variables x1..x{n_vars} with a point
// in [-2, 2]^n at which every sub-expression is finite, at most 1e6 in
// magnitude and away from log/div/pow domain boundaries. Candidates failing
// these checks are rejected and redrawn.
inline RandomExpression random_expression(std::uint64_t rng_seed, int max_depth, int n_vars) {
    if (max_depth < 1 || n_vars < 1) {
        throw std::invalid_argument("random_expression needs max_depth >= 1 and n_vars >= 1");
    }
    constexpr int max_attempts = 100;
    detail::ExpressionGenerator gen(rng_seed, n_vars);
    for (int attempt = 0; attempt < max_attempts; ++attempt) {
        RandomExpression r{gen.tree(max_depth), gen.point()};
        if (detail::guarded_evaluate(*r.expr, r.bindings)) {
            return r;
        }
    }
    throw generation_failed("no in-domain expression after " + std::to_string(max_attempts) + " attempts (seed " +
                            std::to_string(rng_seed) + ")");
}

} // namespace tapead
