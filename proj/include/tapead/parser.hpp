#pragma once

#include <cctype>
#include <charconv>
#include <cstddef>
#include <string>
#include <string_view>
#include <system_error>

#include "tapead/ast.hpp"
#include "tapead/error.hpp"

namespace tapead {

// Recursive-descent parser for the expression grammar
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := atom ('^' unary)?          exponent must reduce to a literal
//   atom    := number | identifier | func '(' expr ')' | '(' expr ')'
//   func    := 'log' | 'sin' | 'cos' | 'exp'
//
// Errors carry the byte offset of the offending token.
class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    ast::ExprPtr parse() {
        ast::ExprPtr e = expr();
        skip_space();
        if (pos_ != text_.size()) {
            fail("operator or end of input");
        }
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& expected) const { throw parse_error(pos_, expected); }

    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
            ++pos_;
        }
    }

    bool accept(char c) {
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    ast::ExprPtr expr() {
        ast::ExprPtr lhs = term();
        for (;;) {
            if (accept('+')) {
                lhs = ast::binary(ast::BinaryOp::add, lhs, term());
            } else if (accept('-')) {
                lhs = ast::binary(ast::BinaryOp::sub, lhs, term());
            } else {
                return lhs;
            }
        }
    }

    ast::ExprPtr term() {
        ast::ExprPtr lhs = unary();
        for (;;) {
            if (accept('*')) {
                lhs = ast::binary(ast::BinaryOp::mul, lhs, unary());
            } else if (accept('/')) {
                lhs = ast::binary(ast::BinaryOp::div, lhs, unary());
            } else {
                return lhs;
            }
        }
    }

    ast::ExprPtr unary() {
        if (accept('-')) {
            return ast::unary(ast::UnaryOp::neg, unary());
        }
        return power();
    }

    ast::ExprPtr power() {
        ast::ExprPtr base = atom();
        if (!accept('^')) {
            return base;
        }
        skip_space();
        const std::size_t exponent_at = pos_;
        ast::ExprPtr exponent = unary();
        if (std::holds_alternative<ast::Literal>(exponent->node)) {
            return ast::binary(ast::BinaryOp::pow, base, exponent);
        }
        // "x^-2": a negated literal folds into a negative literal
        if (const auto* u = std::get_if<ast::Unary>(&exponent->node)) {
            if (const auto* lit = std::get_if<ast::Literal>(&u->operand->node)) {
                return ast::binary(ast::BinaryOp::pow, base, ast::literal(-lit->value));
            }
        }
        pos_ = exponent_at;
        fail("numeric literal exponent after '^'");
    }

    ast::ExprPtr atom() {
        skip_space();
        if (pos_ >= text_.size()) {
            fail("number, variable, function call or '('");
        }
        const char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            ast::ExprPtr inner = expr();
            if (!accept(')')) {
                fail("')'");
            }
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            return number();
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            return identifier();
        }
        fail("number, variable, function call or '('");
    }

    ast::ExprPtr number() {
        const std::size_t start = pos_;
        auto digits = [&] {
            std::size_t n = 0;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                ++pos_;
                ++n;
            }
            return n;
        };
        std::size_t mantissa = digits();
        if (pos_ < text_.size() && text_[pos_] == '.') {
            ++pos_;
            mantissa += digits();
        }
        if (mantissa == 0) {
            pos_ = start;
            fail("number");
        }
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            ++pos_;
            if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) {
                ++pos_;
            }
            if (digits() == 0) {
                fail("exponent digits");
            }
        }
        double value = 0.0;
        const char* first = text_.data() + start;
        const char* last = text_.data() + pos_;
        auto [end, ec] = std::from_chars(first, last, value);
        if (ec != std::errc{} || end != last) {
            pos_ = start;
            fail("representable number");
        }
        return ast::literal(value);
    }

    ast::ExprPtr identifier() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
            ++pos_;
        }
        const std::string_view name = text_.substr(start, pos_ - start);

        ast::Function f{};
        bool is_function = true;
        if (name == "log") f = ast::Function::log;
        else if (name == "sin") f = ast::Function::sin;
        else if (name == "cos") f = ast::Function::cos;
        else if (name == "exp") f = ast::Function::exp;
        else is_function = false;

        if (is_function) {
            if (!accept('(')) {
                fail("'(' after " + std::string(name));
            }
            ast::ExprPtr arg = expr();
            if (!accept(')')) {
                fail("')'");
            }
            return ast::call(f, arg);
        }
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == '(') {
            pos_ = start;
            fail("known function (log, sin, cos, exp)");
        }
        return ast::variable(std::string(name));
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

inline ast::ExprPtr parse(std::string_view text) { return Parser(text).parse(); }

} // namespace tapead
