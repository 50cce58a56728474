#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tapead/ast.hpp"
#include "tapead/lower.hpp"

namespace tapead::cli {

enum exit_code : int {
    ok = 0,
    check_failed = 1,
    parse_failure = 2,
    unbound = 3,
    domain = 4,
    unknown_wrt = 5,
    write_failure = 6,
    usage = 64,
};

enum class Mode { forward, reverse };

class usage_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class unknown_variable : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// "x1=2,x2=5" -> {x1: 2, x2: 5}. Throws usage_error on malformed input.
Bindings parse_bindings(std::string_view text);

struct GradientResult {
    double value = 0.0;
    std::vector<std::pair<std::string, double>> gradient; // variable creation order
    Mode mode = Mode::reverse;
    std::uint64_t passes = 0; // tape traversals used
};

// Reverse mode: one pass for all variables (`wrt` is only validated).
// Forward mode: one pass for `wrt`, or one pass per variable without it.
GradientResult compute_gradient(LoweredGraph& lowered, Mode mode, const std::optional<std::string>& wrt);

// Entry point shared by the executable and the tests; returns the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace tapead::cli
