#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tapead {

// Base class for every error raised by the library.
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class duplicate_variable : public error {
public:
    explicit duplicate_variable(const std::string& name)
        : error("duplicate variable '" + name + "'"), name_(name) {}

    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

// A primal operation left the real domain (log of a non-positive value,
// division by zero, non-finite result, ...).
class domain_error : public error {
public:
    using error::error;
};

class seed_not_variable : public error {
public:
    using error::error;
};

class invalid_node : public error {
public:
    using error::error;
};

class unbound_variable : public error {
public:
    explicit unbound_variable(const std::string& name)
        : error("unbound variable '" + name + "'"), name_(name) {}

    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

class parse_error : public error {
public:
    parse_error(std::size_t offset, const std::string& expected)
        : error("parse error at offset " + std::to_string(offset) + ": expected " + expected),
          offset_(offset), expected_(expected) {}

    std::size_t offset() const noexcept { return offset_; }
    const std::string& expected() const noexcept { return expected_; }

private:
    std::size_t offset_;
    std::string expected_;
};

class generation_failed : public error {
public:
    using error::error;
};

} // namespace tapead
