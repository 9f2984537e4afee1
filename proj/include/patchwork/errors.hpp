#pragma once

#include <stdexcept>
#include <string>

namespace patchwork {

struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct CapacityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParseError : std::runtime_error {
    ParseError(const std::string &msg, int line = 0)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + msg : msg), line(line) {}
    int line;
};

// Raised when a requested configuration cannot be realised (error budget
// unreachable, footprint does not fit, ...).
struct InfeasibleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IllegalOpError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvariantError : std::logic_error {
    using std::logic_error::logic_error;
};

}  // namespace patchwork
