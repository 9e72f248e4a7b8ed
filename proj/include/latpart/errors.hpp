#pragma once

#include <stdexcept>
#include <string>

namespace latpart {

// Thrown when a lattice shape precondition fails (bad dimension, side not a
// power of two where required, index budget exceeded).
struct shape_error : std::runtime_error {
    explicit shape_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Out-of-bounds rectangle or cell access.
struct bounds_error : std::out_of_range {
    explicit bounds_error(const std::string& msg) : std::out_of_range(msg) {}
};

// Invalid tuning parameter or operation argument.
struct param_error : std::invalid_argument {
    explicit param_error(const std::string& msg) : std::invalid_argument(msg) {}
};

// A constraint makes the requested fit impossible (e.g. minimum leaf size
// larger than the lattice).
struct infeasible_error : std::runtime_error {
    explicit infeasible_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed input file.
struct parse_error : std::runtime_error {
    explicit parse_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace latpart
