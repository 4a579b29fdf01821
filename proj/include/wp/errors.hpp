#pragma once

#include <stdexcept>
#include <string>

namespace wp {

// Bad arguments or inputs violating a documented precondition.
struct domain_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Numeric failure: truncation budget exceeded, divergent series, no convergence.
struct numeric_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Resource guard tripped (tree explosion, retry caps).
struct resource_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed experiment configuration.
struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace wp
