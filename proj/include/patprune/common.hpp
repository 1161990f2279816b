#pragma once

#include <stdexcept>
#include <string>

namespace patprune {

#ifdef PATPRUNE_SINGLE_PRECISION
using real_t = float;
#else
using real_t = double;
#endif

// Shape disagreement between operands.
struct dimension_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Invalid or inconsistent configuration value.
struct config_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Operation invoked in a state that does not admit it.
struct state_error : std::logic_error {
    using std::logic_error::logic_error;
};

// Caller violated an operation contract.
struct contract_error : std::logic_error {
    using std::logic_error::logic_error;
};

// Non-finite value encountered where a finite one is required.
struct numeric_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad user-provided data (tokens, labels, ids).
struct input_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Malformed file content.
struct parse_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Filesystem-level failure.
struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace patprune
