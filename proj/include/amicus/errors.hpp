#pragma once

#include <stdexcept>

namespace amicus {

// Bad inputs: malformed files, invalid configuration, violated preconditions.
// The CLI maps these to exit code 2.
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Failures during computation (non-finite targets, degenerate parameters).
// The CLI maps these to exit code 3.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace amicus
