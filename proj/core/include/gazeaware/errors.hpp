#pragma once

#include <stdexcept>

namespace gazeaware {

// Failures discovered mid-computation (non-finite losses, diverging fits).
// The CLI maps these to exit code 2; input errors map to exit code 1.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace gazeaware
