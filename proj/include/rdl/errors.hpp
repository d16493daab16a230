#pragma once

#include <stdexcept>
#include <string>

namespace rdl {

/// Vector/mode-count mismatch between arguments.
struct dimension_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Argument outside the mathematical domain of an operation.
struct domain_error : std::domain_error {
  using std::domain_error::domain_error;
};

/// Invalid scheme / experiment configuration.
struct config_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Internal numeric failure (non-convergence, runaway loops).
struct numeric_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline void require_same_length(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw dimension_error(std::string(what) + ": length mismatch (" + std::to_string(a) +
                          " vs " + std::to_string(b) + ")");
  }
}

}  // namespace rdl
