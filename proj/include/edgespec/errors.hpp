#pragma once

#include <stdexcept>
#include <string>

namespace edgespec {

// Raised when a configuration file or flag cannot be parsed or fails validation.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// A computation that cannot be completed within the configured budgets
// (spectrum length, eigenpair count) or for which the input admits no answer.
class InfeasibleError : public std::runtime_error {
 public:
  explicit InfeasibleError(const std::string& msg) : std::runtime_error(msg) {}
};

// The boundary spectrum does not reach the cutoff a computation needs.
class SpectrumIncompleteError : public InfeasibleError {
 public:
  explicit SpectrumIncompleteError(const std::string& msg) : InfeasibleError(msg) {}
};

// N(lambda) == 0, so the eigenfunction density is undefined.
class EmptySpectrumError : public InfeasibleError {
 public:
  explicit EmptySpectrumError(const std::string& msg) : InfeasibleError(msg) {}
};

}  // namespace edgespec

namespace edgespec {

// Inverse iteration failed to reach the residual tolerance, even after a retry.
class ConvergenceError : public std::runtime_error {
 public:
  explicit ConvergenceError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace edgespec
