#pragma once

#include <stdexcept>
#include <string>

namespace qamht {

/// Base of every error thrown by the library. `exit_code()` is the process
/// exit status the command-line tool reports for this category.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  [[nodiscard]] virtual int exit_code() const noexcept { return 1; }
};

/// Usage error: invalid flag combination or missing argument.
class UsageError : public Error {
 public:
  using Error::Error;
  [[nodiscard]] int exit_code() const noexcept override { return 2; }
};

/// Malformed or out-of-contract input data.
class InputError : public Error {
 public:
  using Error::Error;
  [[nodiscard]] int exit_code() const noexcept override { return 3; }
};

/// Configuration that violates a solver guard (step size, shape mismatch).
class ConfigError : public InputError {
 public:
  using InputError::InputError;
};

/// Problem too large for the selected backend.
class CapacityError : public Error {
 public:
  using Error::Error;
  [[nodiscard]] int exit_code() const noexcept override { return 4; }
};

/// Integration or factorization produced a non-physical / non-finite result.
class NumericalError : public Error {
 public:
  using Error::Error;
  [[nodiscard]] int exit_code() const noexcept override { return 5; }
};

}  // namespace qamht
