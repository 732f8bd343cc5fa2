#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cibnet {

/// Base class for recoverable pipeline failures.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid parameters or configuration (CLI exit code 2).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent input data (CLI exit code 3).
class DataError : public Error {
 public:
  using Error::Error;
};

/// Power iteration did not reach the requested tolerance (CLI exit code 4).
class ConvergenceError : public Error {
 public:
  ConvergenceError(std::size_t iterations, double residual)
      : Error("power iteration did not converge after " + std::to_string(iterations) +
              " iterations (residual " + std::to_string(residual) + ")"),
        iterations_(iterations),
        residual_(residual) {}

  std::size_t iterations() const noexcept { return iterations_; }
  double residual() const noexcept { return residual_; }

 private:
  std::size_t iterations_;
  double residual_;
};

/// A caller broke an operation's documented precondition.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace cibnet
