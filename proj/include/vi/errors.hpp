#pragma once

#include <stdexcept>
#include <string>

namespace vi {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on the arguments of an operation was violated
/// (mismatched spaces, malformed sets, out-of-range parameters).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

/// The problem / parameter combination cannot be run by the requested
/// algorithm (missing Lipschitz constant, missing viscosity map, ...).
class ConfigurationError : public Error {
 public:
  using Error::Error;
};

/// A non-finite value appeared inside an iteration.
class NumericalError : public Error {
 public:
  NumericalError(std::string step, const std::string& what)
      : Error("non-finite value in step '" + step + "': " + what),
        step_(std::move(step)) {}

  const std::string& step() const noexcept { return step_; }

 private:
  std::string step_;
};

/// Backtracking did not find an admissible step within the trial cap.
class LineSearchError : public Error {
 public:
  using Error::Error;
};

}  // namespace vi
