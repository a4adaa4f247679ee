#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace qcayley {

/// Operand dimensions do not agree.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A physical or numerical parameter is outside its admissible range.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An operation was invoked outside its contract (e.g. a nonlinear model
/// handed to a linear propagator).
class UsageError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// An object is not in the state an operation requires.
class StateError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Non-finite or otherwise unusable numbers were produced.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The shifted matrix I - Omega/2 is singular to working precision.
class SingularityError : public NumericError {
 public:
  explicit SingularityError(const std::string& what,
                            std::optional<double> time = std::nullopt)
      : NumericError(time ? what + " (step time " + std::to_string(*time) + ")"
                          : what),
        time_(time) {}

  std::optional<double> time() const { return time_; }

 private:
  std::optional<double> time_;
};

}  // namespace qcayley
