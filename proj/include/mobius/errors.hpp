#pragma once

#include <stdexcept>
#include <string>

namespace mobius {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: bad JSON, zero strength, duplicate labels, bad config.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Two lifted vortices closer than the collision radius.
class CollisionError : public Error {
 public:
  explicit CollisionError(const std::string& what, double time = 0.0)
      : Error(what), time_(time) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

/// Parameters outside the domain of a closed-form result.
class DomainError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// Equatorial Newton iterate left the ordered chamber 0 < x2 < ... < xN < pi.
class OrderingViolation : public ConvergenceError {
 public:
  using ConvergenceError::ConvergenceError;
};

/// Adaptive step size underflowed.
class StepFailure : public ConvergenceError {
 public:
  explicit StepFailure(const std::string& what, double time = 0.0)
      : ConvergenceError(what), time_(time) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

/// Evaluation at a singular point of the reduced two-vortex system.
class SingularityError : public Error {
 public:
  using Error::Error;
};

/// No first return of a reduced orbit before t_max (orbit at or near a separatrix).
class SeparatrixTimeout : public ConvergenceError {
 public:
  using ConvergenceError::ConvergenceError;
};

/// File could not be read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace mobius
