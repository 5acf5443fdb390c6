#pragma once

#include <stdexcept>
#include <string>

namespace flock {

struct FlockError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Antiderivative of a kernel image failed to close periodically.
struct PeriodicityError : FlockError {
  using FlockError::FlockError;
};

/// Nonpositive density where a positive one is required.
struct SingularityError : FlockError {
  using FlockError::FlockError;
};

struct DomainError : FlockError {
  using FlockError::FlockError;
};

/// Operation not defined for this kernel variant.
struct VariantError : FlockError {
  using FlockError::FlockError;
};

/// A mathematically guaranteed inequality failed beyond tolerance.
struct InvariantError : FlockError {
  using FlockError::FlockError;
};

/// A theorem's smallness precondition is violated.
struct SmallnessViolation : FlockError {
  SmallnessViolation(const std::string& what, double value, double threshold)
      : FlockError(what), value(value), threshold(threshold) {}
  double value;
  double threshold;
};

struct PositivityError : FlockError {
  using FlockError::FlockError;
};

struct StepLimitError : FlockError {
  using FlockError::FlockError;
};

/// Fourier tail bound insufficient to certify a scanned maximum.
struct TailError : FlockError {
  using FlockError::FlockError;
};

struct InsufficientTailError : FlockError {
  using FlockError::FlockError;
};

struct ConfigError : FlockError {
  using FlockError::FlockError;
};

}  // namespace flock
