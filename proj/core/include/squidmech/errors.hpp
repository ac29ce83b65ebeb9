#pragma once

#include <stdexcept>
#include <string>

namespace squidmech {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input outside the mathematical domain of an operation (negative current,
/// S0 below the guard, non-positive field in a power-law fit, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// L_J diverges: S0 == 0, only reachable for a symmetric SQUID at half flux.
class SingularityError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Omega_m^2 <= 0: the Lorentz-force spring softened the string past zero.
class InstabilityError : public DomainError {
 public:
  using DomainError::DomainError;
};

class CalibrationError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// A fit parameter cannot be determined from the data supplied.
class IdentifiabilityError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Spectrum has no peak to fit.
class NoPeakError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// An iterative method failed to converge (oracle minimizer, controller).
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// Normal equations could not be solved even after damped retries.
class ConditioningError : public ConvergenceError {
 public:
  using ConvergenceError::ConvergenceError;
};

/// Feedback loop residual grew past its divergence threshold.
class LockDivergenceError : public ConvergenceError {
 public:
  using ConvergenceError::ConvergenceError;
};

/// Malformed configuration or input file.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace squidmech
