#pragma once

#include <stdexcept>
#include <string>

namespace spinmech {

// Base of everything this library throws. Harness maps subclasses to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidDimension : public Error {
 public:
  using Error::Error;
};

class SignatureMismatch : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class InvalidState : public Error {
 public:
  using Error::Error;
};

/// |Omega_p| >= delta_m: the parametric drive is above the instability threshold.
class InstabilityError : public Error {
 public:
  using Error::Error;
};

class DegenerateInput : public Error {
 public:
  using Error::Error;
};

class UnsupportedConfiguration : public Error {
 public:
  using Error::Error;
};

/// Trace/norm drift, non-Hermitian generator, step-count exhaustion.
class NumericalFailure : public Error {
 public:
  using Error::Error;
};

/// Fock truncation could not be validated (tail population too large).
class TruncationError : public NumericalFailure {
 public:
  using NumericalFailure::NumericalFailure;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace spinmech
