#pragma once

#include <stdexcept>
#include <string>

namespace llespec {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or out-of-range input (driver fields, sizes, domains, poles).
class ValidationError : public Error {
 public:
  using Error::Error;
};

class DomainError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// A numerical procedure failed to converge or met a singular step.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class DegeneracyError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class PrecisionError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// A configured size limit was exceeded.
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// Process exit code for an error: 2 validation, 3 numerical, 4 capacity.
int exit_code_for(const Error& e) noexcept;

}  // namespace llespec
