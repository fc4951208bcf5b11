#pragma once

#include <stdexcept>
#include <string>

namespace lar {

// Common base so callers can catch anything thrown by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside its mathematical domain (negative weight, bad index, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Normalizing a vector whose mass is zero (or numerically indistinguishable from it).
class ZeroMassError : public DomainError {
 public:
  using DomainError::DomainError;
};

// Importance weighting would divide by a zero play probability.
class DivisionDomainError : public DomainError {
 public:
  using DomainError::DomainError;
};

// Invalid or inconsistent experiment configuration. The message lists every
// violation found, one per line, so users can fix a config in one pass.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// An iterative routine failed to converge to its stated tolerance.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// An exhaustive enumeration would exceed its documented size budget.
class BudgetError : public Error {
 public:
  using Error::Error;
};

// File or stream I/O failure.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace lar
