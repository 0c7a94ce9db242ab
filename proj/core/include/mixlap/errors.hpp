#pragma once

#include <stdexcept>
#include <string>

namespace mixlap {

// Root of everything the library throws on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Gamma (or a ratio built from it) evaluated at a nonpositive integer.
class PoleError : public DomainError {
 public:
  using DomainError::DomainError;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
};

// 2F1 requested at z = 1 where the series diverges (c <= a + b).
class DivergenceError : public DomainError {
 public:
  using DomainError::DomainError;
};

// Parameters do not satisfy the preconditions of the requested regime.
class RegimeError : public DomainError {
 public:
  using DomainError::DomainError;
};

// A radial function whose tail is too heavy for the fractional Laplacian.
class MembershipError : public DomainError {
 public:
  using DomainError::DomainError;
};

// Closed-form calibration disagreed with quadrature at a check radius.
class CalibrationError : public Error {
 public:
  using Error::Error;
};

// The assembled matrix lost the sign pattern needed for a maximum principle.
class AssemblyError : public Error {
 public:
  using Error::Error;
};

class SolverError : public Error {
 public:
  using Error::Error;
};

// Bad experiment configuration. `key` names the offending entry when known.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, std::string key = {}, int line = 0)
      : Error(what), key_(std::move(key)), line_(line) {}
  const std::string& key() const noexcept { return key_; }
  int line() const noexcept { return line_; }

 private:
  std::string key_;
  int line_;
};

}  // namespace mixlap
