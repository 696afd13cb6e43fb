#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace stabaaa {

/// Base class for every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input violates a documented precondition (bad frequencies, sizes, flags).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Malformed text input. Carries the 1-based line number of the offending row.
class ParseError : public ValidationError {
 public:
  ParseError(std::size_t line, const std::string& what)
      : ValidationError("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Data carries no usable information (all-zero response, empty truncation).
class DegenerateDataError : public Error {
 public:
  using Error::Error;
};

/// Evaluation requested at a point outside the function's domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// An eigensolver, factorization or iterative solver broke down.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// A matrix that must be well conditioned is numerically rank deficient.
class ConditioningError : public NumericalError {
 public:
  ConditioningError(const std::string& what, double ratio)
      : NumericalError(what), ratio_(ratio) {}
  /// sigma_min / sigma_max (or 1 / condition estimate) that triggered the error.
  double ratio() const { return ratio_; }

 private:
  double ratio_;
};

/// The greedy loop ran out of test points.
class SaturationError : public Error {
 public:
  using Error::Error;
};

}  // namespace stabaaa
