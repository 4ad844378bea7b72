#pragma once

#include <stdexcept>
#include <string>

namespace fairdyn {

/// Base class for every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// An iterative method exhausted its iteration budget. For valid inputs this
/// indicates a bug rather than a property of the problem.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// The input describes a degenerate object (empty selection, zero-variance
/// histogram, point-mass regime) for which the requested quantity is undefined.
class DegenerateError : public Error {
 public:
  using Error::Error;
};

/// Groups that must share a Beta shape do not.
class ShapeMismatchError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file. Row and column are 1-based; 0 means "not applicable".
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t row = 0, std::size_t column = 0)
      : Error(what), row_(row), column_(column) {}

  std::size_t row() const noexcept { return row_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t row_;
  std::size_t column_;
};

}  // namespace fairdyn
