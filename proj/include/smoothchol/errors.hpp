#pragma once

#include <stdexcept>
#include <string>

namespace smoothchol {

// Base of every error thrown by the library. The CLI maps UsageError,
// IoError and DimensionError to exit code 1 and everything else to 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UsageError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

// Numerical failures.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class InvalidFactor : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class InvalidModel : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class InvalidCovariance : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class ZeroVarianceColumn : public NumericalError {
 public:
  ZeroVarianceColumn(int column, const std::string& what)
      : NumericalError(what), column_(column) {}
  int column() const noexcept { return column_; }

 private:
  int column_;
};

class NotPositiveDefinite : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Raised when a block update increases the objective: a solver bug, never
// expected on valid input.
class ConsistencyError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace smoothchol
