#pragma once

#include <stdexcept>
#include <string>

namespace sisid {

// Base for everything the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Empty or non-conforming matrix/vector dimensions.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Wrong matrix shape for the operation (non-square, asymmetric, ...).
class ShapeError : public Error {
 public:
  using Error::Error;
};

// A factorization or inverse failed because the operand is numerically
// singular or not positive definite.
class ConditioningError : public Error {
 public:
  using Error::Error;
};

// Argument outside the mathematical domain of the operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Non-finite value produced during an update.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// Request exceeds a fixed computational budget.
class ResourceError : public Error {
 public:
  using Error::Error;
};

// Invalid experiment configuration. The message names the offending field.
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& what)
      : Error(field + ": " + what), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace sisid
