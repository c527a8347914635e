#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace ages {

// Base of every exception thrown by the library. The CLI maps the category
// onto an exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad input: malformed files, out-of-range indices, invalid configuration.
class UsageError : public Error {
 public:
  using Error::Error;
};

class RangeError : public UsageError {
 public:
  using UsageError::UsageError;
};

class CycleError : public UsageError {
 public:
  using UsageError::UsageError;
};

class PreconditionError : public UsageError {
 public:
  using UsageError::UsageError;
};

class ConfigError : public UsageError {
 public:
  using UsageError::UsageError;
};

class ParseError : public UsageError {
 public:
  using UsageError::UsageError;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Numerical failures.
class NumericError : public Error {
 public:
  using Error::Error;
};

class DomainError : public NumericError {
 public:
  using NumericError::NumericError;
};

class SingularError : public NumericError {
 public:
  SingularError(const std::string& what, std::vector<int> subset)
      : NumericError(what), subset_(std::move(subset)) {}

  // Vertex indices of the principal submatrix that failed to factorize.
  const std::vector<int>& subset() const { return subset_; }

 private:
  std::vector<int> subset_;
};

class ClassTooLarge : public Error {
 public:
  using Error::Error;
};

}  // namespace ages
