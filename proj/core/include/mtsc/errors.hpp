#pragma once

#include <stdexcept>
#include <string>

namespace mtsc {

// Base class for every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An input violated a documented precondition or type invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// An IO operation (read/write/open) failed.
class IoError : public Error {
 public:
  using Error::Error;
};

class NegativeMass : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class NotNormalized : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class EmptyAlphabet : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class ZeroProbabilityCondition : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class SupportMismatch : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class LengthMismatch : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class ZeroMassAtRealization : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class BudgetOutOfRange : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class EnumerationTooLarge : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class GridTooLarge : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class ParseError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class UnknownCommand : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

}  // namespace mtsc
