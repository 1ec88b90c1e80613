#pragma once

#include <stdexcept>
#include <string>

namespace warpforge {

/// Root of every error the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input that is well-formed on disk but violates a contract. CLI exit code 2.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Filesystem failures. CLI exit code 3.
class IoError : public Error {
 public:
  using Error::Error;
};

class MissingFile : public IoError {
 public:
  using IoError::IoError;
};

class SyntaxError : public ValidationError {
 public:
  SyntaxError(int line, int column, const std::string& message)
      : ValidationError(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
        line_(line),
        column_(column) {}

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

class SemanticError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class DimensionMismatch : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class LengthMismatch : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class InvalidSchedule : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class StageOrderViolation : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class IngestMissing : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class InvalidK : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class BadMagic : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class ManifestMismatch : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class UnsupportedVersion : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

}  // namespace warpforge
