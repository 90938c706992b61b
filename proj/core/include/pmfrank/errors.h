#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pmfrank {

// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Vector or matrix dimensions do not agree.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Exact enumeration refused because the outcome space exceeds the guard.
class DomainTooLargeError : public DomainError {
 public:
  using DomainError::DomainError;
};

// Image too small for a requested descriptor scale.
class SizingError : public Error {
 public:
  using Error::Error;
};

class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

// Training data carries fewer than two distinct labels.
class DegenerateTrainingError : public Error {
 public:
  using Error::Error;
};

// Preference weights are not identifiable from the observations.
class EstimationError : public Error {
 public:
  using Error::Error;
};

// A per-item input (score, feature) is missing.
class IncompleteInputError : public Error {
 public:
  using Error::Error;
};

class NoPairsError : public Error {
 public:
  using Error::Error;
};

class BoundsError : public Error {
 public:
  using Error::Error;
};

// Weight vector is not in canonical form (Person weight 1, all positive).
class NormalizationError : public Error {
 public:
  using Error::Error;
};

// An operation that needs resolved display types met an Unknown one.
class UnresolvedTypeError : public Error {
 public:
  using Error::Error;
};

class EmptyEvaluationError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// Malformed input file. Carries the location for diagnostics.
class ParseError : public Error {
 public:
  ParseError(std::string file, std::size_t line, std::string field,
             const std::string& what)
      : Error(file + ":" + std::to_string(line) + ": field '" + field +
              "': " + what),
        file_(std::move(file)),
        line_(line),
        field_(std::move(field)) {}

  const std::string& file() const { return file_; }
  std::size_t line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  std::string file_;
  std::size_t line_;
  std::string field_;
};

}  // namespace pmfrank
