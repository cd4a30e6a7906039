#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qtgnn {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text. Carries the 1-based line number of the offending row.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Input parsed but violates a domain rule (negative amount, dangling index).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Missing or unreadable input or output file.
class DataError : public Error {
 public:
  using Error::Error;
};

class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// Graph too large for the dense state representation.
class CapacityError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Operation called on an object that is not in the required state.
class StateError : public Error {
 public:
  using Error::Error;
};

class TrainingError : public Error {
 public:
  TrainingError(std::size_t parameter, const std::string& what)
      : Error("parameter " + std::to_string(parameter) + ": " + what),
        parameter_(parameter) {}
  std::size_t parameter() const noexcept { return parameter_; }

 private:
  std::size_t parameter_;
};

class UndefinedMetricError : public Error {
 public:
  using Error::Error;
};

class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

/// A named experiment assertion failed. Used by the lab and CLI exit codes.
class ExperimentFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace qtgnn
