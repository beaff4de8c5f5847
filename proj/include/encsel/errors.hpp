#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace encsel {

// Base for every error the library raises.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed fact text. Line and column are 1-based.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : Error("parse error at " + std::to_string(line) + ":" + std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

// Structurally well-formed input that violates a domain invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Generator parameters that violate their constraints.
class SpecError : public Error {
 public:
  using Error::Error;
};

// Operation called on inputs that break its precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// Incomplete or inconsistent tabular data (performance matrix, feature table).
class DataError : public Error {
 public:
  using Error::Error;
};

// File that cannot be loaded against the expected schema.
class LoadError : public Error {
 public:
  using Error::Error;
};

}  // namespace encsel
