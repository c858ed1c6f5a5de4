#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cabaret {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A ContentId or name that is not part of the catalog.
class CatalogMissError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file. `line()` is 1-based; 0 when not tied to a line.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// The same content was defined twice in one input.
class DuplicateDefinitionError : public ParseError {
 public:
  using ParseError::ParseError;
};

/// Out-of-range or inconsistent arguments.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Exhaustive search would exceed the enumeration guard.
class InstanceTooLargeError : public Error {
 public:
  using Error::Error;
};

/// A metric requested over an empty sample.
class UndefinedMetricError : public Error {
 public:
  using Error::Error;
};

}  // namespace cabaret
