#pragma once

#include <stdexcept>
#include <string>

namespace driveaudit {

/// Base class for all library errors. `where` identifies the offending
/// element (a file path, a JSON pointer-ish path, or a parameter name).
class Error : public std::runtime_error {
public:
  Error(std::string where, const std::string& what)
  : std::runtime_error(where.empty() ? what : where + ": " + what), where_(std::move(where)) {}

  explicit Error(const std::string& what) : Error("", what) {}

  const std::string& where() const noexcept { return where_; }

private:
  std::string where_;
};

/// Malformed syntax in an input file.
class ParseError : public Error {
public:
  using Error::Error;
};

/// Structurally valid input with a missing field or wrong type.
class SchemaError : public Error {
public:
  using Error::Error;
};

/// A constructed value violates a documented invariant.
class InvariantError : public Error {
public:
  using Error::Error;
};

/// An argument is outside the domain of an operation.
class DomainError : public Error {
public:
  using Error::Error;
};

/// No agent in the scenario carries enough valid frames to resample.
class EmptyScenarioError : public Error {
public:
  using Error::Error;
};

/// A reference path could not be built (fewer than 2 distinct points).
class DegeneratePathError : public Error {
public:
  using Error::Error;
};

/// A generator or config parameter is out of range.
class ParameterError : public Error {
public:
  using Error::Error;
};

/// An agent has the wrong category for the requested pairing.
class CategoryError : public Error {
public:
  using Error::Error;
};

/// A conflict area polygon is degenerate.
class ConflictAreaError : public Error {
public:
  using Error::Error;
};

/// Filesystem failure.
class IoError : public Error {
public:
  using Error::Error;
};

}  // namespace driveaudit
