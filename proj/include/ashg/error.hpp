/*
 * Copyright 2026 The ashg authors
 * License: Apache License 2.0
 */
#pragma once

#include <stdexcept>
#include <string>

namespace ashg {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A documented precondition of an operation was violated by the caller.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Malformed text input. `line()` is 1-based, 0 when not line specific.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line = 0)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

/// An explicit resource cap (enumeration count, DP states, formula size) was hit.
class ResourceLimitError : public Error {
 public:
  ResourceLimitError(const std::string& cap, const std::string& what)
      : Error("resource cap '" + cap + "' exceeded: " + what), cap_(cap), detail_(what) {}
  const std::string& cap() const { return cap_; }
  const std::string& detail() const { return detail_; }

 private:
  std::string cap_, detail_;
};

/// The chosen algorithm does not apply to the input (e.g. tree DP on a cyclic graph).
class WrongAlgorithmError : public Error {
 public:
  using Error::Error;
};

/// Structural validation failed (bad decomposition, encoder contract broken).
class ValidationError : public Error {
 public:
  using Error::Error;
};

}  // namespace ashg
