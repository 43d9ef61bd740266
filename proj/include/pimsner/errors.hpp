#pragma once

#include <stdexcept>
#include <string>

namespace pimsner {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text; carries a human readable location ("line 3",
/// "edges[2].src", ...).
class ParseError : public Error {
 public:
  ParseError(const std::string& location, const std::string& message)
      : Error(location + ": " + message), location_(location) {}
  const std::string& location() const { return location_; }

 private:
  std::string location_;
};

/// Input is well-formed but violates a structural requirement.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A configured cap (path count, truncation) would be exceeded.
class ResourceLimitError : public Error {
 public:
  using Error::Error;
};

/// Iterative procedure or truncation protocol failed to settle.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& message, double residual)
      : Error(message), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

/// An internal consistency check failed.
class CheckFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace pimsner
