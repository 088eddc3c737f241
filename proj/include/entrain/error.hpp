#pragma once

#include <stdexcept>
#include <string>

namespace entrain {

/// Malformed input files (WAV headers, CSV layout, JSON schema).
class FormatError : public std::runtime_error {
 public:
  explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

/// Inputs that parse but violate a documented precondition.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical routine could not produce a meaningful result.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace entrain
