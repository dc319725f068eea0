#pragma once

#include <stdexcept>
#include <string>

namespace costrain {

inline constexpr const char* kToolVersion = "0.1.0";

/// Bad inputs: parameters out of range, inconsistent dimensions, mask misuse.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// Runtime failures of the numerics: step-size underflow, positivity blowups,
/// simplex drift beyond the abort threshold.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace costrain
