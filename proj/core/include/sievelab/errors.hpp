#pragma once

#include <stdexcept>

namespace sievelab {

// Thrown when an operation would exceed its configured memory or size budget.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Thrown when a numerical method is requested outside its supported range
// (e.g. dense tensor quadrature in too many dimensions).
class UnsupportedMethodError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace sievelab
