#pragma once

#include <stdexcept>
#include <string>

namespace hkglab {

/// Invalid arguments: dimension mismatch, index out of range, bad config.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A hypothesis of the blow-up theorem is violated where it is required.
class HypothesisError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A numerical procedure could not produce a usable result.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hkglab
