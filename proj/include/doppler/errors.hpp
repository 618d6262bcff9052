#pragma once

#include <stdexcept>
#include <string>

namespace doppler {

/// Raised when an input violates a documented precondition or invariant.
class ValidationError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when a numerical procedure (integrator, optimizer) cannot produce
/// a trustworthy result.
class RuntimeFailure : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

}  // namespace doppler
