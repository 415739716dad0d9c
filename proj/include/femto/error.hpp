#pragma once

#include <stdexcept>
#include <string>

namespace femto {

/// Raised when a profile, scenario or argument breaks a model invariant.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when an enumeration would exceed its configured size cap.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a property the game theory guarantees is observed to fail
/// (e.g. a best-response cycle).
class PropertyViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace femto
