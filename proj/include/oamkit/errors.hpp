#pragma once

#include <stdexcept>
#include <string>

namespace oamkit {

// Bad input: out-of-range parameters, malformed specs, violated preconditions.
struct ValidationError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// The sampling grid cannot represent the request (beam clipped by the
// window, transfer function aliased).
struct GridError : ValidationError {
  using ValidationError::ValidationError;
};

// A numerical guard tripped (undefined winding, spectral leakage, cross-check).
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

inline void require(bool ok, const std::string& what) {
  if (!ok) throw ValidationError(what);
}

}  // namespace detail
}  // namespace oamkit
