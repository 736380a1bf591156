#pragma once

#include <stdexcept>
#include <string>

namespace llfba {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed input document (JSON syntax, missing fields, wrong types).
struct ParseError : Error {
  using Error::Error;
};

/// Structurally valid input that violates model invariants.
struct ValidationError : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

/// Failure inside the LP/MIP engine.
struct BackendError : Error {
  using Error::Error;
};

/// A problem feature was sent to a backend that does not support it.
struct CapabilityError : Error {
  using Error::Error;
};

}  // namespace llfba
