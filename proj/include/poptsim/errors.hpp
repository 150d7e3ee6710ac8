#pragma once

#include <stdexcept>
#include <string>

namespace poptsim {

// Base class for every recoverable failure raised by this library. The CLI
// maps subclasses to its exit-code contract (1 = computation, 2 = parse,
// 3 = file invariant).
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionError : Error {
  using Error::Error;
};

struct NotHermitianError : Error {
  using Error::Error;
};

struct NotPsdError : Error {
  using Error::Error;
};

struct BadTraceError : Error {
  using Error::Error;
};

// The image of the identity under a positive map is numerically singular;
// callers must retry with an epsilon-regularized map.
struct SingularMError : Error {
  using Error::Error;
};

// A concrete pure tensor with negative expectation was found, so the input
// is witnessed not to be positive on pure tensors.
struct NotPoptWitnessedError : Error {
  using Error::Error;
};

struct FrameSingularError : Error {
  using Error::Error;
};

struct ResidualTooLargeError : Error {
  using Error::Error;
};

struct UnboundedError : Error {
  using Error::Error;
};

// File-format failures (CLI exit 2).
struct ParseError : Error {
  using Error::Error;
};

// Structural invariant failures when loading typed objects (CLI exit 3).
struct InvariantViolation : Error {
  using Error::Error;
};

}  // namespace poptsim
