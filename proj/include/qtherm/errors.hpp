#pragma once

#include <stdexcept>
#include <string>

namespace qtherm {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A value violates a documented type invariant (non-Hermitian input,
/// negative density-matrix eigenvalue beyond the clamp window, ...).
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

/// A scalar argument lies outside the domain of the operation (T <= 0,
/// logarithm of a negative eigenvalue, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Caller misuse: mismatched dimensions, empty subsystem sets, bad indices.
class UsageError : public Error {
 public:
  using Error::Error;
};

/// Requested problem exceeds a configured size cap.
class ResourceError : public Error {
 public:
  using Error::Error;
};

/// Measurement optimisation requested on a subsystem we cannot parametrise.
class UnsupportedOptimization : public Error {
 public:
  using Error::Error;
};

/// A state family whose spectrum vanishes everywhere; no Fisher information
/// can be assigned.
class DegenerateFamily : public Error {
 public:
  using Error::Error;
};

}  // namespace qtherm
