#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace torus {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Rejected input: violated precondition or malformed data.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// (n, m) not coprime, zero, or beyond the overflow guard.
class InvalidDirection : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// Region has zero grid measure at the requested resolution.
class EmptyRegion : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// Requested truncation exceeds the memory budget.
class ResourceError : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure failed or detected an inconsistency.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class NearResonance : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Gramian numerically singular on the active subspace.
class IllPosedControl : public NumericalError {
 public:
  IllPosedControl(const std::string& what, double condition)
      : NumericalError(what), condition_(condition) {}
  double condition() const noexcept { return condition_; }

 private:
  double condition_;
};

class NormalFormInconsistency : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace torus
