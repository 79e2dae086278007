#pragma once

#include <stdexcept>
#include <string>

namespace plankforge {

/// Base of every error thrown by the library. The CLI maps InvariantViolation
/// to exit code 2 and everything else to exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidInput : public Error {
 public:
  using Error::Error;
};

class OutOfRange : public Error {
 public:
  using Error::Error;
};

class PreconditionFailed : public Error {
 public:
  using Error::Error;
};

class SpaceMismatch : public Error {
 public:
  using Error::Error;
};

// Raised when an analytic divergence verdict is requested for a family that
// has none (explicit lists).
class NoCertificate : public Error {
 public:
  using Error::Error;
};

class ConstructionImpossible : public Error {
 public:
  using Error::Error;
};

class ResourceExhausted : public Error {
 public:
  using Error::Error;
};

class InsufficientData : public Error {
 public:
  using Error::Error;
};

// A checked inequality failed numerically.
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

}  // namespace plankforge
