#pragma once

#include <stdexcept>
#include <string>

namespace blab {

// Base of every error raised by the library. The CLI maps the concrete
// type onto its exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// A parameter lies outside the range admitted by the model or theorem.
class RangeError : public Error {
 public:
  using Error::Error;
};

// The scaled interaction support is not resolved by the lattice.
class ResolutionError : public Error {
 public:
  using Error::Error;
};

class IntegratorError : public Error {
 public:
  using Error::Error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

// One-body function is not normalised in the lattice-weighted norm.
class NormalizationError : public Error {
 public:
  using Error::Error;
};

// Two independent evaluation routes disagree, or an exact identity fails.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

class StaleCacheError : public ConsistencyError {
 public:
  using ConsistencyError::ConsistencyError;
};

// A requested time is not on the stored trajectory grid.
class TrajectoryGapError : public IntegratorError {
 public:
  using IntegratorError::IntegratorError;
};

}  // namespace blab
