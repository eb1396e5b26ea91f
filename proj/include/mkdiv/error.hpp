#pragma once

#include <stdexcept>
#include <string>

namespace mkdiv {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Value outside the range of a derivative map (e.g. inverting phi').
class RangeError : public Error {
 public:
  using Error::Error;
};

/// Bad input data (empty sample, non-finite entry, unreadable file).
class IngestionError : public Error {
 public:
  using Error::Error;
};

/// Malformed spec string or inconsistent configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Problem size beyond what the exact solvers accept.
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// An expectation required by a functional is not finite.
class MomentError : public Error {
 public:
  using Error::Error;
};

/// The cdf crosses the level function more than once.
class AmbiguityError : public Error {
 public:
  using Error::Error;
};

/// Expected score is non-finite across the whole search grid.
class EvaluationError : public Error {
 public:
  using Error::Error;
};

/// The Lagrange parameter produced a point outside the range of phi'.
class InfeasibleLambdaError : public Error {
 public:
  using Error::Error;
};

/// No multiplier in the search bracket hits the requested divergence.
class CalibrationError : public Error {
 public:
  using Error::Error;
};

}  // namespace mkdiv
