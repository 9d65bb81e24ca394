#pragma once

#include <stdexcept>
#include <string>

namespace betafreeze {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An iterative method (Newton polish, QL sweeps) ran out of budget.
class ConvergenceFailure : public Error {
 public:
  using Error::Error;
};

/// Coincident or misordered points where distinct descending ones are required.
class DegenerateInput : public Error {
 public:
  using Error::Error;
};

/// Cholesky factorization hit a non-positive pivot.
class FactorizationFailure : public Error {
 public:
  using Error::Error;
};

/// Parameters outside the validity window of a bound.
class ConditionViolated : public Error {
 public:
  using Error::Error;
};

/// Experiment or CLI configuration is malformed.
class InvalidConfig : public Error {
 public:
  using Error::Error;
};

}  // namespace betafreeze
