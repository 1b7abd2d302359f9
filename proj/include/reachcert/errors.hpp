#pragma once

#include <limits>
#include <stdexcept>
#include <string>

namespace reachcert {

// Base class for all errors thrown by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A mathematical precondition was violated (argument outside the domain
// of the operation).
class DomainError : public Error {
 public:
  using Error::Error;
};

// A matrix expected to be symmetric positive definite was not. Carries the
// offending minimum eigenvalue; the matrices built here are provably SPD,
// so this firing indicates a caller bug rather than a condition to repair.
class NotSpdError : public Error {
 public:
  NotSpdError(const std::string& what, double min_eigenvalue)
      : Error(what), min_eigenvalue_(min_eigenvalue) {}
  double min_eigenvalue() const { return min_eigenvalue_; }

 private:
  double min_eigenvalue_;
};

// The desired-attitude construction became ill-defined (thrust direction
// antiparallel to e3 or vanishing). Carries the simulation time at which
// it fired when known, NaN otherwise.
class SingularityError : public Error {
 public:
  explicit SingularityError(const std::string& what,
                            double time = std::numeric_limits<double>::quiet_NaN())
      : Error(what), time_(time) {}
  double time() const { return time_; }

 private:
  double time_;
};

// Adaptive integration could not proceed (step-size underflow).
class IntegrationError : public Error {
 public:
  using Error::Error;
};

// A geometric construction or scenario is infeasible (empty deflation,
// invalid scenario invariant, unreachable sample).
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

}  // namespace reachcert
