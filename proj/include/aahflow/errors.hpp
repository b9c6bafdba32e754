#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

#include "aahflow/phase_state.hpp"

namespace aahflow {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input outside the domain of a function (non-finite argument, underflowing
/// density, violated precondition).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The ODE right-hand side produced a non-finite value.
class IntegrationError : public Error {
 public:
  IntegrationError(const std::string& what, std::size_t step_index)
      : Error(what), step_index_(step_index) {}
  std::size_t step_index() const noexcept { return step_index_; }

 private:
  std::size_t step_index_;
};

/// Request falls in a parameter regime the model does not cover.
class UnsupportedRegimeError : public Error {
 public:
  using Error::Error;
};

/// Perturbative formula evaluated outside its validity range.
class OutOfRegimeError : public Error {
 public:
  using Error::Error;
};

/// Newton iteration failed to converge.
class SolverError : public Error {
 public:
  SolverError(const std::string& what, PhaseState last_iterate, double residual)
      : Error(what), last_iterate_(last_iterate), residual_(residual) {}
  PhaseState last_iterate() const noexcept { return last_iterate_; }
  double residual() const noexcept { return residual_; }

 private:
  PhaseState last_iterate_;
  double residual_;
};

/// Jacobian too close to singular for a Newton step.
class SingularJacobianError : public SolverError {
 public:
  using SolverError::SolverError;
};

/// No sign change of the bisected quantity across the bracket.
class BracketError : public Error {
 public:
  using Error::Error;
};

/// Trajectory too short to extract an envelope trend.
class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

}  // namespace aahflow
