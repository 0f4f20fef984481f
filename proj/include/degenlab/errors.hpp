#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace degenlab {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parameter lies outside the domain where an operation is defined.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Coefficient sample that is not strictly positive and finite.
class EllipticityError : public Error {
 public:
  using Error::Error;
};

/// Linear solver could not reach its tolerance.
class SolverFailure : public Error {
 public:
  SolverFailure(const std::string& what, std::vector<double> residual_history = {})
      : Error(what), residual_history_(std::move(residual_history)) {}

  const std::vector<double>& residual_history() const noexcept { return residual_history_; }

 private:
  std::vector<double> residual_history_;
};

/// Too few usable data points for a fit.
class InsufficientData : public Error {
 public:
  using Error::Error;
};

}  // namespace degenlab
