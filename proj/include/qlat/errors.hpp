#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace qlat {

/// Thrown when an argument lies outside the domain of an operation.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown by iterative solvers that exhaust their iteration budget.
/// Carries the best residual norms reached so callers can report them.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, std::vector<double> best_residuals)
      : std::runtime_error(what), best_residuals_(std::move(best_residuals)) {}

  const std::vector<double>& best_residuals() const noexcept { return best_residuals_; }

 private:
  std::vector<double> best_residuals_;
};

/// Refusal to run a computation that exceeds a configured size cap.
class CapExceeded : public DomainError {
 public:
  using DomainError::DomainError;
};

}  // namespace qlat
