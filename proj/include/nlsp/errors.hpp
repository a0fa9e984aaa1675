#pragma once

#include <stdexcept>
#include <string>

namespace nlsp {

// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// The requested quantity is +infinity (e.g. H(0,p,p)).
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Quadrature did not reach the requested tolerance.
class ToleranceError : public std::runtime_error {
 public:
  ToleranceError(const std::string& what, double best_estimate, double achieved_error)
      : std::runtime_error(what), best_estimate(best_estimate), achieved_error(achieved_error) {}
  double best_estimate;
  double achieved_error;
};

// An iterative solver (descent, Newton, ODE integrator, bracket search) failed.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double last_value = 0.0, double last_residual = 0.0)
      : std::runtime_error(what), last_value(last_value), last_residual(last_residual) {}
  double last_value;
  double last_residual;
};

}  // namespace nlsp
