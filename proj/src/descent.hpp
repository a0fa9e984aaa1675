#pragma once

#include <functional>
#include <span>
#include <vector>

namespace nlsp::detail {

/// Evaluates a 0-homogeneous functional of the interior nodal values and,
/// when `grad` is non-null, its gradient.
using Functional = std::function<double(std::span<const double> u, std::vector<double>* grad)>;

struct DescentSettings {
  double p = 2.0;           // sets the p-Laplacian weights of the preconditioner
  double tol = 1e-12;       // relative decrease below which an iteration stalls
  int stall_limit = 3;      // consecutive stalled iterations to declare convergence
  int max_iter = 20000;
};

struct DescentOutcome {
  std::vector<double> u;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Nonlinear conjugate gradient (Polak-Ribiere+) with Armijo backtracking,
/// preconditioned by the weighted stiffness matrix of the p-Laplacian at the
/// current iterate (an H^1_0-type Sobolev gradient). Iterates are rescaled to
/// unit max norm after every step.
DescentOutcome preconditioned_descent(const Functional& f, std::vector<double> u0, int n_cells,
                                      const DescentSettings& settings);

}  // namespace nlsp::detail
