#pragma once

// Integrals of piecewise-linear mesh functions and their nodal gradients.
// |u'|^p is cellwise constant and integrated exactly; the mass-type terms use
// 4-point Gauss-Legendre per cell.

#include <span>
#include <vector>

namespace nlsp::discrete {

struct Terms {
  double energy = 0.0;   // int |u'|^p
  double mass = 0.0;     // int |u|^p
  double moment = 0.0;   // int |u|^{r-1} u
  double lr_mass = 0.0;  // int |u|^r
};

/// Gradients with respect to the interior nodal values. Vectors are resized
/// to n_cells - 1.
struct Gradients {
  std::vector<double> energy;
  std::vector<double> mass;
  std::vector<double> moment;
  std::vector<double> lr_mass;
};

Terms evaluate(std::span<const double> interior, int n_cells, double p, double r);

Terms evaluate(std::span<const double> interior, int n_cells, double p, double r, Gradients& grad);

/// Cell slopes (u_{k+1} - u_k)/h, k = 0..n_cells-1.
std::vector<double> slopes(std::span<const double> interior, int n_cells);

}  // namespace nlsp::discrete
