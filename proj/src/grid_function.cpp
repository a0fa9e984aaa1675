#include "nlsp/grid_function.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "nlsp/errors.hpp"
#include "nlsp/format.hpp"

namespace nlsp {

GridFunction::GridFunction(int n_cells, std::vector<double> interior)
    : n_cells_(n_cells), values_(std::move(interior)) {
  if (n_cells < 8 || n_cells % 2 != 0) {
    throw DomainError("GridFunction: n_cells must be even and >= 8, got " + std::to_string(n_cells));
  }
  if (values_.size() != static_cast<std::size_t>(n_cells - 1)) {
    throw DomainError("GridFunction: expected n_cells - 1 interior values");
  }
}

GridFunction::GridFunction(int n_cells)
    : GridFunction(n_cells, std::vector<double>(static_cast<std::size_t>(std::max(n_cells - 1, 0)))) {}

GridFunction GridFunction::sample(int n_cells, const std::function<double(double)>& f) {
  GridFunction g(n_cells);
  for (int k = 1; k < n_cells; ++k) g.values_[static_cast<std::size_t>(k - 1)] = f(g.x(k));
  return g;
}

bool GridFunction::is_zero() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return v == 0.0; });
}

double GridFunction::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::fabs(v));
  return m;
}

GridFunction GridFunction::reflected() const {
  std::vector<double> v(values_.rbegin(), values_.rend());
  return GridFunction(n_cells_, std::move(v));
}

GridFunction GridFunction::scaled(double c) const {
  std::vector<double> v(values_);
  for (double& x : v) x *= c;
  return GridFunction(n_cells_, std::move(v));
}

void GridFunction::write_csv(std::ostream& os) const {
  os << "x,y\n";
  for (int k = 0; k <= n_cells_; ++k) os << fmt_double(x(k)) << ',' << fmt_double(at(k)) << '\n';
}

}  // namespace nlsp
