#pragma once

#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

namespace nlsp {

/// Continuous piecewise-linear function on the uniform mesh of [-1,1] with
/// n_cells cells. Only interior nodal values are stored; u(-1) = u(1) = 0.
class GridFunction {
 public:
  /// n_cells must be even and >= 8; interior.size() must equal n_cells - 1.
  GridFunction(int n_cells, std::vector<double> interior);
  explicit GridFunction(int n_cells);

  static GridFunction sample(int n_cells, const std::function<double(double)>& f);

  int n_cells() const { return n_cells_; }
  double h() const { return 2.0 / n_cells_; }
  /// Coordinate of node k, k = 0..n_cells.
  double x(int node) const { return -1.0 + node * h(); }
  /// Value at node k including the pinned boundary nodes.
  double at(int node) const {
    return (node <= 0 || node >= n_cells_) ? 0.0 : values_[static_cast<std::size_t>(node - 1)];
  }

  std::span<const double> interior() const { return values_; }
  std::span<double> interior() { return values_; }

  bool is_zero() const;
  double max_abs() const;

  /// x -> u(-x).
  GridFunction reflected() const;
  GridFunction scaled(double c) const;

  /// Two-column CSV "x,y" including both boundary nodes.
  void write_csv(std::ostream& os) const;

 private:
  int n_cells_;
  std::vector<double> values_;
};

}  // namespace nlsp
