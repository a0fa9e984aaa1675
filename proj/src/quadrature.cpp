#include "nlsp/quadrature.hpp"

#include <array>
#include <numbers>
#include <vector>

namespace nlsp::quad {

namespace {

TanhSinhNode make_node(double t) {
  const double u = 0.5 * std::numbers::pi * std::sinh(t);
  // x = 1/(1+e^{-2u}), 1-x = 1/(1+e^{2u}); both formulas avoid cancellation.
  const double left = 1.0 / (1.0 + std::exp(-2.0 * u));
  const double right = 1.0 / (1.0 + std::exp(2.0 * u));
  const double weight = std::numbers::pi * std::cosh(t) * left * right;
  return {left, right, weight};
}

std::array<std::vector<TanhSinhNode>, kMaxLevel + 1> build_tables() {
  std::array<std::vector<TanhSinhNode>, kMaxLevel + 1> tables;
  const int n0 = static_cast<int>(kTMax);
  for (int k = -n0; k <= n0; ++k) tables[0].push_back(make_node(k));
  for (int level = 1; level <= kMaxLevel; ++level) {
    const double h = std::ldexp(1.0, -level);
    const int n = static_cast<int>(kTMax / h);
    for (int k = -n + 1; k < n; k += 2) tables[level].push_back(make_node(k * h));
  }
  return tables;
}

}  // namespace

std::span<const TanhSinhNode> tanh_sinh_level(int level) {
  static const auto tables = build_tables();
  if (level < 0 || level > kMaxLevel) throw DomainError("tanh_sinh_level: level out of range");
  return tables[static_cast<std::size_t>(level)];
}

}  // namespace nlsp::quad
