#pragma once

#include <cmath>
#include <span>
#include <string>

#include "nlsp/errors.hpp"

namespace nlsp::quad {

struct QuadResult {
  double value = 0.0;
  double error = 0.0;  // difference between the last two refinement levels
  int levels = 0;
  int evaluations = 0;
};

/// One tanh-sinh node mapped to the unit interval: abscissa x = left,
/// 1 - x = right, weight includes the Jacobian dx/dt.
struct TanhSinhNode {
  double left;
  double right;
  double weight;
};

inline constexpr int kMaxLevel = 12;
inline constexpr double kTMax = 6.0;
inline constexpr double kMinDistance = 1e-300;

/// Nodes added at refinement level `level` (level 0 uses step 1, level k uses
/// the odd multiples of 2^-k). Tables are built once and shared.
std::span<const TanhSinhNode> tanh_sinh_level(int level);

/// Double-exponential quadrature of f over [a, b].
///
/// The integrand is called as f(x, x - a, b - x) with both endpoint distances
/// computed without cancellation, so integrands with algebraic endpoint
/// singularities can be evaluated accurately arbitrarily close to either end.
/// Nodes closer than kMinDistance to an endpoint carry negligible weight and
/// are treated as the endpoint itself (skipped); so are nodes at which a
/// singular integrand rounds to +inf.
template <class F>
QuadResult tanh_sinh(F&& f, double a, double b, double tol, int max_level = kMaxLevel) {
  if (!(b > a)) throw DomainError("tanh_sinh: require a < b");
  const double len = b - a;
  QuadResult out;
  double sum = 0.0;
  double prev = 0.0;
  for (int level = 0; level <= max_level; ++level) {
    double level_sum = 0.0;
    for (const auto& node : tanh_sinh_level(level)) {
      const double dl = len * node.left;
      const double dr = len * node.right;
      if (dl < kMinDistance || dr < kMinDistance) continue;
      const double x = node.left <= 0.5 ? a + dl : b - dr;
      const double fx = f(x, dl, dr);
      ++out.evaluations;
      if (std::isnan(fx)) throw DomainError("tanh_sinh: integrand returned NaN");
      if (std::isinf(fx)) continue;
      level_sum += fx * node.weight;
    }
    sum += level_sum;
    const double h = std::ldexp(1.0, -level);
    const double estimate = len * h * sum;
    out.levels = level;
    if (level > 0) {
      out.error = std::fabs(estimate - prev);
      out.value = estimate;
      if (level >= 3 && out.error <= tol) return out;
    }
    prev = estimate;
    out.value = estimate;
  }
  throw ToleranceError("tanh_sinh: tolerance " + std::to_string(tol) + " not reached", out.value,
                       out.error);
}

}  // namespace nlsp::quad
