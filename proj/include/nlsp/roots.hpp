#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <utility>

#include "nlsp/errors.hpp"

namespace nlsp::roots {

/// Safeguarded Newton for an increasing function on [lo, hi] with
/// f(lo) <= 0 <= f(hi). `fdf(x)` returns {f(x), f'(x)}. Falls back to
/// bisection whenever the Newton step leaves the bracket.
template <class FdF>
double newton_bisect(FdF&& fdf, double lo, double hi, double x0, double xtol, int max_iter = 200) {
  double x = std::clamp(x0, lo, hi);
  for (int it = 0; it < max_iter; ++it) {
    const auto [f, df] = fdf(x);
    if (f == 0.0) return x;
    if (f < 0.0) lo = x; else hi = x;
    double next = (df > 0.0 && std::isfinite(df)) ? x - f / df : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::fabs(next - x) <= xtol || hi - lo <= xtol) return next;
    x = next;
  }
  return x;
}

/// Illinois-modified regula falsi for a sign change of f on [a, b].
inline double illinois(const std::function<double(double)>& f, double a, double b, double xtol,
                       int max_iter = 200) {
  double fa = f(a);
  double fb = f(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa < 0.0) == (fb < 0.0)) throw SolverError("illinois: no sign change on bracket", a, fa);
  int side = 0;
  for (int it = 0; it < max_iter; ++it) {
    const double c = (a * fb - b * fa) / (fb - fa);
    const double fc = f(c);
    if (fc == 0.0 || std::fabs(b - a) <= xtol) return c;
    if ((fc < 0.0) == (fb < 0.0)) {
      b = c;
      fb = fc;
      if (side == -1) fa *= 0.5;
      side = -1;
    } else {
      a = c;
      fa = fc;
      if (side == 1) fb *= 0.5;
      side = 1;
    }
    if (std::fabs(b - a) <= xtol) return 0.5 * (a + b);
  }
  throw SolverError("illinois: no convergence", 0.5 * (a + b), std::min(std::fabs(fa), std::fabs(fb)));
}

/// Golden-section minimization on [a, b]. Returns {argmin, min}.
inline std::pair<double, double> golden_section(const std::function<double(double)>& f, double a,
                                                double b, double xtol) {
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - (b - a) * invphi;
  double d = a + (b - a) * invphi;
  double fc = f(c);
  double fd = f(d);
  while (b - a > xtol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - (b - a) * invphi;
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + (b - a) * invphi;
      fd = f(d);
    }
  }
  return fc < fd ? std::pair{c, fc} : std::pair{d, fd};
}

}  // namespace nlsp::roots
