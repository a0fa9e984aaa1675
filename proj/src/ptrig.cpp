#include "nlsp/ptrig.hpp"

#include <cmath>
#include <numbers>

#include "nlsp/roots.hpp"

namespace nlsp::ptrig {

namespace {

constexpr int kMaxTerms = 400;

// int_0^1 (1 - s^p)^{-1/p} ds = pi / (p sin(pi/p)).
double full_integral(double p) { return std::numbers::pi / (p * std::sin(std::numbers::pi / p)); }

// int_0^s (1 - sigma^p)^{-1/p} d sigma for s^p <= 1/2.
double lower_series(double s, double p) {
  const double sp = std::pow(s, p);
  double coeff = 1.0;
  double power = 1.0;
  double sum = 0.0;
  for (int k = 0; k < kMaxTerms; ++k) {
    const double term = coeff * power / (p * k + 1.0);
    sum += term;
    if (term <= 1e-18 * sum) break;
    coeff *= (k + 1.0 / p) / (k + 1.0);
    power *= sp;
  }
  return s * sum;
}

// int_s^1 (1 - sigma^p)^{-1/p} d sigma as a function of w = 1 - s^p <= 1/2.
double upper_series(double w, double p) {
  if (w == 0.0) return 0.0;
  const double a = 1.0 - 1.0 / p;
  double coeff = 1.0;
  double power = std::pow(w, a);
  double sum = 0.0;
  for (int k = 0; k < kMaxTerms; ++k) {
    const double term = coeff * power / (k + a);
    sum += term;
    if (term <= 1e-18 * sum) break;
    coeff *= (k + a) / (k + 1.0);
    power *= w;
  }
  return sum / p;
}

// Inverse of s -> int_0^s (1 - sigma^p)^{-1/p} on the principal branch.
// Returns s together with w = 1 - s^p (computed without cancellation), so that
// sin_p = A s and sin_p' = w^{1/p}.
struct Inverted {
  double s;
  double w;
};

Inverted invert(double target, double p) {
  const double total = full_integral(p);
  if (target <= 0.0) return {0.0, 1.0};
  if (target >= total) return {1.0, 0.0};
  const double s_split = std::pow(0.5, 1.0 / p);
  const double split = lower_series(s_split, p);
  if (target <= split) {
    const double s = roots::newton_bisect(
        [&](double s) {
          const double f = lower_series(s, p) - target;
          const double df = std::pow(1.0 - std::pow(s, p), -1.0 / p);
          return std::pair{f, df};
        },
        0.0, s_split, target, 1e-17);
    return {s, 1.0 - std::pow(s, p)};
  }
  // Work in z = w^{(p-1)/p}, in which the tail integral is close to linear.
  const double tail = total - target;
  const double e = (p - 1.0) / p;
  const double z_max = std::pow(0.5, e);
  const double z = roots::newton_bisect(
      [&](double z) {
        const double w = std::pow(z, 1.0 / e);
        const double f = upper_series(w, p) - tail;
        const double df = std::pow(1.0 - w, 1.0 / p - 1.0) / (p - 1.0);
        return std::pair{f, df};
      },
      0.0, z_max, (p - 1.0) * tail, 1e-17);
  const double w = std::pow(z, 1.0 / e);
  return {std::exp(std::log1p(-w) / p), w};
}

}  // namespace

double pi_p(PExponent p) {
  const double pv = p.value();
  return 2.0 * std::numbers::pi * p.amplitude() / (pv * std::sin(std::numbers::pi / pv));
}

quad::QuadResult pi_p_quadrature(PExponent p, double tol) {
  const double pv = p.value();
  const double a = p.amplitude();
  auto integrand = [pv](double x, double, double dr) {
    const double one_minus = dr < 0.5 ? -std::expm1(pv * std::log1p(-dr)) : 1.0 - std::pow(x, pv);
    return std::pow(one_minus, -1.0 / pv);
  };
  auto res = quad::tanh_sinh(integrand, 0.0, 1.0, tol / (2.0 * a));
  res.value *= 2.0 * a;
  res.error *= 2.0 * a;
  return res;
}

double asin_p(double x, PExponent p) {
  const double pv = p.value();
  const double a = p.amplitude();
  if (!(x >= 0.0)) throw DomainError("asin_p: x must be >= 0");
  if (x > a * (1.0 + 8.0 * std::numeric_limits<double>::epsilon())) {
    throw DomainError("asin_p: x exceeds (p-1)^{1/p}");
  }
  const double s = std::min(x / a, 1.0);
  const double sp = std::pow(s, pv);
  if (sp <= 0.5) return a * lower_series(s, pv);
  const double w = -std::expm1(pv * std::log(s));
  return a * (full_integral(pv) - upper_series(w, pv));
}

quad::QuadResult asin_p_quadrature(double x, PExponent p, double tol) {
  const double pv = p.value();
  const double a = p.amplitude();
  if (!(x >= 0.0)) throw DomainError("asin_p_quadrature: x must be >= 0");
  if (x > a * (1.0 + 8.0 * std::numeric_limits<double>::epsilon())) {
    throw DomainError("asin_p_quadrature: x exceeds (p-1)^{1/p}");
  }
  if (x == 0.0) return {};
  const double s = std::min(x / a, 1.0);
  const double gap = 1.0 - s;
  auto integrand = [pv, gap](double sigma, double, double dr) {
    const double d = gap + dr;  // distance of sigma to 1
    const double one_minus = d < 0.5 ? -std::expm1(pv * std::log1p(-d)) : 1.0 - std::pow(sigma, pv);
    return std::pow(one_minus, -1.0 / pv);
  };
  auto res = quad::tanh_sinh(integrand, 0.0, s, tol / a);
  res.value *= a;
  res.error *= a;
  return res;
}

SinCosP sin_p_with_derivative(double t, PExponent p) {
  const double pv = p.value();
  const double a = p.amplitude();
  const double period_half = pi_p(p);
  double tr = std::remainder(t, 2.0 * period_half);  // in [-pi_p, pi_p]
  double sign = 1.0;
  if (tr < 0.0 || (tr == 0.0 && std::signbit(tr))) {
    tr = -tr;
    sign = -1.0;
  }
  double dsign = 1.0;
  if (tr > 0.5 * period_half) {
    tr = period_half - tr;
    dsign = -1.0;
  }
  const Inverted inv = invert(tr / a, pv);
  return {sign * a * inv.s, dsign * std::pow(inv.w, 1.0 / pv)};
}

double sin_p(double t, PExponent p) { return sin_p_with_derivative(t, p).value; }

double cos_p(double t, PExponent p) { return sin_p(t + 0.5 * pi_p(p), p); }

double sin_p_prime(double t, PExponent p) { return sin_p_with_derivative(t, p).derivative; }

}  // namespace nlsp::ptrig
