#include "nlsp/hfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "nlsp/ptrig.hpp"
#include "nlsp/quadrature.hpp"
#include "nlsp/roots.hpp"

namespace nlsp::hfun {

namespace {

void check_m(double m) {
  if (!(m >= 0.0 && m <= 1.0)) throw DomainError("m must lie in [0,1]");
}

// 1 - y^q given log y; exact 1 for y = 0.
double one_minus_pow(double log_y, double q) {
  if (log_y == -std::numeric_limits<double>::infinity()) return 1.0;
  return -std::expm1(q * log_y);
}

double pow_from_log(double log_y, double q) {
  if (log_y == -std::numeric_limits<double>::infinity()) return 0.0;
  return std::exp(q * log_y);
}

}  // namespace

double ratio_R(double m, const Exponents& e) {
  check_m(m);
  return (1.0 - abs_pow(m, e.p())) / (1.0 + abs_pow(m, e.r()));
}

double ratio_T(double m, const Exponents& e) {
  check_m(m);
  const double mr = abs_pow(m, e.r());
  return (abs_pow(m, e.p()) + mr) / (1.0 + mr);
}

double integrand_h(double m, const Exponents& e, double y) { return integrand_h(m, e, y, 1.0 - y); }

double integrand_h(double m, const Exponents& e, double y, double one_minus_y) {
  check_m(m);
  const double p = e.p();
  const double r = e.r();
  if (m == 0.0 && e.r_equals_p()) {
    throw DivergenceError("h: radicand vanishes identically for m = 0, r = p");
  }
  if (!(y >= 0.0) || !(one_minus_y > 0.0)) throw DomainError("h: requires 0 <= y < 1");

  const double log_y = y == 0.0 ? -std::numeric_limits<double>::infinity()
                       : y < 0.5 ? std::log(y)
                                 : std::log1p(-one_minus_y);
  const double yr = pow_from_log(log_y, r);
  const double b = one_minus_pow(log_y, r);       // 1 - y^r
  const double a = one_minus_pow(log_y, p);       // 1 - y^p
  const double c = one_minus_pow(log_y, p - r);   // 1 - y^{p-r}
  const double R = ratio_R(m, e);
  const double T = ratio_T(m, e);

  // 1 - R(1-y^r) - y^p = y^r (1 - y^{p-r}) + T (1 - y^r)
  const double rad1 = yr * c + T * b;
  double h = std::pow(rad1, -1.0 / p);
  if (m > 0.0) {
    // 1 - R(1+m^r y^r) - m^p y^p = R m^r (1 - y^r) + m^p (1 - y^p)
    const double rad2 = R * abs_pow(m, r) * b + abs_pow(m, p) * a;
    h += m * std::pow(rad2, -1.0 / p);
  }
  return h;
}

double h_lower_bound(PExponent p) { return ptrig::pi_p(p) / p.amplitude(); }

HEvaluation eval_H(double m, const Exponents& e, double tol) {
  check_m(m);
  if (!(tol > 0.0)) throw DomainError("eval_H: tol must be positive");
  if (m == 0.0 && e.r_equals_p()) throw DivergenceError("H(0,p,p) = +infinity");
  auto f = [&](double y, double, double dr) { return integrand_h(m, e, y, dr); };
  const auto res = quad::tanh_sinh(f, 0.0, 1.0, tol);
  HEvaluation out;
  out.m = m;
  out.value = res.value;
  out.est_error = res.error;
  out.lambda_candidate = (e.p() - 1.0) * std::pow(res.value, e.p());
  const double bound = h_lower_bound(e.pexp());
  if (out.value < bound - out.est_error - 64.0 * std::numeric_limits<double>::epsilon() * bound) {
    throw SolverError("eval_H: value below pi_p/(p-1)^{1/p}", out.value, out.est_error);
  }
  return out;
}

double k_half(double m, PExponent pe, double tol) {
  if (!(m >= 0.0 && m <= 1.0)) throw DomainError("k_half: m must lie in [0,1]");
  const double p = pe.value();
  const double mh = std::pow(m, 0.5 * p);
  auto f = [&](double y, double, double dr) {
    const double log_y = y == 0.0 ? -std::numeric_limits<double>::infinity()
                         : y < 0.5 ? std::log(y)
                                   : std::log1p(-dr);
    const double yh = pow_from_log(log_y, 0.5 * p);
    const double one_minus_yh = one_minus_pow(log_y, 0.5 * p);
    // A = (1 - y^{p/2})(m^{p/2} + y^{p/2}),  B = m^{p/2}(1 - y^{p/2})(1 + m^{p/2} y^{p/2})
    const double A = one_minus_yh * (mh + yh);
    const double B = mh * one_minus_yh * (1.0 + mh * yh);
    const double first = std::pow(A, -1.0 / p);
    return m == 0.0 ? first : first + m * std::pow(B, -1.0 / p);
  };
  return quad::tanh_sinh(f, 0.0, 1.0, tol).value;
}

double lambda_candidate(double m, const Exponents& e, double tol) {
  return eval_H(m, e, tol).lambda_candidate;
}

MinOverM minimize_lambda_over_m(const Exponents& e, double tol) {
  const int n = 100;
  const int first = e.r_equals_p() ? 1 : 0;
  const double quad_tol = std::min(1e-12, tol);
  auto objective = [&](double m) { return lambda_candidate(m, e, quad_tol); };

  std::vector<double> values;
  int best = first;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (int i = first; i <= n; ++i) {
    const double v = objective(static_cast<double>(i) / n);
    values.push_back(v);
    if (v < values[static_cast<std::size_t>(best - first)]) best = i;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  MinOverM out;
  out.scan_spread = hi - lo;
  out.flat = out.scan_spread < 10.0 * tol;
  out.m_star = static_cast<double>(best) / n;
  out.lambda_star = values[static_cast<std::size_t>(best - first)];
  if (out.flat) return out;

  const double a = static_cast<double>(std::max(best - 1, first)) / n;
  const double b = static_cast<double>(std::min(best + 1, n)) / n;
  const auto [m_gs, v_gs] = roots::golden_section(objective, a, b, 1e-9);
  if (v_gs < out.lambda_star) {
    out.m_star = m_gs;
    out.lambda_star = v_gs;
  }
  return out;
}

}  // namespace nlsp::hfun
