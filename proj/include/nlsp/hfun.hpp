#pragma once

// The depth-ratio integral H(m,p,r) and the sign-changing eigenvalue
// representation lambda = (p-1) H(m,p,r)^p, where -m is the minimum of a
// sign-changing minimizer normalized to maximum 1.

#include "nlsp/exponents.hpp"

namespace nlsp::hfun {

/// R(m,p,r) = (1 - m^p)/(1 + m^r).
double ratio_R(double m, const Exponents& e);

/// T(m,p,r) = (m^p + m^r)/(1 + m^r) = 1 - R.
double ratio_T(double m, const Exponents& e);

/// Integrand of H folded onto [0,1]:
///   h(y) = [1 - R(1-y^r) - y^p]^{-1/p} + m [1 - R(1+m^r y^r) - m^p y^p]^{-1/p}.
/// Both radicands are evaluated as sums of nonnegative terms, so the
/// expression stays accurate as y -> 1 and as y -> 0 with m -> 0.
double integrand_h(double m, const Exponents& e, double y);

/// Same, with the distance 1 - y supplied by the caller (quadrature nodes
/// near y = 1 carry it exactly).
double integrand_h(double m, const Exponents& e, double y, double one_minus_y);

struct HEvaluation {
  double m = 0.0;
  double value = 0.0;
  double est_error = 0.0;
  double lambda_candidate = 0.0;  // (p-1) value^p
};

/// pi_p / (p-1)^{1/p}, the minimum of H over m.
double h_lower_bound(PExponent p);

/// H(m,p,r) = int_0^1 h(y) dy by tanh-sinh.
/// Throws DivergenceError for m = 0, r = p and ToleranceError when the
/// quadrature cannot reach `tol`.
HEvaluation eval_H(double m, const Exponents& e, double tol = 1e-12);

/// H(m,p,p/2) written through
///   A(m,y) = m^{p/2} + (1-m^{p/2}) y^{p/2} - y^p,
///   B(m,y) = m^{p/2} - (1-m^{p/2}) m^{p/2} y^{p/2} - m^p y^p,
/// as int_0^1 (A^{-1/p} + m B^{-1/p}) dy. Coded independently of eval_H so
/// the two can check each other.
double k_half(double m, PExponent p, double tol = 1e-12);

/// (p-1) H(m,p,r)^p.
double lambda_candidate(double m, const Exponents& e, double tol = 1e-12);

struct MinOverM {
  double m_star = 0.0;
  double lambda_star = 0.0;
  bool flat = false;         // objective constant over the scan within 10 tol
  double scan_spread = 0.0;  // max - min of the scanned objective
};

/// Minimizes lambda_candidate over m in [0,1] (0 excluded when r = p) by a
/// 101-point scan followed by golden-section refinement of the best bracket.
MinOverM minimize_lambda_over_m(const Exponents& e, double tol = 1e-10);

}  // namespace nlsp::hfun
