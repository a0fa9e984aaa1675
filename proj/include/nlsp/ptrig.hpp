#pragma once

// Generalized (p-circular) trigonometric functions.
//
// sin_p is the 2*pi_p periodic extension of the inverse of
//   F_p(x) = int_0^x [1 - t^p/(p-1)]^{-1/p} dt,   0 <= x <= (p-1)^{1/p},
// with sin_p(t) = F_p^{-1}(pi_p - t) on [pi_p/2, pi_p] and odd reflection on
// [-pi_p, 0]. It satisfies |sin_p'|^p + |sin_p|^p/(p-1) = 1 and reduces to
// the classical sine for p = 2.

#include "nlsp/exponents.hpp"
#include "nlsp/quadrature.hpp"

namespace nlsp::ptrig {

/// Closed form 2 pi (p-1)^{1/p} / (p sin(pi/p)).
double pi_p(PExponent p);

/// The defining integral 2 (p-1)^{1/p} int_0^1 (1-x^p)^{-1/p} dx by tanh-sinh.
quad::QuadResult pi_p_quadrature(PExponent p, double tol = 1e-13);

/// F_p(x) for 0 <= x <= (p-1)^{1/p}. Evaluated from the two hypergeometric
/// expansions of the incomplete integral (around 0 and around the endpoint).
double asin_p(double x, PExponent p);

/// F_p(x) by direct tanh-sinh quadrature of the defining integral.
quad::QuadResult asin_p_quadrature(double x, PExponent p, double tol = 1e-13);

double sin_p(double t, PExponent p);

/// Exactly sin_p(t + pi_p/2).
double cos_p(double t, PExponent p);

double sin_p_prime(double t, PExponent p);

struct SinCosP {
  double value;
  double derivative;
};

/// sin_p(t) and sin_p'(t) from a single inversion.
SinCosP sin_p_with_derivative(double t, PExponent p);

}  // namespace nlsp::ptrig
