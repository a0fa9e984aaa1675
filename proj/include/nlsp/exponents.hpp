#pragma once

#include <cmath>
#include <string>

#include "nlsp/errors.hpp"

namespace nlsp {

/// Exponent p of the p-Laplacian. Only p >= 2 is supported.
class PExponent {
 public:
  explicit PExponent(double p) : p_(p) {
    if (!std::isfinite(p)) throw DomainError("p must be finite");
    if (p < 2.0) throw DomainError("p must satisfy p >= 2, got " + std::to_string(p));
  }

  double value() const { return p_; }
  /// Hölder conjugate p' = p/(p-1).
  double conjugate() const { return p_ / (p_ - 1.0); }
  /// Amplitude of sin_p, (p-1)^{1/p}.
  double amplitude() const { return std::pow(p_ - 1.0, 1.0 / p_); }

 private:
  double p_;
};

/// The triple (p, r, alpha) with p >= 2 and p/2 <= r <= p.
class Exponents {
 public:
  Exponents(double p, double r, double alpha = 0.0) : p_(p), r_(r), alpha_(alpha) {
    if (!std::isfinite(r)) throw DomainError("r must be finite");
    if (!std::isfinite(alpha)) throw DomainError("alpha must be finite");
    if (r < 0.5 * p || r > p) {
      throw DomainError("r must satisfy p/2 <= r <= p (p=" + std::to_string(p) +
                        ", r=" + std::to_string(r) + ")");
    }
  }

  double p() const { return p_.value(); }
  double r() const { return r_; }
  double alpha() const { return alpha_; }
  PExponent pexp() const { return p_; }

  bool r_equals_p() const { return r_ == p_.value(); }
  bool r_is_half_p() const { return r_ == 0.5 * p_.value(); }

  Exponents with_alpha(double alpha) const { return Exponents(p(), r_, alpha); }

 private:
  PExponent p_;
  double r_;
  double alpha_;
};

/// |x|^e for e >= 0 with 0^e = 0 for e > 0 and 0^0 = 1.
inline double abs_pow(double x, double e) {
  const double a = std::fabs(x);
  if (a == 0.0) return e == 0.0 ? 1.0 : 0.0;
  return std::pow(a, e);
}

/// |x|^{e-1} x, the odd power.
inline double signed_pow(double x, double e) {
  return x < 0.0 ? -abs_pow(x, e) : abs_pow(x, e);
}

}  // namespace nlsp
