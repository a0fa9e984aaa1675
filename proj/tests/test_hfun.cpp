#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <numbers>

#include "nlsp/errors.hpp"
#include "nlsp/hfun.hpp"
#include "nlsp/ptrig.hpp"

using namespace nlsp;
using std::numbers::pi;

namespace {

// Brute-force H in long double with Boost's tanh-sinh. 1 - y^s is formed from
// the complement distance so the (1-y)^{-1/p} end is resolved.
double h_oracle(double m_d, double p_d, double r_d) {
  using ld = long double;
  const ld m = m_d, p = p_d, r = r_d;
  const ld R = (1 - std::pow(m, p)) / (1 + std::pow(m, r));
  auto one_minus_pow = [](ld y, ld yc, ld s) {
    return yc < 0.5L ? -std::expm1(s * std::log1p(-yc)) : 1 - std::pow(y, s);
  };
  const ld T = 1 - R;
  auto first = [&](ld y, ld yc) {
    const ld rad = y < 0.5L ? T + R * std::pow(y, r) - std::pow(y, p)
                            : one_minus_pow(y, yc, p) - R * one_minus_pow(y, yc, r);
    return rad > 0 ? std::pow(rad, -1 / p) : 0.0L;
  };
  auto second = [&](ld y, ld yc) {
    const ld rad = std::pow(m, p) * one_minus_pow(y, yc, p) + R * std::pow(m, r) * one_minus_pow(y, yc, r);
    return rad > 0 ? std::pow(rad, -1 / p) : 0.0L;
  };
  boost::math::quadrature::tanh_sinh<ld> ts;
  auto shift = [](auto f) {
    return [f](ld x, ld xc) {
      // Boost integrates on [-1,1] and passes the distance to the nearer end
      // (negated on the left); map to y = (x+1)/2.
      const ld y = x < 0 ? -xc / 2 : (x + 1) / 2;
      const ld yc = x > 0 ? xc / 2 : 1 - y;
      return f(y, yc) / 2;
    };
  };
  ld total = ts.integrate(shift(first), -1.0L, 1.0L);
  if (m > 0) total += m * ts.integrate(shift(second), -1.0L, 1.0L);
  return static_cast<double>(total);
}

double bound(double p) { return hfun::h_lower_bound(PExponent(p)); }

}  // namespace

TEST_CASE("R and T") {
  const Exponents e(2.0, 2.0);
  CHECK(hfun::ratio_R(1.0, e) == 0.0);
  CHECK(hfun::ratio_R(0.0, e) == 1.0);
  CHECK(hfun::ratio_R(0.5, e) == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(hfun::ratio_T(0.5, e) == doctest::Approx(0.4).epsilon(1e-15));
  CHECK_THROWS_AS(hfun::ratio_R(1.5, e), DomainError);
  CHECK_THROWS_AS(hfun::ratio_R(-0.1, e), DomainError);

  const Exponents f(3.0, 2.0);
  double prev = 2.0;
  for (int i = 0; i <= 20; ++i) {
    const double m = i / 20.0;
    const double R = hfun::ratio_R(m, f);
    CHECK(R <= prev);
    CHECK(R + hfun::ratio_T(m, f) == doctest::Approx(1.0).epsilon(1e-15));
    prev = R;
  }
}

TEST_CASE("integrand closed forms") {
  for (double p : {2.0, 3.0}) {
    for (double r : {p / 2, 0.75 * p, p}) {
      const Exponents e(p, r);
      for (double y : {0.0, 0.3, 0.9}) {
        CHECK(hfun::integrand_h(1.0, e, y) == doctest::Approx(2.0 / std::pow(1 - std::pow(y, p), 1 / p)).epsilon(1e-13));
      }
      for (double m : {0.2, 0.5, 0.9}) {
        const double expect = (1 + m) / std::pow(1 - hfun::ratio_R(m, e), 1 / p);
        CHECK(hfun::integrand_h(m, e, 0.0) == doctest::Approx(expect).epsilon(1e-13));
      }
    }
  }
  CHECK(hfun::integrand_h(0.5, Exponents(2.0, 2.0), 0.0) == doctest::Approx(1.5 / std::sqrt(0.4)).epsilon(1e-14));
}

TEST_CASE("integrand is positive with a (1-y)^{-1/p} blow-up") {
  for (double p : {2.0, 3.0, 5.0}) {
    const Exponents e(p, 0.8 * p);
    for (double m : {0.1, 0.6, 1.0}) {
      double lo = INFINITY, hi = 0.0;
      for (int k = 2; k <= 14; ++k) {
        const double d = std::pow(10.0, -k);
        const double ratio = hfun::integrand_h(m, e, 1.0 - d, d) * std::pow(d, 1 / p);
        CHECK(ratio > 0.0);
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
      }
      CHECK(hi / lo < 1.01);
      for (int i = 1; i < 100; ++i) CHECK(hfun::integrand_h(m, e, i / 100.0) > 0.0);
    }
  }
}

TEST_CASE("H endpoint value at m = 1") {
  for (double p : {2.0, 3.0, 5.0}) {
    for (double r : {p / 2, 0.75 * p, p}) {
      CHECK(std::fabs(hfun::eval_H(1.0, Exponents(p, r)).value - bound(p)) <= 1e-9);
    }
  }
  CHECK(hfun::eval_H(1.0, Exponents(3.0, 2.0)).value == doctest::Approx(2.41840).epsilon(1e-5));
}

TEST_CASE("H is constant in m at r = p/2 and matches k_half") {
  CHECK(hfun::eval_H(0.4, Exponents(4.0, 2.0)).value == doctest::Approx(bound(4.0)).epsilon(1e-12));
  CHECK(hfun::k_half(1.0, PExponent(2.0)) == doctest::Approx(pi).epsilon(1e-13));
  CHECK(hfun::k_half(0.3, PExponent(2.0)) == doctest::Approx(pi).epsilon(1e-12));
  CHECK(hfun::k_half(0.7, PExponent(6.0)) == doctest::Approx(bound(6.0)).epsilon(1e-12));
  for (double p : {2.0, 3.0, 4.0}) {
    for (int i = 0; i <= 10; ++i) {
      const double m = i / 10.0;
      const double h = hfun::eval_H(m, Exponents(p, p / 2)).value;
      CAPTURE(p);
      CAPTURE(m);
      CHECK(std::fabs(h - bound(p)) <= 1e-8);
      CHECK(std::fabs(h - hfun::k_half(m, PExponent(p))) <= 1e-8);
    }
  }
}

TEST_CASE("H matches a long-double brute-force oracle") {
  const double cases[][3] = {{0.5, 2, 2}, {0.1, 2, 1.5}, {0.0, 2, 1.5}, {0.3, 3, 2}, {0.8, 4, 3}, {0.05, 5, 4}};
  for (const auto& c : cases) {
    CAPTURE(c[0]);
    CAPTURE(c[1]);
    CAPTURE(c[2]);
    const double h = hfun::eval_H(c[0], Exponents(c[1], c[2])).value;
    CHECK(h == doctest::Approx(h_oracle(c[0], c[1], c[2])).epsilon(1e-10));
  }
  // Frozen reference from the oracle above.
  CHECK(hfun::eval_H(0.5, Exponents(2.0, 2.0)).value > pi + 1e-3);
  CHECK(hfun::lambda_candidate(0.5, Exponents(2.0, 2.0)) > pi * pi);
}

TEST_CASE("H is strictly increasing in r") {
  for (double p : {2.0, 3.0, 4.0}) {
    for (int i = 1; i <= 9; ++i) {
      const double m = i / 10.0;
      double prev = -1.0;
      for (int k = 0; k <= 10; ++k) {
        const double r = p / 2 + (p / 2) * k / 10.0;
        const double h = hfun::eval_H(m, Exponents(p, r)).value;
        if (k > 0) CHECK(h - prev > 1e-7);
        prev = h;
      }
    }
  }
}

TEST_CASE("H never drops below its minimum") {
  for (double p : {2.0, 3.0, 5.0}) {
    for (double r : {p / 2, 0.6 * p, 0.8 * p, p}) {
      for (int i = (r == p ? 1 : 0); i <= 10; ++i) {
        CHECK(hfun::eval_H(i / 10.0, Exponents(p, r)).value >= bound(p) - 1e-8);
      }
    }
  }
}

TEST_CASE("H diverges at m = 0 when r = p") {
  CHECK_THROWS_AS(hfun::eval_H(0.0, Exponents(2.0, 2.0)), DivergenceError);
  CHECK_THROWS_AS(hfun::eval_H(0.0, Exponents(3.0, 3.0)), DivergenceError);
  CHECK(std::isfinite(hfun::eval_H(0.0, Exponents(3.0, 2.5)).value));
  CHECK_THROWS_AS(hfun::eval_H(1.1, Exponents(3.0, 2.0)), DomainError);
}

TEST_CASE("H evaluation reports consistent fields") {
  const auto h = hfun::eval_H(0.4, Exponents(3.0, 2.5), 1e-12);
  CHECK(h.m == 0.4);
  CHECK(h.est_error <= 1e-12);
  CHECK(h.lambda_candidate == doctest::Approx(2.0 * std::pow(h.value, 3.0)).epsilon(1e-15));
}

TEST_CASE("minimum of the eigenvalue representation over m") {
  const auto a = hfun::minimize_lambda_over_m(Exponents(3.0, 3.0));
  CHECK(a.m_star == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(a.lambda_star == doctest::Approx(std::pow(ptrig::pi_p(PExponent(3.0)), 3.0)).epsilon(1e-9));
  CHECK(!a.flat);

  const auto b = hfun::minimize_lambda_over_m(Exponents(4.0, 2.0));
  CHECK(b.flat);
  // (p-1) H^p with H = pi_p/(p-1)^{1/p}, i.e. pi_p^p itself.
  CHECK(b.lambda_star == doctest::Approx(std::pow(ptrig::pi_p(PExponent(4.0)), 4.0)).epsilon(1e-9));

  const auto c = hfun::minimize_lambda_over_m(Exponents(2.0, 1.5));
  CHECK(c.m_star == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(c.lambda_star == doctest::Approx(pi * pi).epsilon(1e-9));
}
