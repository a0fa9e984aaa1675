#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <boost/math/special_functions/beta.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cmath>
#include <numbers>

#include "nlsp/errors.hpp"
#include "nlsp/ptrig.hpp"

using namespace nlsp;
using std::numbers::pi;

namespace {

// pi_p = 2 (p-1)^{1/p} B(1/p, 1-1/p) / p, from the substitution v = x^p.
double pi_p_beta(double p) {
  return 2.0 * std::pow(p - 1.0, 1.0 / p) * boost::math::beta(1.0 / p, 1.0 - 1.0 / p) / p;
}

// F_p(x) = (p-1)^{1/p}/p * B(s^p; 1/p, 1-1/p), s = x/(p-1)^{1/p}.
double asin_p_beta(double x, double p) {
  const double amp = std::pow(p - 1.0, 1.0 / p);
  const double s = x / amp;
  return amp / p * boost::math::beta(1.0 / p, 1.0 - 1.0 / p, std::pow(s, p));
}

}  // namespace

TEST_CASE("pi_p closed form at the reference exponents") {
  CHECK(ptrig::pi_p(PExponent(2.0)) == doctest::Approx(pi).epsilon(1e-15));
  CHECK(ptrig::pi_p(PExponent(3.0)) == doctest::Approx(3.04699).epsilon(1e-5));

  using big = boost::multiprecision::cpp_bin_float_50;
  const big p = 10;
  const big bpi = boost::multiprecision::acos(big(-1));
  const big ref = 2 * bpi * boost::multiprecision::pow(p - 1, 1 / p) / (p * boost::multiprecision::sin(bpi / p));
  CHECK(std::fabs(ptrig::pi_p(PExponent(10.0)) - ref.convert_to<double>()) < 1e-14);
}

TEST_CASE("pi_p agrees with its defining integral and with the beta function") {
  for (double p : {2.0, 2.5, 3.0, 5.0, 10.0}) {
    CAPTURE(p);
    const double closed = ptrig::pi_p(PExponent(p));
    const auto q = ptrig::pi_p_quadrature(PExponent(p));
    CHECK(std::fabs(q.value - closed) <= 1e-10);
    CHECK(std::fabs(pi_p_beta(p) - closed) <= 1e-13);
  }
}

TEST_CASE("asin_p matches the incomplete beta oracle") {
  for (double p : {2.0, 2.5, 3.0, 4.0, 7.0, 10.0}) {
    const double amp = PExponent(p).amplitude();
    for (double f : {0.0, 0.01, 0.2, 0.5, 0.8, 0.95, 0.999, 0.999999, 1.0}) {
      const double x = f * amp;
      CAPTURE(p);
      CAPTURE(x);
      CHECK(std::fabs(ptrig::asin_p(x, PExponent(p)) - asin_p_beta(x, p)) <= 1e-12);
    }
  }
}

TEST_CASE("asin_p series and quadrature agree") {
  for (double p : {2.0, 3.0, 5.0}) {
    const double amp = PExponent(p).amplitude();
    for (double f : {0.1, 0.6, 0.97}) {
      const auto q = ptrig::asin_p_quadrature(f * amp, PExponent(p));
      CHECK(std::fabs(ptrig::asin_p(f * amp, PExponent(p)) - q.value) <= 1e-11);
    }
  }
}

TEST_CASE("asin_p examples and domain") {
  CHECK(ptrig::asin_p(0.0, PExponent(3.0)) == 0.0);
  CHECK(ptrig::asin_p(0.5, PExponent(2.0)) == doctest::Approx(pi / 6).epsilon(1e-14));
  for (double p : {2.0, 3.0, 6.0}) {
    const PExponent pe(p);
    CHECK(ptrig::asin_p(pe.amplitude(), pe) == doctest::Approx(ptrig::pi_p(pe) / 2).epsilon(1e-14));
  }
  CHECK_THROWS_AS(ptrig::asin_p(-0.1, PExponent(2.0)), DomainError);
  CHECK_THROWS_AS(ptrig::asin_p(1.01 * PExponent(3.0).amplitude(), PExponent(3.0)), DomainError);
}

TEST_CASE("p below 2 is rejected") {
  CHECK_THROWS_AS(PExponent(1.5), DomainError);
  CHECK_THROWS_AS(PExponent(std::nan("")), DomainError);
}

TEST_CASE("sin_p, cos_p and the derivative at reference points") {
  for (double p : {2.0, 3.0, 5.0}) {
    const PExponent pe(p);
    const double pp = ptrig::pi_p(pe);
    CHECK(ptrig::sin_p(0.0, pe) == 0.0);
    CHECK(ptrig::sin_p(pp / 2, pe) == doctest::Approx(pe.amplitude()).epsilon(1e-13));
    CHECK(ptrig::cos_p(0.0, pe) == doctest::Approx(pe.amplitude()).epsilon(1e-13));
    CHECK(std::fabs(ptrig::cos_p(pp / 2, pe)) < 1e-13);
    CHECK(ptrig::sin_p_prime(0.0, pe) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::fabs(ptrig::sin_p_prime(pp / 2, pe)) < 1e-6);
  }
  const PExponent two(2.0);
  CHECK(ptrig::sin_p(1.0, two) == doctest::Approx(0.8414709848078965).epsilon(1e-14));
  CHECK(ptrig::cos_p(0.3, two) == doctest::Approx(std::cos(0.3)).epsilon(1e-14));
  CHECK(ptrig::sin_p_prime(0.7, two) == doctest::Approx(std::cos(0.7)).epsilon(1e-12));
}

TEST_CASE("p = 2 reduces to the classical functions") {
  const PExponent two(2.0);
  double worst_sin = 0.0;
  double worst_cos = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double t = -2 * pi + 4 * pi * i / 999.0;
    worst_sin = std::max(worst_sin, std::fabs(ptrig::sin_p(t, two) - std::sin(t)));
    worst_cos = std::max(worst_cos, std::fabs(ptrig::cos_p(t, two) - std::cos(t)));
  }
  CHECK(worst_sin <= 1e-10);
  CHECK(worst_cos <= 1e-10);
}

TEST_CASE("Pythagorean identity, periodicity, oddness") {
  for (double p : {2.0, 2.5, 3.0, 5.0, 10.0}) {
    const PExponent pe(p);
    const double pp = ptrig::pi_p(pe);
    double worst = 0.0;
    double worst_period = 0.0;
    for (int i = 0; i < 1000; ++i) {
      const double t = -2 * pp + 4 * pp * i / 999.0;
      const auto sc = ptrig::sin_p_with_derivative(t, pe);
      worst = std::max(worst, std::fabs(std::pow(std::fabs(sc.derivative), p) +
                                        std::pow(std::fabs(sc.value), p) / (p - 1) - 1.0));
      worst_period = std::max(worst_period, std::fabs(ptrig::sin_p(t + 2 * pp, pe) - sc.value));
      CHECK(ptrig::sin_p(-t, pe) == -ptrig::sin_p(t, pe));
      CHECK(ptrig::cos_p(t, pe) == ptrig::sin_p(t + pp / 2, pe));
      CHECK(sc.value == ptrig::sin_p(t, pe));
    }
    CAPTURE(p);
    CHECK(worst <= 1e-9);
    CHECK(worst_period <= 1e-10);
  }
}

TEST_CASE("asin_p inverts sin_p on the principal branch") {
  for (double p : {2.0, 3.0, 10.0}) {
    const PExponent pe(p);
    const double half = ptrig::pi_p(pe) / 2;
    for (int i = 0; i <= 200; ++i) {
      const double t = half * i / 200.0;
      CHECK(std::fabs(ptrig::asin_p(ptrig::sin_p(t, pe), pe) - t) <= 1e-10);
    }
  }
}

TEST_CASE("sin_p is increasing on the quarter period") {
  const PExponent pe(4.0);
  const double half = ptrig::pi_p(pe) / 2;
  double prev = -1.0;
  for (int i = 0; i <= 500; ++i) {
    const double v = ptrig::sin_p(half * i / 500.0, pe);
    CHECK(v > prev);
    prev = v;
  }
}

TEST_CASE("large arguments are reduced without drift") {
  const PExponent pe(3.0);
  const double pp = ptrig::pi_p(pe);
  CHECK(std::fabs(ptrig::sin_p(0.4 + 2000 * pp, pe) - ptrig::sin_p(0.4, pe)) < 1e-10);
}
