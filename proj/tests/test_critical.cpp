#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include <cmath>
#include <numbers>
#include <sstream>

#include "nlsp/critical.hpp"
#include "nlsp/errors.hpp"
#include "nlsp/ptrig.hpp"

using namespace nlsp;
using namespace nlsp::critical;
using std::numbers::pi;

namespace {

double pip(double p) { return ptrig::pi_p(PExponent(p)); }

CurveOptions curve_options(int n) {
  CurveOptions o;
  o.n_cells = n;
  o.minimize.threads = 2;
  return o;
}

}  // namespace

TEST_CASE("closed-form threshold and lower bound") {
  CHECK(alpha_c_exact_rp(PExponent(2.0)) == doctest::Approx(3 * pi * pi / 4).epsilon(1e-15));
  CHECK(alpha_c_exact_rp(PExponent(3.0)) == doctest::Approx(7.0 / 8 * std::pow(pip(3.0), 3)).epsilon(1e-15));
  CHECK(alpha_c_exact_rp(PExponent(40.0)) / std::pow(pip(40.0), 40.0) == doctest::Approx(1.0).epsilon(1e-11));

  for (double p : {2.0, 3.0, 5.0}) {
    CHECK(alpha_c_lower_bound(Exponents(p, p)) == doctest::Approx(alpha_c_exact_rp(PExponent(p))).epsilon(1e-15));
  }
  CHECK(alpha_c_lower_bound(Exponents(2.0, 1.0)) == doctest::Approx(3 * pi * pi / 8).epsilon(1e-15));
  CHECK(alpha_c_lower_bound(Exponents(2.0, 1.0)) == doctest::Approx(3.7011).epsilon(1e-4));
  CHECK(alpha_c_lower_bound(Exponents(4.0, 2.0)) == doctest::Approx(15.0 / 32 * std::pow(pip(4.0), 4)).epsilon(1e-15));
}

TEST_CASE("Lipschitz constant") {
  CHECK(lipschitz_constant(Exponents(2.0, 2.0)) == 1.0);
  CHECK(lipschitz_constant(Exponents(2.0, 1.0)) == doctest::Approx(2.0));
  CHECK(lipschitz_constant(Exponents(3.0, 2.0)) == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("interval rescaling") {
  const Exponents e(2.0, 2.0);
  const auto id = rescale_interval(3.3, 1.7, e, -1.0, 1.0);
  CHECK(id.lambda == 3.3);
  CHECK(id.alpha == 1.7);
  const auto shifted = rescale_interval(3.3, 1.7, e, 0.0, 2.0);
  CHECK(shifted.lambda == doctest::Approx(3.3));
  CHECK(shifted.alpha == doctest::Approx(1.7));
  const auto wide = rescale_interval(8.0, 1.0, e, -2.0, 2.0);
  CHECK(wide.lambda == doctest::Approx(2.0));
  CHECK(wide.alpha == doctest::Approx(4.0));
  CHECK_THROWS_AS(rescale_interval(1.0, 1.0, e, 1.0, 1.0), DomainError);
  CHECK_THROWS_AS(rescale_interval(1.0, 1.0, e, 2.0, 1.0), DomainError);

  for (const auto& ex : {Exponents(2.0, 1.0), Exponents(3.0, 2.2), Exponents(5.0, 5.0)}) {
    for (double a : {-3.0, 0.5}) {
      const double b = a + 0.37;
      const auto f = rescale_interval(4.2, -1.3, ex, a, b);
      const auto back = rescale_interval_inverse(f.lambda, f.alpha, ex, a, b);
      CHECK(std::fabs(back.lambda - 4.2) <= 1e-14 * 4.2);
      CHECK(std::fabs(back.alpha + 1.3) <= 1e-14 * 1.3);
    }
  }
}

TEST_CASE("curve for p = r = 2 saturates at pi^2 past the threshold") {
  const auto curve = lambda_curve(Exponents(2.0, 2.0), 0.0, 12.0, 25, curve_options(512));
  CHECK(curve.violations.empty());
  REQUIRE(curve.points.size() == 25);
  const double ac = 3 * pi * pi / 4;
  CHECK(curve.points.front().lambda == doctest::Approx(pi * pi / 4).epsilon(1e-4));
  for (std::size_t i = 0; i < curve.points.size(); ++i) {
    const auto& pt = curve.points[i];
    CHECK(pt.ok);
    if (i > 0) CHECK(pt.alpha > curve.points[i - 1].alpha);
    if (pt.alpha > ac + 0.1) {
      CHECK(pt.lambda == doctest::Approx(pi * pi).epsilon(1e-4));
      CHECK(pt.sign_class == variational::SignClass::sign_changing);
    }
    if (pt.alpha < ac - 0.1) {
      CHECK(pt.lambda < pi * pi * (1 - 1e-3));
      CHECK(pt.sign_class == variational::SignClass::positive);
    }
  }
}

TEST_CASE("curve on negative alphas stays positive and increasing") {
  const auto curve = lambda_curve(Exponents(2.0, 2.0), -3.0, 0.0, 7, curve_options(512));
  CHECK(curve.violations.empty());
  for (std::size_t i = 0; i < curve.points.size(); ++i) {
    CHECK(curve.points[i].sign_class == variational::SignClass::positive);
    if (i > 0) CHECK(curve.points[i].lambda > curve.points[i - 1].lambda);
  }
}

TEST_CASE("curve CSV layout") {
  const auto curve = lambda_curve(Exponents(3.0, 2.0), 0.0, 1.0, 2, curve_options(128));
  std::ostringstream os;
  write_csv(os, curve);
  const std::string s = os.str();
  CHECK(s.rfind("alpha,lambda,moment,sign_class,odd_defect\n0,", 0) == 0);
  CHECK(std::count(s.begin(), s.end(), '\n') == 3);
  CHECK_THROWS_AS(lambda_curve(Exponents(3.0, 2.0), 1.0, 0.0, 5), DomainError);
  CHECK_THROWS_AS(lambda_curve(Exponents(3.0, 2.0), 0.0, 1.0, 1), DomainError);
}

TEST_CASE("threshold for p = r = 2 brackets the closed form") {
  AlphaCOptions o;
  o.n_cells = 256;
  o.minimize.threads = 2;
  const auto res = find_alpha_c(Exponents(2.0, 2.0), o);
  const double exact = 3 * pi * pi / 4;
  CHECK(res.lo <= exact);
  CHECK(exact <= res.hi);
  CHECK(res.hi - res.lo <= o.tol);
  CHECK(res.shooting_certified);
  CHECK(res.lambda_lo < pi * pi - res.delta);
  CHECK(res.lambda_hi >= pi * pi - res.delta);
  REQUIRE(res.closed_form.has_value());
  CHECK(*res.closed_form == doctest::Approx(exact).epsilon(1e-15));
  REQUIRE(res.positive_branch.has_value());
  REQUIRE(res.odd_branch.has_value());
  CHECK(res.odd_branch->lambda == doctest::Approx(pi * pi).epsilon(1e-8));

  const auto j = nlohmann::json::parse(to_json(res));
  for (const char* key : {"alpha_c", "lo", "hi", "lambda_lo", "lambda_hi", "iterations", "p", "r", "tol"}) {
    CHECK(j.contains(key));
  }
  CHECK(j.contains("closed_form"));
  CHECK(j.contains("relative_deviation"));
}

TEST_CASE("threshold for p = 2, r = 1 sits at half of pi^2, above the bound") {
  AlphaCOptions o;
  o.n_cells = 256;
  o.minimize.threads = 2;
  const auto res = find_alpha_c(Exponents(2.0, 1.0), o);
  CHECK(res.alpha_c >= alpha_c_lower_bound(Exponents(2.0, 1.0)) - 1e-2);
  // Frozen from a shooting run at tol 1e-9: 4.934802...
  CHECK(res.alpha_c == doctest::Approx(pi * pi / 2).epsilon(1e-6));
  CHECK(!nlohmann::json::parse(to_json(res)).contains("closed_form"));
}

TEST_CASE("FEM-only threshold stays within the discretization band") {
  AlphaCOptions o;
  o.n_cells = 256;
  o.use_shooting = false;
  o.tol = 1e-3;
  const auto res = find_alpha_c(Exponents(3.0, 3.0), o);
  CHECK(!res.shooting_certified);
  CHECK(res.alpha_c == doctest::Approx(alpha_c_exact_rp(PExponent(3.0))).epsilon(1e-2));
}

TEST_CASE("zero crossing for r = p") {
  ZeroCrossingOptions o;
  o.n_cells = 512;
  for (double p : {2.0, 3.0}) {
    const auto z = alpha_zero_crossing(Exponents(p, p), o);
    const double exact = -std::pow(pip(p) / 2, p);
    CHECK(z.alpha_star == doctest::Approx(exact).epsilon(1e-3));
    CHECK(z.certificate == doctest::Approx(-z.alpha_star).epsilon(1e-6));
    CHECK(z.bracket_lo <= z.alpha_star);
    CHECK(z.alpha_star <= z.bracket_hi);
  }
}

TEST_CASE("zero crossing for p = 2, r = 1 matches the L^r quotient") {
  ZeroCrossingOptions o;
  o.n_cells = 512;
  const auto z = alpha_zero_crossing(Exponents(2.0, 1.0), o);
  CHECK(z.alpha_star < 0.0);
  // min int|w'|^2 / (int|w|)^2 on (-1,1) is 3/2, attained by the parabola 1 - x^2.
  CHECK(z.alpha_star == doctest::Approx(-1.5).epsilon(1e-5));
  CHECK(z.certificate == doctest::Approx(1.5).epsilon(1e-5));
}
