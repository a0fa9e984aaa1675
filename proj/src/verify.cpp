#include "nlsp/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>

#include "nlsp/critical.hpp"
#include "nlsp/errors.hpp"
#include "nlsp/hfun.hpp"
#include "nlsp/ptrig.hpp"
#include "nlsp/variational.hpp"

namespace nlsp::verify {

namespace {

using variational::SignClass;

double pi_p_pow(double p) { return std::pow(ptrig::pi_p(PExponent(p)), p); }

std::string fmt_g(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string pr_tag(double p, double r) { return "[p=" + fmt_g(p) + ",r=" + fmt_g(r) + "]"; }

// measured <= tol
Check at_most(std::string name, double measured, double tol) {
  return {std::move(name), measured, 0.0, tol, std::isfinite(measured) && measured <= tol};
}

// |measured - expected| <= tol
Check close_to(std::string name, double measured, double expected, double tol) {
  return {std::move(name), measured, expected, tol,
          std::isfinite(measured) && std::fabs(measured - expected) <= tol};
}

// measured >= expected - tol
Check at_least(std::string name, double measured, double expected, double tol) {
  return {std::move(name), measured, expected, tol, std::isfinite(measured) && measured >= expected - tol};
}

Check failure(std::string name, const std::exception& ex) {
  return {std::move(name) + " threw: " + ex.what(), std::nan(""), 0.0, 0.0, false};
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct SignChangingSample {
  std::string label;
  double p;
  double r;
  double lambda;
  double m_bar;
};

class Runner {
 public:
  explicit Runner(const Options& o) : o_(o) {
    fem_cells_ = o.fast ? 512 : 2048;
    alpha_c_cells_ = o.fast ? 256 : 1024;
    minimize_.threads = o.threads;
  }

  Criterion run(int id) {
    Criterion c;
    c.id = id;
    const auto t0 = std::chrono::steady_clock::now();
    switch (id) {
      case 1: pi_p_identity(c); break;
      case 2: p2_reduction(c); break;
      case 3: ode_identity(c); break;
      case 4: h_endpoint(c); break;
      case 5: h_half_constancy(c); break;
      case 6: h_monotone_in_r(c); break;
      case 7: classical_eigenvalue(c); break;
      case 8: closed_form_threshold(c); break;
      case 9: saturation(c); break;
      case 10: sub_critical(c); break;
      case 11: monotone_curve(c); break;
      case 12: zero_crossing(c); break;
      case 13: cross_certification(c); break;
      case 14: lower_bound_consistency(c); break;
      default: throw DomainError("unknown check " + std::to_string(id));
    }
    c.seconds = seconds_since(t0);
    return c;
  }

 private:
  const critical::AlphaCResult& alpha_c(double p, double r) {
    const auto key = std::make_pair(p, r);
    auto it = alpha_c_cache_.find(key);
    if (it == alpha_c_cache_.end()) {
      critical::AlphaCOptions ao;
      ao.n_cells = alpha_c_cells_;
      ao.minimize = minimize_;
      it = alpha_c_cache_.emplace(key, critical::find_alpha_c(Exponents(p, r), ao)).first;
    }
    return it->second;
  }

  void remember(const std::string& label, double p, double r, const variational::RayleighResult& res) {
    if (res.sign_class == SignClass::sign_changing) {
      sign_changing_.push_back({label, p, r, res.lambda, res.classification.m_bar});
    }
  }

  void pi_p_identity(Criterion& c) {
    c.title = "pi_p closed form vs defining integral";
    const auto t0 = std::chrono::steady_clock::now();
    for (double p : {2.0, 2.5, 3.0, 5.0, 10.0}) {
      const PExponent pe(p);
      const double q = ptrig::pi_p_quadrature(pe).value;
      c.checks.push_back(close_to("pi_p[p=" + fmt_g(p) + "]", q, ptrig::pi_p(pe), 1e-10));
    }
    c.checks.push_back(close_to("pi_2", ptrig::pi_p(PExponent(2.0)), std::numbers::pi, 1e-12));
    c.checks.push_back(at_most("runtime_s", seconds_since(t0), 1.0));
  }

  static std::vector<double> trig_grid() {
    std::vector<double> t(1000);
    for (std::size_t i = 0; i < t.size(); ++i) {
      t[i] = -2.0 * std::numbers::pi + 4.0 * std::numbers::pi * static_cast<double>(i) / (t.size() - 1);
    }
    return t;
  }

  void p2_reduction(Criterion& c) {
    c.title = "sin_2 equals sin";
    const auto t0 = std::chrono::steady_clock::now();
    const PExponent p2(2.0);
    double worst = 0.0;
    for (double t : trig_grid()) worst = std::max(worst, std::fabs(ptrig::sin_p(t, p2) - std::sin(t)));
    c.checks.push_back(at_most("max_abs_sin2_minus_sin", worst, 1e-10));
    c.checks.push_back(at_most("runtime_s", seconds_since(t0), 1.0));
  }

  void ode_identity(Criterion& c) {
    c.title = "|sin_p'|^p + |sin_p|^p/(p-1) = 1";
    for (double p : {2.0, 3.0, 10.0}) {
      const PExponent pe(p);
      double worst = 0.0;
      for (double t : trig_grid()) {
        const auto sc = ptrig::sin_p_with_derivative(t, pe);
        const double v = std::pow(std::fabs(sc.derivative), p) + std::pow(std::fabs(sc.value), p) / (p - 1.0);
        worst = std::max(worst, std::fabs(v - 1.0));
      }
      c.checks.push_back(at_most("identity_defect[p=" + fmt_g(p) + "]", worst, 1e-9));
    }
  }

  void h_endpoint(Criterion& c) {
    c.title = "H(1,p,r) = pi_p/(p-1)^{1/p}";
    const auto t0 = std::chrono::steady_clock::now();
    for (double p : {2.0, 3.0, 5.0}) {
      for (double r : {0.5 * p, 0.75 * p, p}) {
        const Exponents e(p, r);
        c.checks.push_back(close_to("H(1)" + pr_tag(p, r), hfun::eval_H(1.0, e).value,
                                    hfun::h_lower_bound(e.pexp()), 1e-9));
      }
    }
    c.checks.push_back(at_most("runtime_s", seconds_since(t0), 5.0));
  }

  void h_half_constancy(Criterion& c) {
    c.title = "H(m,p,p/2) is constant in m";
    for (double p : {2.0, 3.0, 4.0}) {
      const Exponents e(p, 0.5 * p);
      const double bound = hfun::h_lower_bound(e.pexp());
      double dev = 0.0;
      double dev_k = 0.0;
      for (int i = 0; i <= 10; ++i) {
        const double m = 0.1 * i;
        const double h = hfun::eval_H(m, e).value;
        dev = std::max(dev, std::fabs(h - bound));
        dev_k = std::max(dev_k, std::fabs(h - hfun::k_half(m, e.pexp())));
      }
      c.checks.push_back(at_most("max_dev_from_bound[p=" + fmt_g(p) + "]", dev, 1e-8));
      c.checks.push_back(at_most("max_dev_from_k_half[p=" + fmt_g(p) + "]", dev_k, 1e-8));
    }
  }

  void h_monotone_in_r(Criterion& c) {
    c.title = "H(m,p,r) strictly increasing in r";
    for (double p : {2.0, 3.0, 4.0}) {
      double min_inc = INFINITY;
      for (int j = 1; j <= 9; ++j) {
        const double m = 0.1 * j;
        double prev = NAN;
        for (int k = 0; k <= 10; ++k) {
          const double r = 0.5 * p + 0.5 * p * k / 10.0;
          const double h = hfun::eval_H(m, Exponents(p, r)).value;
          if (k > 0) min_inc = std::min(min_inc, h - prev);
          prev = h;
        }
      }
      Check ch{"min_increment[p=" + fmt_g(p) + "]", min_inc, 1e-7, 0.0, min_inc > 1e-7};
      c.checks.push_back(ch);
    }
  }

  void classical_eigenvalue(Criterion& c) {
    c.title = "alpha = 0 gives (pi_p/2)^p";
    const auto t0 = std::chrono::steady_clock::now();
    for (double p : {2.0, 3.0}) {
      const Exponents e(p, p, 0.0);
      const double exact = std::pow(0.5 * ptrig::pi_p(e.pexp()), p);
      try {
        const auto fem = variational::minimize_rayleigh(e, fem_cells_, minimize_);
        c.checks.push_back(at_most("fem_rel_err[p=" + fmt_g(p) + "]", std::fabs(fem.lambda - exact) / exact, 1e-3));
        const auto sh = variational::shooting_from(fem, e, variational::Branch::constant_sign, 1e-11);
        c.checks.push_back(at_most("shoot_rel_err[p=" + fmt_g(p) + "]", std::fabs(sh.lambda - exact) / exact, 1e-8));
      } catch (const std::exception& ex) {
        c.checks.push_back(failure("alpha0[p=" + fmt_g(p) + "]", ex));
      }
    }
    c.checks.push_back(at_most("runtime_s", seconds_since(t0), 30.0));
  }

  void closed_form_threshold(Criterion& c) {
    c.title = "alpha_C(p,p) matches (2^p-1)/2^p pi_p^p";
    for (double p : {2.0, 3.0}) {
      const auto t0 = std::chrono::steady_clock::now();
      const std::string tag = "[p=r=" + fmt_g(p) + "]";
      try {
        const auto& res = alpha_c(p, p);
        const double exact = critical::alpha_c_exact_rp(PExponent(p));
        c.checks.push_back(at_most("rel_dev" + tag, std::fabs(res.alpha_c - exact) / exact, 1e-2));
        const double outside = std::max({res.lo - exact, exact - res.hi, 0.0});
        c.checks.push_back(at_most("closed_form_outside_bracket" + tag, outside, 0.0));
      } catch (const std::exception& ex) {
        c.checks.push_back(failure("alpha_c" + tag, ex));
      }
      c.checks.push_back(at_most("runtime_s" + tag, seconds_since(t0), 300.0));
    }
  }

  static constexpr std::pair<double, double> kSaturationPairs[] = {{2.0, 2.0}, {2.0, 1.5}, {3.0, 2.0}};

  void saturation(Criterion& c) {
    c.title = "saturation at alpha = 2 alpha_C";
    for (auto [p, r] : kSaturationPairs) {
      const std::string tag = pr_tag(p, r);
      try {
        const double a = 2.0 * alpha_c(p, r).alpha_c;
        const auto res = variational::minimize_rayleigh(Exponents(p, r, a), fem_cells_, minimize_);
        remember("saturated" + tag, p, r, res);
        const double target = pi_p_pow(p);
        c.checks.push_back(at_most("lambda_rel_dev" + tag, std::fabs(res.lambda - target) / target, 2e-3));
        c.checks.push_back(at_most("abs_moment" + tag, std::fabs(res.moment), 1e-3));
        c.checks.push_back(at_most("odd_defect" + tag, res.odd_defect, 1e-2));
        const auto& cl = res.classification;
        c.checks.push_back(close_to("sign_changes" + tag, cl.sign_changes, 1.0, 0.0));
        c.checks.push_back(at_most("zero_location" + tag, std::fabs(cl.zero_location), 1e-2));
      } catch (const std::exception& ex) {
        c.checks.push_back(failure("saturation" + tag, ex));
      }
    }
  }

  void sub_critical(Criterion& c) {
    c.title = "constant sign below the lower bound";
    for (auto [p, r] : kSaturationPairs) {
      const std::string tag = pr_tag(p, r);
      try {
        const Exponents e(p, r);
        const double a = 0.5 * critical::alpha_c_lower_bound(e);
        const auto res = variational::minimize_rayleigh(e.with_alpha(a), fem_cells_, minimize_);
        remember("sub_critical" + tag, p, r, res);
        c.checks.push_back(close_to("is_positive" + tag, res.sign_class == SignClass::positive ? 1.0 : 0.0, 1.0, 0.0));
        c.checks.push_back(at_least("gap_below_pi_p^p" + tag, pi_p_pow(p) - res.lambda, 1e-2, 0.0));
      } catch (const std::exception& ex) {
        c.checks.push_back(failure("sub_critical" + tag, ex));
      }
    }
  }

  void monotone_curve(Criterion& c) {
    c.title = "lambda(alpha) nondecreasing and Lipschitz";
    const Exponents e(2.0, 1.0);
    critical::CurveOptions co;
    co.n_cells = o_.fast ? 256 : 1024;
    co.minimize = minimize_;
    const int points = o_.fast ? 11 : 41;
    try {
      const auto curve = critical::lambda_curve(e, 0.0, 20.0, points, co);
      const double lip = critical::lipschitz_constant(e);
      double min_dl = INFINITY;
      double max_excess = -INFINITY;
      int failed = 0;
      for (std::size_t i = 0; i < curve.points.size(); ++i) {
        const auto& pt = curve.points[i];
        if (!pt.ok) {
          ++failed;
          continue;
        }
        if (pt.sign_class == SignClass::sign_changing) {
          sign_changing_.push_back({"curve[alpha=" + fmt_g(pt.alpha) + "]", e.p(), e.r(), pt.lambda, pt.m_bar});
        }
        if (i == 0 || !curve.points[i - 1].ok) continue;
        const double dl = pt.lambda - curve.points[i - 1].lambda;
        const double da = pt.alpha - curve.points[i - 1].alpha;
        min_dl = std::min(min_dl, dl);
        max_excess = std::max(max_excess, dl - lip * da);
      }
      const double slack = 2.0 * curve.solver_tol;
      c.checks.push_back(close_to("failed_points", failed, 0.0, 0.0));
      c.checks.push_back(at_least("min_increment", min_dl, 0.0, slack));
      c.checks.push_back(at_most("max_increment_minus_lipschitz", max_excess, slack));
    } catch (const std::exception& ex) {
      c.checks.push_back(failure("curve", ex));
    }
  }

  void zero_crossing(Criterion& c) {
    c.title = "lambda = 0 crossing at -(pi_p/2)^p";
    for (double p : {2.0, 3.0}) {
      const std::string tag = "[p=r=" + fmt_g(p) + "]";
      try {
        critical::ZeroCrossingOptions zo;
        zo.n_cells = o_.fast ? 512 : 1024;
        zo.minimize = minimize_;
        const auto z = critical::alpha_zero_crossing(Exponents(p, p), zo);
        const double exact = -std::pow(0.5 * ptrig::pi_p(PExponent(p)), p);
        c.checks.push_back(at_most("rel_dev" + tag, std::fabs(z.alpha_star - exact) / std::fabs(exact), 1e-3));
        c.checks.push_back(
            at_most("certificate_rel_dev" + tag, std::fabs(z.certificate + z.alpha_star) / std::fabs(z.alpha_star), 1e-3));
      } catch (const std::exception& ex) {
        c.checks.push_back(failure("zero_crossing" + tag, ex));
      }
    }
  }

  void cross_certification(Criterion& c) {
    c.title = "sign-changing lambda = (p-1) H(m_bar)^p";
    // Sign-changing results of this check's own, added to those collected by
    // the other checks of the run.
    const std::pair<double, double> pairs[] = {{2.0, 2.0}, {2.0, 1.0}, {3.0, 2.0}, {4.0, 3.0}};
    for (auto [p, r] : pairs) {
      const std::string tag = pr_tag(p, r);
      try {
        const Exponents e(p, r);
        const double a = 3.0 * critical::alpha_c_lower_bound(e);
        const auto fem = variational::minimize_rayleigh(e.with_alpha(a), o_.fast ? 256 : 1024, minimize_);
        remember("fem" + tag, p, r, fem);
        const auto sh = variational::shooting_solve(e.with_alpha(a), variational::Branch::sign_changing);
        remember("shoot" + tag, p, r, sh);
      } catch (const std::exception& ex) {
        c.checks.push_back(failure("sign_changing" + tag, ex));
      }
    }
    for (const auto& s : sign_changing_) {
      try {
        const double cand = hfun::lambda_candidate(s.m_bar, Exponents(s.p, s.r));
        c.checks.push_back(at_most("rel_dev_" + s.label, std::fabs(s.lambda - cand) / s.lambda, 5e-3));
      } catch (const std::exception& ex) {
        c.checks.push_back(failure(s.label, ex));
      }
    }
  }

  void lower_bound_consistency(Criterion& c) {
    c.title = "alpha_C above the lower bound";
    const std::pair<double, double> pairs[] = {{2.0, 1.0}, {2.0, 1.5}, {3.0, 2.0}, {4.0, 3.0}};
    for (auto [p, r] : pairs) {
      const std::string tag = pr_tag(p, r);
      try {
        const auto& res = alpha_c(p, r);
        c.checks.push_back(at_least("alpha_c" + tag, res.alpha_c, critical::alpha_c_lower_bound(Exponents(p, r)), 1e-2));
      } catch (const std::exception& ex) {
        c.checks.push_back(failure("alpha_c" + tag, ex));
      }
    }
  }

  Options o_;
  int fem_cells_;
  int alpha_c_cells_;
  variational::MinimizeOptions minimize_;
  std::map<std::pair<double, double>, critical::AlphaCResult> alpha_c_cache_;
  std::vector<SignChangingSample> sign_changing_;
};

std::vector<int> members(Suite s) {
  switch (s) {
    case Suite::ptrig: return {1, 2, 3};
    case Suite::hfun: return {4, 5, 6};
    case Suite::variational: return {7, 13};
    case Suite::critical: return {8, 9, 10, 11, 12, 14};
    // cross-certification last, so that it sees every sign-changing result
    case Suite::all: return {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 14, 13};
  }
  return {};
}

}  // namespace

bool Criterion::pass() const {
  return !checks.empty() && std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

Suite parse_suite(const std::string& name) {
  if (name == "ptrig") return Suite::ptrig;
  if (name == "hfun") return Suite::hfun;
  if (name == "variational") return Suite::variational;
  if (name == "critical") return Suite::critical;
  if (name == "all") return Suite::all;
  throw DomainError("unknown suite '" + name + "'");
}

std::vector<Criterion> run(Suite suite, const Options& opts) {
  Runner runner(opts);
  std::vector<Criterion> out;
  for (int id : members(suite)) out.push_back(runner.run(id));
  std::sort(out.begin(), out.end(), [](const Criterion& a, const Criterion& b) { return a.id < b.id; });
  return out;
}

}  // namespace nlsp::verify
