#include "nlsp/critical.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <json.hpp>

#include "descent.hpp"
#include "nlsp/discrete.hpp"
#include "nlsp/format.hpp"
#include "nlsp/parallel.hpp"
#include "nlsp/ptrig.hpp"
#include "nlsp/roots.hpp"

namespace nlsp::critical {

using variational::Branch;
using variational::RayleighResult;

namespace {

double pi_p_pow(const Exponents& e) { return std::pow(ptrig::pi_p(e.pexp()), e.p()); }

// Discrete Q of the odd profile sin_p(pi_p x): every discrete lambda is at most this.
double discrete_odd_cap(const Exponents& e, int n_cells) {
  const PExponent pe = e.pexp();
  const double pp = ptrig::pi_p(pe);
  const auto u = GridFunction::sample(n_cells, [&](double x) { return ptrig::sin_p(pp * x, pe); });
  return variational::rayleigh_quotient(u, e);
}

}  // namespace

double lipschitz_constant(const Exponents& exps) { return std::pow(2.0, (exps.p() - exps.r()) / exps.r()); }

LambdaCurve lambda_curve(const Exponents& exps, double alpha_lo, double alpha_hi, int steps,
                         const CurveOptions& opts) {
  if (!(alpha_lo < alpha_hi)) throw DomainError("lambda_curve: need alpha_lo < alpha_hi");
  if (steps < 2) throw DomainError("lambda_curve: need at least 2 points");
  LambdaCurve curve;
  curve.p = exps.p();
  curve.r = exps.r();
  curve.solver_tol = opts.solver_tol;
  curve.points.resize(static_cast<std::size_t>(steps));

  variational::MinimizeOptions inner = opts.minimize;
  const int threads = inner.threads;
  inner.threads = 1;
  parallel_for(curve.points.size(), threads, [&](std::size_t i) {
    CurvePoint& pt = curve.points[i];
    pt.alpha = i + 1 == curve.points.size()
                   ? alpha_hi
                   : alpha_lo + (alpha_hi - alpha_lo) * static_cast<double>(i) / (steps - 1);
    try {
      const auto res = variational::minimize_rayleigh(exps.with_alpha(pt.alpha), opts.n_cells, inner);
      pt.lambda = res.lambda;
      pt.moment = res.moment;
      pt.sign_class = res.sign_class;
      pt.odd_defect = res.odd_defect;
      pt.el_residual = res.el_residual;
      pt.m_bar = res.classification.m_bar;
    } catch (const std::exception& ex) {
      pt.ok = false;
      pt.lambda = std::nan("");
      pt.error = ex.what();
    }
  });

  const double lip = lipschitz_constant(exps);
  const double cap = discrete_odd_cap(exps, opts.n_cells) + opts.solver_tol;
  const double tol2 = 2.0 * opts.solver_tol;
  const CurvePoint* prev = nullptr;
  for (const auto& pt : curve.points) {
    if (!pt.ok) {
      curve.violations.push_back("alpha=" + fmt_double(pt.alpha) + ": solver failure: " + pt.error);
      continue;
    }
    if (pt.lambda > cap) {
      curve.violations.push_back("alpha=" + fmt_double(pt.alpha) + ": lambda above the odd-profile cap");
    }
    if (prev) {
      const double dl = pt.lambda - prev->lambda;
      const double da = pt.alpha - prev->alpha;
      if (dl < -tol2) {
        curve.violations.push_back("alpha=" + fmt_double(pt.alpha) + ": lambda decreased by " + fmt_double(-dl));
      }
      if (dl > lip * da + tol2) {
        curve.violations.push_back("alpha=" + fmt_double(pt.alpha) + ": increment " + fmt_double(dl) +
                                   " exceeds Lipschitz bound " + fmt_double(lip * da));
      }
    }
    prev = &pt;
  }
  return curve;
}

void write_csv(std::ostream& os, const LambdaCurve& curve) {
  os << "alpha,lambda,moment,sign_class,odd_defect\n";
  for (const auto& pt : curve.points) {
    os << fmt_double(pt.alpha) << ',' << fmt_double(pt.lambda) << ',' << fmt_double(pt.moment) << ','
       << variational::to_string(pt.sign_class) << ',' << fmt_double(pt.odd_defect) << '\n';
  }
}

double alpha_c_exact_rp(PExponent p) {
  const double q = p.value();
  return (std::pow(2.0, q) - 1.0) / std::pow(2.0, q) * std::pow(ptrig::pi_p(p), q);
}

double alpha_c_lower_bound(const Exponents& exps) {
  const double p = exps.p();
  const double r = exps.r();
  return (std::pow(2.0, p) - 1.0) / std::pow(2.0, p / r + p - 1.0) * pi_p_pow(exps);
}

Rescaled rescale_interval(double lambda, double alpha, const Exponents& exps, double a, double b) {
  if (!(a < b)) throw DomainError("rescale_interval: need a < b");
  const double half = 0.5 * (b - a);
  const double p = exps.p();
  return {std::pow(half, -p) * lambda, std::pow(half, p / exps.r() + p - 1.0) * alpha};
}

Rescaled rescale_interval_inverse(double lambda_ab, double alpha_tilde, const Exponents& exps, double a,
                                  double b) {
  if (!(a < b)) throw DomainError("rescale_interval_inverse: need a < b");
  const double half = 0.5 * (b - a);
  const double p = exps.p();
  return {std::pow(half, p) * lambda_ab, std::pow(half, -(p / exps.r() + p - 1.0)) * alpha_tilde};
}

AlphaCResult find_alpha_c(const Exponents& exps, const AlphaCOptions& opts) {
  if (!(opts.tol > 0.0)) throw DomainError("find_alpha_c: tol must be positive");
  const double target = pi_p_pow(exps);
  AlphaCResult out;
  out.p = exps.p();
  out.r = exps.r();
  out.tol = opts.tol;
  out.lower_bound = alpha_c_lower_bound(exps);
  if (exps.r_equals_p()) out.closed_form = alpha_c_exact_rp(exps.pexp());

  // FEM stage.
  const double delta_fem = std::max(2.0 * opts.minimize.tol * target, 1e-4 * target);
  auto fem_lambda = [&](double a) {
    return variational::minimize_rayleigh(exps.with_alpha(a), opts.n_cells, opts.minimize).lambda;
  };
  double lo = 0.0;
  double lambda_lo = fem_lambda(lo);
  if (lambda_lo >= target - delta_fem) throw SolverError("find_alpha_c: saturated already at alpha = 0", lambda_lo);
  double hi = out.lower_bound;
  double lambda_hi = fem_lambda(hi);
  int doublings = 0;
  while (lambda_hi < target - delta_fem) {
    if (++doublings > 60) throw SolverError("find_alpha_c: bracket growth failed", lambda_hi);
    lo = hi;
    lambda_lo = lambda_hi;
    hi *= 2.0;
    lambda_hi = fem_lambda(hi);
  }
  const double fem_width = opts.use_shooting ? std::max(opts.tol, 1e-2 * hi) : opts.tol;
  while (hi - lo > fem_width) {
    const double mid = 0.5 * (lo + hi);
    const double lm = fem_lambda(mid);
    ++out.fem_iterations;
    if (lm >= target - delta_fem) {
      hi = mid;
      lambda_hi = lm;
    } else {
      lo = mid;
      lambda_lo = lm;
    }
  }
  out.fem_lo = lo;
  out.fem_hi = hi;
  out.iterations = out.fem_iterations;
  out.lo = lo;
  out.hi = hi;
  out.lambda_lo = lambda_lo;
  out.lambda_hi = lambda_hi;
  out.delta = delta_fem;
  out.alpha_c = 0.5 * (lo + hi);

  if (opts.use_shooting) {
    // Shooting stage on the constant-sign branch. Sub-critical means the
    // branch exists (positive profile) with lambda below pi_p^p - delta_s.
    variational::ShootingOptions so;
    so.rtol = 1e-12;
    so.atol = 1e-14;
    so.n_cells = 256;
    const double delta_s = 10.0 * opts.shooting_tol * target;
    std::optional<RayleighResult> warm;
    auto sub_critical = [&](double a, std::optional<RayleighResult>& keep) {
      const Exponents ea = exps.with_alpha(a);
      try {
        auto res = warm ? variational::shooting_from(*warm, ea, Branch::constant_sign, opts.shooting_tol, so)
                        : variational::shooting_solve(ea, Branch::constant_sign, opts.shooting_tol, so);
        const bool below = res.lambda < target - delta_s;
        keep = std::move(res);
        if (below) warm = keep;
        return below;
      } catch (const SolverError&) {
        keep.reset();
        return false;
      }
    };

    std::optional<RayleighResult> at_lo;
    std::optional<RayleighResult> at_hi;
    const double width = hi - lo;
    // The FEM value overestimates lambda, so its switch point can sit below
    // the true threshold; give the upper end some room.
    hi += 0.25 * width;
    bool ok = sub_critical(lo, at_lo);
    for (int k = 0; !ok && k < 20 && lo - width >= 0.0; ++k) {
      hi = lo;
      lo -= width;
      ok = sub_critical(lo, at_lo);
    }
    if (ok) {
      std::optional<RayleighResult> probe;
      bool hi_sub = sub_critical(hi, probe);
      for (int k = 0; hi_sub && k < 20; ++k) {
        lo = hi;
        at_lo = probe;
        hi += width;
        hi_sub = sub_critical(hi, probe);
      }
      if (!hi_sub) {
        at_hi = probe;
        int it = 0;
        while (hi - lo > opts.tol && it < 200) {
          const double mid = 0.5 * (lo + hi);
          std::optional<RayleighResult> res;
          if (sub_critical(mid, res)) {
            lo = mid;
            at_lo = std::move(res);
          } else {
            hi = mid;
            at_hi = std::move(res);
          }
          ++it;
        }
        out.iterations = out.fem_iterations + it;
        out.lo = lo;
        out.hi = hi;
        out.alpha_c = 0.5 * (lo + hi);
        out.delta = delta_s;
        out.lambda_lo = at_lo->lambda;
        // lambda at hi: the odd branch, or the constant-sign one if lower.
        const auto odd_hi =
            variational::shooting_solve(exps.with_alpha(hi), Branch::sign_changing, opts.shooting_tol, so);
        out.lambda_hi = odd_hi.lambda;
        if (at_hi && at_hi->lambda < out.lambda_hi) out.lambda_hi = at_hi->lambda;
        out.shooting_certified = true;
        if (opts.solve_branches) {
          out.positive_branch = *at_lo;
          so.n_cells = opts.n_cells;
          out.odd_branch = variational::shooting_solve(exps.with_alpha(out.alpha_c), Branch::sign_changing,
                                                       opts.shooting_tol, so);
        }
      }
    }
    if (!out.shooting_certified) {
      // fall back to the FEM bracket already stored in `out`
      lo = out.fem_lo;
      hi = out.fem_hi;
    }
  }

  if (opts.solve_branches && !out.positive_branch) {
    variational::MinimizeOptions mo = opts.minimize;
    mo.odd_start = false;
    mo.random_starts = 0;
    try {
      out.positive_branch = variational::minimize_rayleigh(exps.with_alpha(out.lo), opts.n_cells, mo);
    } catch (const SolverError&) {
    }
    mo.odd_start = true;
    mo.positive_start = false;
    try {
      out.odd_branch = variational::minimize_rayleigh(exps.with_alpha(out.alpha_c), opts.n_cells, mo);
    } catch (const SolverError&) {
    }
  }
  return out;
}

std::string to_json(const AlphaCResult& res) {
  nlohmann::ordered_json j;
  j["alpha_c"] = res.alpha_c;
  j["lo"] = res.lo;
  j["hi"] = res.hi;
  j["lambda_lo"] = res.lambda_lo;
  j["lambda_hi"] = res.lambda_hi;
  j["iterations"] = res.iterations;
  j["p"] = res.p;
  j["r"] = res.r;
  j["tol"] = res.tol;
  j["delta"] = res.delta;
  j["shooting_certified"] = res.shooting_certified;
  j["lower_bound"] = res.lower_bound;
  if (res.closed_form) {
    j["closed_form"] = *res.closed_form;
    j["relative_deviation"] = (res.alpha_c - *res.closed_form) / *res.closed_form;
  }
  if (res.positive_branch) j["lambda_positive_branch"] = res.positive_branch->lambda;
  if (res.odd_branch) j["lambda_odd_branch"] = res.odd_branch->lambda;
  return j.dump();
}

double lr_rayleigh_minimum(const Exponents& exps, int n_cells, const variational::MinimizeOptions& opts) {
  const double p = exps.p();
  const double r = exps.r();
  auto functional = [=](std::span<const double> u, std::vector<double>* grad) {
    discrete::Gradients g;
    const auto t = grad ? discrete::evaluate(u, n_cells, p, r, g) : discrete::evaluate(u, n_cells, p, r);
    const double den = std::pow(t.lr_mass, p / r);
    const double q = t.energy / den;
    if (grad) {
      grad->resize(u.size());
      // d(den) = (p/r) (int|u|^r)^{p/r-1} d(int|u|^r)
      const double dden = (p / r) * std::pow(t.lr_mass, p / r - 1.0);
      for (std::size_t i = 0; i < u.size(); ++i) (*grad)[i] = (g.energy[i] - q * dden * g.lr_mass[i]) / den;
    }
    return q;
  };
  const PExponent pe = exps.pexp();
  const double pp = ptrig::pi_p(pe);
  const auto start = GridFunction::sample(n_cells, [&](double x) { return ptrig::cos_p(0.5 * pp * x, pe); });
  detail::DescentSettings s;
  s.p = p;
  s.tol = opts.tol;
  s.max_iter = opts.max_iter;
  const auto d = detail::preconditioned_descent(functional, {start.interior().begin(), start.interior().end()},
                                                n_cells, s);
  if (!d.converged) throw SolverError("lr_rayleigh_minimum: descent did not converge", d.value);
  return d.value;
}

ZeroCrossing alpha_zero_crossing(const Exponents& exps, const ZeroCrossingOptions& opts) {
  if (!(opts.tol > 0.0)) throw DomainError("alpha_zero_crossing: tol must be positive");
  // Minimizers are of constant sign for alpha <= 0, so the positive start suffices.
  variational::MinimizeOptions mo = opts.minimize;
  mo.odd_start = false;
  mo.random_starts = 0;
  auto lam = [&](double a) { return variational::minimize_rayleigh(exps.with_alpha(a), opts.n_cells, mo).lambda; };

  ZeroCrossing out;
  double hi = 0.0;
  double f_hi = lam(hi);
  if (!(f_hi > 0.0)) throw SolverError("alpha_zero_crossing: lambda_0 is not positive", f_hi);
  double lo = -1.0;
  double f_lo = lam(lo);
  while (f_lo > 0.0) {
    if (f_lo < opts.lambda_floor || lo < -1e12) throw SolverError("alpha_zero_crossing: bracket growth failed", f_lo);
    hi = lo;
    f_hi = f_lo;
    lo *= 2.0;
    f_lo = lam(lo);
  }
  out.bracket_lo = lo;
  out.bracket_hi = hi;
  int evals = 0;
  out.alpha_star = roots::illinois(
      [&](double a) {
        ++evals;
        return lam(a);
      },
      lo, hi, opts.tol);
  out.iterations = evals;
  out.lambda_at_root = lam(out.alpha_star);
  out.certificate = lr_rayleigh_minimum(exps, opts.n_cells, opts.minimize);
  return out;
}

}  // namespace nlsp::critical
