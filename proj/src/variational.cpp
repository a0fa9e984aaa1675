#include "nlsp/variational.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "descent.hpp"
#include "nlsp/discrete.hpp"
#include "nlsp/parallel.hpp"
#include "nlsp/ptrig.hpp"

namespace nlsp::variational {

std::string to_string(SignClass c) {
  switch (c) {
    case SignClass::positive: return "positive";
    case SignClass::negative: return "negative";
    case SignClass::sign_changing: return "sign_changing";
  }
  return "unknown";
}

std::string to_string(Method m) { return m == Method::fem_descent ? "fem_descent" : "shooting"; }

std::string to_string(Branch b) {
  return b == Branch::constant_sign ? "constant_sign" : "sign_changing";
}

namespace {

double nonlocal_term(double moment, const Exponents& e) { return abs_pow(moment, e.p() / e.r()); }

// Q_alpha and its gradient. With eps > 0 the nonlocal term |M|^{p/r} is
// replaced by (M^2 + eps^2)^{p/(2r)}, which removes the kink at M = 0 for
// r = p and the unbounded curvature there for p/2 < r < p.
detail::Functional make_rayleigh_functional(const Exponents& e, int n_cells, double eps) {
  return [e, n_cells, eps](std::span<const double> u, std::vector<double>* grad) {
    const double p = e.p();
    const double r = e.r();
    const double alpha = e.alpha();
    discrete::Gradients g;
    const auto t = grad ? discrete::evaluate(u, n_cells, p, r, g) : discrete::evaluate(u, n_cells, p, r);
    double phi = 0.0;
    double dphi = 0.0;
    if (alpha != 0.0) {
      if (eps > 0.0) {
        const double q = p / r;
        const double s2 = t.moment * t.moment + eps * eps;
        phi = std::pow(s2, 0.5 * q);
        dphi = q * t.moment * std::pow(s2, 0.5 * q - 1.0);
      } else {
        phi = nonlocal_term(t.moment, e);
        dphi = (p / r) * signed_pow(t.moment, p / r - 1.0);
      }
    }
    const double q = (t.energy + alpha * phi) / t.mass;
    if (grad) {
      grad->resize(u.size());
      for (std::size_t i = 0; i < u.size(); ++i) {
        (*grad)[i] = (g.energy[i] + alpha * dphi * g.moment[i] - q * g.mass[i]) / t.mass;
      }
    }
    return q;
  };
}

std::uint64_t splitmix(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

GridFunction random_profile(int n_cells, std::uint64_t seed) {
  std::uint64_t state = seed;
  double coeff[6];
  for (double& c : coeff) c = 2.0 * (static_cast<double>(splitmix(state) >> 11) * 0x1.0p-53) - 1.0;
  return GridFunction::sample(n_cells, [&](double x) {
    double v = 0.0;
    for (int k = 1; k <= 6; ++k) v += coeff[k - 1] * std::sin(k * M_PI * (x + 1.0) / 2.0) / k;
    return v;
  });
}

struct Start {
  std::string label;
  GridFunction profile;
};

std::vector<Start> make_starts(const Exponents& e, int n_cells, const MinimizeOptions& o) {
  std::vector<Start> starts;
  const PExponent pe = e.pexp();
  const double pp = ptrig::pi_p(pe);
  if (o.positive_start) {
    starts.push_back({"cos_p", GridFunction::sample(n_cells, [&](double x) {
                        return ptrig::cos_p(0.5 * pp * x, pe);
                      })});
  }
  if (o.odd_start) {
    starts.push_back(
        {"sin_p", GridFunction::sample(n_cells, [&](double x) { return ptrig::sin_p(pp * x, pe); })});
  }
  for (int i = 0; i < o.random_starts; ++i) {
    starts.push_back({"random" + std::to_string(i),
                      random_profile(n_cells, o.seed + static_cast<std::uint64_t>(i) * 7919u)});
  }
  return starts;
}

struct StartOutcome {
  std::optional<RayleighResult> result;
  std::string error;
};

RayleighResult finalize(const GridFunction& raw, const Exponents& e, Method method, double sign_tol) {
  RayleighResult res;
  res.method = method;
  const double norm = lp_norm(raw, e.p());
  GridFunction u = raw.scaled(1.0 / norm);
  double m = r_moment(u, e);
  if (m < 0.0) {
    u = u.scaled(-1.0);
    m = -m;
  }
  res.minimizer = u;
  res.moment = m;
  res.gamma = gamma_of(m, e, 1e-8);
  res.lambda = rayleigh_quotient(u, e);
  res.classification = classify_minimizer(u, e.p(), sign_tol);
  res.sign_class = res.classification.sign_class;
  res.odd_defect = res.classification.odd_defect;
  res.el_residual = el_residual(u, res.lambda, res.gamma, e);
  return res;
}

}  // namespace

double lp_norm(const GridFunction& u, double p) {
  const auto t = discrete::evaluate(u.interior(), u.n_cells(), p, p);
  return std::pow(t.mass, 1.0 / p);
}

double rayleigh_quotient(const GridFunction& u, const Exponents& e) {
  if (u.is_zero()) throw DomainError("rayleigh_quotient: u is identically zero");
  const auto t = discrete::evaluate(u.interior(), u.n_cells(), e.p(), e.r());
  if (!(t.mass > 0.0)) throw DomainError("rayleigh_quotient: zero denominator");
  return (t.energy + e.alpha() * nonlocal_term(t.moment, e)) / t.mass;
}

double r_moment(const GridFunction& u, const Exponents& e) {
  return discrete::evaluate(u.interior(), u.n_cells(), e.p(), e.r()).moment;
}

double gamma_of(double moment, const Exponents& e, double zero_threshold) {
  if (e.r_equals_p() && std::fabs(moment) <= zero_threshold) return 0.0;
  if (moment == 0.0) return 0.0;
  return signed_pow(moment, e.p() / e.r() - 1.0);
}

double gamma_of(const GridFunction& u, const Exponents& e, double zero_threshold) {
  return gamma_of(r_moment(u, e), e, zero_threshold);
}

double el_residual(const GridFunction& y, double lambda, double gamma, const Exponents& e) {
  const double p = e.p();
  const double r = e.r();
  discrete::Gradients g;
  const auto t = discrete::evaluate(y.interior(), y.n_cells(), p, r, g);
  // gradients carry factors p, r, p respectively
  double worst = 0.0;
  for (std::size_t i = 0; i < g.energy.size(); ++i) {
    const double v = g.energy[i] / p + e.alpha() * gamma * g.moment[i] / r - lambda * g.mass[i] / p;
    worst = std::max(worst, std::fabs(v));
  }
  const double norm = std::pow(t.mass, 1.0 / p);
  return worst / std::pow(norm, p - 1.0);
}

double el_residual(const RayleighResult& res, const Exponents& e) {
  return el_residual(res.minimizer, res.lambda, res.gamma, e);
}

double certification_threshold(int n_cells, double lambda) {
  // weak residuals scale like h times the pointwise residual, which scales like lambda
  return 5e-3 * (2.0 / n_cells) * std::max(1.0, std::fabs(lambda));
}

Classification classify_minimizer(const GridFunction& y, double p, double tol) {
  Classification c;
  const double norm = lp_norm(y, p);
  if (!(norm > 0.0)) throw DomainError("classify_minimizer: zero function");
  const int n = y.n_cells();
  auto val = [&](int k) { return y.at(k) / norm; };
  double mx = 0.0;
  double mn = 0.0;
  for (int k = 1; k < n; ++k) {
    mx = std::max(mx, val(k));
    mn = std::min(mn, val(k));
  }
  const double band = tol * std::max(mx, -mn);

  int last_sign = 0;
  int last_node = 0;
  for (int k = 1; k < n; ++k) {
    const double v = val(k);
    const int s = v > band ? 1 : (v < -band ? -1 : 0);
    if (s == 0) continue;
    if (last_sign != 0 && s != last_sign) {
      ++c.sign_changes;
      if (c.sign_changes == 1) {
        for (int j = last_node; j < k; ++j) {
          const double a = val(j);
          const double b = val(j + 1);
          if ((a >= 0.0) != (b >= 0.0) || b == 0.0) {
            c.zero_location = y.x(j) + y.h() * (a / (a - b));
            break;
          }
        }
      }
    }
    last_sign = s;
    last_node = k;
  }
  if (c.sign_changes > 0) {
    c.sign_class = SignClass::sign_changing;
    c.m_bar = std::min(mx, -mn) / std::max(mx, -mn);
  } else {
    c.sign_class = mx >= -mn ? SignClass::positive : SignClass::negative;
  }
  for (int k = 1; k < n; ++k) c.odd_defect = std::max(c.odd_defect, std::fabs(val(k) + val(n - k)));
  return c;
}

Classification classify_minimizer(const RayleighResult& res, double p, double tol) {
  return classify_minimizer(res.minimizer, p, tol);
}

RayleighResult minimize_rayleigh(const Exponents& e, int n_cells, const MinimizeOptions& o) {
  if (!(o.tol > 0.0)) throw DomainError("minimize_rayleigh: tol must be positive");
  const auto starts = make_starts(e, n_cells, o);
  if (starts.empty()) throw DomainError("minimize_rayleigh: no starts selected");

  // The nonlocal term is smoothed near M = 0 and the smoothing is driven to
  // zero over successive restarts, finishing on the exact functional.
  std::vector<double> schedule{0.0};
  if (e.alpha() != 0.0 && !e.r_is_half_p()) schedule = {1e-3, 1e-5, 1e-7, 1e-10, 0.0};

  std::vector<StartOutcome> outcomes(starts.size());
  parallel_for(starts.size(), o.threads, [&](std::size_t i) {
    try {
      std::vector<double> u(starts[i].profile.interior().begin(), starts[i].profile.interior().end());
      detail::DescentSettings s;
      s.p = e.p();
      s.tol = o.tol;
      s.max_iter = o.max_iter;
      detail::DescentOutcome d;
      int iterations = 0;
      for (double eps : schedule) {
        d = detail::preconditioned_descent(make_rayleigh_functional(e, n_cells, eps), std::move(u),
                                           n_cells, s);
        iterations += d.iterations;
        u = d.u;
      }
      RayleighResult r = finalize(GridFunction(n_cells, std::move(u)), e, Method::fem_descent, o.sign_tol);
      r.converged = d.converged;
      r.iterations = iterations;
      r.start = starts[i].label;
      outcomes[i].result = std::move(r);
    } catch (const std::exception& ex) {
      outcomes[i].error = ex.what();
    }
  });

  std::optional<std::size_t> best;
  std::vector<Candidate> candidates;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    const auto& oc = outcomes[i];
    if (!oc.result) continue;
    const auto& r = *oc.result;
    candidates.push_back({r.start, r.lambda, r.moment, r.sign_class, r.converged, r.iterations});
    if (!best) {
      best = i;
      continue;
    }
    const auto& b = *outcomes[*best].result;
    const double tie = 1e-12 * std::max(1.0, std::fabs(b.lambda));
    if (r.lambda < b.lambda - tie || (std::fabs(r.lambda - b.lambda) <= tie && r.el_residual < b.el_residual)) {
      best = i;
    }
  }
  if (!best) {
    throw SolverError("minimize_rayleigh: every start failed (" + outcomes.front().error + ")");
  }
  RayleighResult out = std::move(*outcomes[*best].result);
  out.candidates = std::move(candidates);
  if (!out.converged) {
    throw SolverError("minimize_rayleigh: descent did not converge from start " + out.start, out.lambda,
                      out.el_residual);
  }
  return out;
}

}  // namespace nlsp::variational
