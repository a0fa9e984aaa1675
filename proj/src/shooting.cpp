#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "nlsp/errors.hpp"
#include "nlsp/ptrig.hpp"
#include "nlsp/variational.hpp"

namespace nlsp::variational {

namespace {

using State = std::array<double, 3>;  // y, w = |y'|^{p-2} y', running moment

struct Params {
  double p;
  double r;
  double alpha;
  double lambda;
  double gamma;
};

State rhs(const State& s, const Params& q) {
  const double y = s[0];
  return {signed_pow(s[1], 1.0 / (q.p - 1.0)),
          q.alpha * q.gamma * abs_pow(y, q.r - 1.0) - q.lambda * signed_pow(y, q.p - 1.0),
          signed_pow(y, q.r)};
}

// Dormand-Prince 5(4) with standard step control.
class Dopri5 {
 public:
  Dopri5(const Params& q, double rtol, double atol) : q_(q), rtol_(rtol), atol_(atol) {}

  // Advances s from x0 to x1 exactly. `h` carries the step size across calls.
  void advance(State& s, double x0, double x1, double& h) {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                            b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
    (void)c2, (void)c3, (void)c4, (void)c5;

    double x = x0;
    const double span = x1 - x0;
    if (h <= 0.0) h = std::min(1e-3, span);
    const double h_min = 1e-15 * std::max(1.0, std::fabs(x1));
    State k1 = rhs(s, q_);
    while (x < x1) {
      bool last = false;
      if (x + h >= x1) {
        h = x1 - x;
        last = true;
      }
      auto comb = [&](std::initializer_list<std::pair<double, const State*>> terms) {
        State out = s;
        for (const auto& [c, k] : terms) {
          for (int i = 0; i < 3; ++i) out[i] += h * c * (*k)[i];
        }
        return out;
      };
      const State k2 = rhs(comb({{a21, &k1}}), q_);
      const State k3 = rhs(comb({{a31, &k1}, {a32, &k2}}), q_);
      const State k4 = rhs(comb({{a41, &k1}, {a42, &k2}, {a43, &k3}}), q_);
      const State k5 = rhs(comb({{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}), q_);
      const State k6 = rhs(comb({{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}), q_);
      const State next = comb({{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
      const State k7 = rhs(next, q_);

      double err = 0.0;
      for (int i = 0; i < 3; ++i) {
        const double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
        const double sc = atol_ + rtol_ * std::max(std::fabs(s[i]), std::fabs(next[i]));
        err += (e / sc) * (e / sc);
      }
      err = std::sqrt(err / 3.0);
      if (!std::isfinite(err)) err = 1e10;

      if (err <= 1.0) {
        x = last ? x1 : x + h;
        s = next;
        k1 = k7;
        const double fac = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
        if (!last) h *= fac;
        else h = std::max(h, h * fac);
        ++steps_;
      } else {
        h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
        if (h < h_min) throw SolverError("shooting: integrator step size underflow", q_.lambda);
      }
    }
  }

  long steps() const { return steps_; }

 private:
  Params q_;
  double rtol_;
  double atol_;
  long steps_ = 0;
};

struct Shot {
  std::vector<State> states;  // at the requested nodes
};

Shot shoot(const Params& q, double slope, const std::vector<double>& nodes, const ShootingOptions& o) {
  Shot out;
  out.states.reserve(nodes.size());
  State s{0.0, signed_pow(slope, q.p - 1.0), 0.0};
  out.states.push_back(s);
  Dopri5 ode(q, o.rtol, o.atol);
  double h = 0.0;
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    ode.advance(s, nodes[i - 1], nodes[i], h);
    for (double v : s) {
      if (!std::isfinite(v)) throw SolverError("shooting: trajectory blew up", q.lambda);
    }
    out.states.push_back(s);
  }
  return out;
}

// gamma as a function of the moment, inverted: M = sign(gamma) |gamma|^{r/(p-r)}.
double moment_of_gamma(double gamma, double p, double r) {
  return signed_pow(gamma, r / (p - r));
}

// Unknowns of the Newton iteration. Which of them are free depends on the
// formulation (see Problem).
struct Unknowns {
  double lambda = 0.0;
  double gamma = 0.0;
  double slope = 1.0;  // y'(-1)
};

// Three formulations of the same two-point problem:
//  * r = p: gamma is fixed by the branch, y'(-1) = 1, Newton on lambda.
//  * r < p, sign-changing: y'(-1) = 1, Newton on (lambda, gamma) with
//    M(y) = sign(gamma)|gamma|^{r/(p-r)}, the inverse of gamma = |M|^{p/r-2} M.
//  * r < p, constant sign: gamma = 1 (i.e. M = 1), Newton on (lambda, y'(-1)).
//    The positive solution may approach zero boundary slope as lambda -> pi_p^p,
//    where the y'(-1) = 1 scaling would send gamma to infinity; pinning gamma
//    keeps the unknowns bounded.
class Problem {
 public:
  enum class Kind { fixed_gamma, free_gamma, free_slope };

  Problem(const Exponents& e, Branch b, const ShootingOptions& o) : e_(e), o_(o) {
    if (e.r_equals_p()) kind_ = Kind::fixed_gamma;
    else kind_ = b == Branch::constant_sign ? Kind::free_slope : Kind::free_gamma;
    fixed_gamma_ = b == Branch::constant_sign ? 1.0 : 0.0;
  }

  Kind kind() const { return kind_; }

  double gamma(const Unknowns& u) const {
    switch (kind_) {
      case Kind::fixed_gamma: return fixed_gamma_;
      case Kind::free_slope: return 1.0;
      case Kind::free_gamma: return u.gamma;
    }
    return 0.0;
  }

  double slope(const Unknowns& u) const { return kind_ == Kind::free_slope ? u.slope : 1.0; }

  // Second free unknown (unused for fixed_gamma).
  double& second(Unknowns& u) const { return kind_ == Kind::free_slope ? u.slope : u.gamma; }
  double second(const Unknowns& u) const { return kind_ == Kind::free_slope ? u.slope : u.gamma; }

  Shot run(const Unknowns& u, const std::vector<double>& nodes) const {
    const Params q{e_.p(), e_.r(), e_.alpha(), u.lambda, gamma(u)};
    return shoot(q, slope(u), nodes, o_);
  }

  std::array<double, 2> residual(const Unknowns& u) const {
    const auto shot = run(u, {-1.0, 1.0});
    const State& end = shot.states.back();
    switch (kind_) {
      case Kind::fixed_gamma: return {end[0], 0.0};
      case Kind::free_slope: return {end[0], end[2] - 1.0};
      case Kind::free_gamma: return {end[0], end[2] - moment_of_gamma(u.gamma, e_.p(), e_.r())};
    }
    return {0.0, 0.0};
  }

 private:
  Exponents e_;
  ShootingOptions o_;
  Kind kind_;
  double fixed_gamma_;
};

double norm2(const std::array<double, 2>& f) { return std::hypot(f[0], f[1]); }

Unknowns newton(const Problem& prob, Unknowns x, double tol, int max_iter) {
  auto f = prob.residual(x);
  double fn = norm2(f);
  const bool two = prob.kind() != Problem::Kind::fixed_gamma;
  for (int it = 0; it < max_iter; ++it) {
    if (fn <= tol) return x;
    const double hl = 1e-6 * std::max(1.0, std::fabs(x.lambda));
    Unknowns xl = x;
    xl.lambda += hl;
    const auto fl = prob.residual(xl);
    const double j00 = (fl[0] - f[0]) / hl;
    const double j10 = (fl[1] - f[1]) / hl;
    double dl = 0.0;
    double d2 = 0.0;
    if (two) {
      const double hs = 1e-6 * std::max(1.0, std::fabs(prob.second(x)));
      Unknowns xs = x;
      prob.second(xs) += hs;
      const auto fs = prob.residual(xs);
      const double j01 = (fs[0] - f[0]) / hs;
      const double j11 = (fs[1] - f[1]) / hs;
      const double det = j00 * j11 - j01 * j10;
      if (det == 0.0 || !std::isfinite(det)) {
        throw SolverError("shooting: singular Jacobian", x.lambda, fn);
      }
      dl = -(j11 * f[0] - j01 * f[1]) / det;
      d2 = -(-j10 * f[0] + j00 * f[1]) / det;
    } else {
      if (j00 == 0.0 || !std::isfinite(j00)) throw SolverError("shooting: singular Jacobian", x.lambda, fn);
      dl = -f[0] / j00;
    }

    double t = 1.0;
    bool accepted = false;
    Unknowns trial = x;
    std::array<double, 2> ft{};
    for (int k = 0; k < 40; ++k) {
      trial = x;
      trial.lambda += t * dl;
      prob.second(trial) += t * d2;
      try {
        ft = prob.residual(trial);
        if (norm2(ft) < fn || norm2(ft) <= tol) {
          accepted = true;
          break;
        }
      } catch (const SolverError&) {
      }
      t *= 0.5;
    }
    const double step = std::hypot(t * dl, t * d2);
    const double scale = std::max(1.0, std::hypot(x.lambda, prob.second(x)));
    if (!accepted) {
      // No decrease: either converged to the integrator noise floor or stuck.
      if (step <= 1e3 * tol * scale && fn <= 1e3 * tol) return x;
      throw SolverError("shooting: Newton made no progress", x.lambda, fn);
    }
    x = trial;
    f = ft;
    fn = norm2(f);
    if (step <= tol * scale && fn <= 1e3 * tol) return x;
  }
  if (fn <= 1e3 * tol) return x;
  throw SolverError("shooting: Newton did not converge", x.lambda, fn);
}

RayleighResult assemble(const Exponents& e, Branch branch, const Unknowns& x, const Problem& prob,
                        const ShootingOptions& o) {
  const int n = o.n_cells;
  std::vector<double> nodes(n + 1);
  for (int k = 0; k <= n; ++k) nodes[k] = -1.0 + 2.0 * k / n;
  nodes[n] = 1.0;
  const auto shot = prob.run(x, nodes);

  std::vector<double> interior(n - 1);
  for (int k = 1; k < n; ++k) interior[k - 1] = shot.states[k][0];
  GridFunction raw(n, std::move(interior));

  const Classification cls = classify_minimizer(raw, e.p(), 1e-6);
  if (branch == Branch::constant_sign && cls.sign_class != SignClass::positive) {
    throw SolverError("shooting: converged to a sign-changing solution on the constant-sign branch",
                      x.lambda);
  }
  if (branch == Branch::sign_changing && cls.sign_changes != 1) {
    throw SolverError("shooting: sign-changing branch solution has " + std::to_string(cls.sign_changes) +
                          " sign changes",
                      x.lambda);
  }

  // Rescale the shot to unit L^p norm; gamma is homogeneous of degree p - r.
  const double c = 1.0 / lp_norm(raw, e.p());
  RayleighResult res;
  res.method = Method::shooting;
  res.lambda = x.lambda;
  res.minimizer = raw.scaled(c);
  double moment = shot.states.back()[2] * std::pow(c, e.r());
  double gamma = prob.gamma(x) * std::pow(c, e.p() - e.r());
  if (moment < 0.0) {
    res.minimizer = res.minimizer.scaled(-1.0);
    moment = -moment;
    gamma = -gamma;
  }
  res.moment = moment;
  res.gamma = gamma;
  res.classification = classify_minimizer(res.minimizer, e.p(), 1e-6);
  res.sign_class = res.classification.sign_class;
  res.odd_defect = res.classification.odd_defect;
  res.el_residual = el_residual(res.minimizer, res.lambda, res.gamma, e);
  res.converged = true;
  res.start = to_string(branch);
  return res;
}

}  // namespace

RayleighResult shooting_solve(const Exponents& e, Branch branch, double tol, const ShootingOptions& opts) {
  if (!(tol > 0.0)) throw DomainError("shooting_solve: tol must be positive");
  if (opts.n_cells < 8 || opts.n_cells % 2 != 0) {
    throw DomainError("shooting_solve: n_cells must be even and >= 8");
  }
  ShootingOptions o = opts;
  const Problem prob(e, branch, o);
  const bool free_slope = prob.kind() == Problem::Kind::free_slope;
  const bool needs_second = prob.kind() != Problem::Kind::fixed_gamma;
  const double second_guess = free_slope ? o.slope_guess : o.gamma_guess;
  if (std::isnan(o.lambda_guess) || (needs_second && std::isnan(second_guess))) {
    if (branch == Branch::sign_changing) {
      if (std::isnan(o.lambda_guess)) o.lambda_guess = std::pow(ptrig::pi_p(e.pexp()), e.p());
      if (std::isnan(o.gamma_guess)) o.gamma_guess = 0.0;
    } else {
      MinimizeOptions mo;
      mo.odd_start = false;
      mo.random_starts = 0;
      mo.tol = 1e-10;
      const auto fem = minimize_rayleigh(e, std::min(opts.n_cells, 512), mo);
      return shooting_from(fem, e, branch, tol, o);
    }
  }
  Unknowns x;
  x.lambda = o.lambda_guess;
  x.gamma = std::isnan(o.gamma_guess) ? 0.0 : o.gamma_guess;
  x.slope = std::isnan(o.slope_guess) ? 1.0 : o.slope_guess;
  x = newton(prob, x, tol, o.max_newton);
  return assemble(e, branch, x, prob, o);
}

RayleighResult shooting_from(const RayleighResult& fem, const Exponents& e, Branch branch, double tol,
                             ShootingOptions opts) {
  const auto& u = fem.minimizer;
  const double slope = u.at(1) / u.h();  // u'(-1) to first order
  opts.lambda_guess = fem.lambda;
  if (!e.r_equals_p() && branch == Branch::constant_sign) {
    // Scale u by c so that gamma(c u) = c^{p-r} gamma(u) = 1.
    if (fem.gamma > 0.0) {
      opts.slope_guess = std::pow(fem.gamma, -1.0 / (e.p() - e.r())) * slope;
    }
  } else if (slope != 0.0 && std::isfinite(slope)) {
    // Scale u by c = 1/u'(-1) so that the shot starts with unit slope; a
    // negative c flips u, and gamma is odd in u.
    const double c = 1.0 / slope;
    opts.gamma_guess = std::copysign(std::pow(std::fabs(c), e.p() - e.r()), c) * fem.gamma;
  }
  return shooting_solve(e, branch, tol, opts);
}

}  // namespace nlsp::variational
