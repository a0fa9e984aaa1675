#include "descent.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "nlsp/discrete.hpp"
#include "nlsp/errors.hpp"
#include "nlsp/exponents.hpp"

namespace nlsp::detail {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

// Returns the factor s with u <- s u.
double rescale_unit_max(std::vector<double>& u) {
  double m = 0.0;
  for (double v : u) m = std::max(m, std::fabs(v));
  if (m == 0.0) throw SolverError("descent: iterate collapsed to zero");
  for (double& v : u) v /= m;
  return 1.0 / m;
}

// Solves K z = g with K = sum_c k_c/h (e_{c+1} - e_c)(e_{c+1} - e_c)^T on the
// interior nodes, k_c = |u'_c|^{p-2} + floor.
std::vector<double> apply_preconditioner(std::span<const double> u, std::span<const double> g,
                                         int n, double p) {
  const double h = 2.0 / n;
  const auto s = discrete::slopes(u, n);
  std::vector<double> k(s.size());
  double mean = 0.0;
  for (std::size_t c = 0; c < s.size(); ++c) {
    k[c] = abs_pow(s[c], p - 2.0);
    mean += k[c];
  }
  mean /= static_cast<double>(s.size());
  const double floor = p == 2.0 ? 0.0 : 0.05 * mean + 1e-300;
  for (double& kc : k) kc += floor;

  const std::size_t m = g.size();
  std::vector<double> diag(m), off(m), rhs(g.begin(), g.end());
  for (std::size_t i = 0; i < m; ++i) {
    diag[i] = (k[i] + k[i + 1]) / h;
    off[i] = -k[i + 1] / h;  // coupling of node i+1 and i+2 (1-based), unused for the last row
  }
  // Thomas algorithm.
  for (std::size_t i = 1; i < m; ++i) {
    const double w = off[i - 1] / diag[i - 1];
    diag[i] -= w * off[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  std::vector<double> z(m);
  z[m - 1] = rhs[m - 1] / diag[m - 1];
  for (std::size_t i = m - 1; i-- > 0;) z[i] = (rhs[i] - off[i] * z[i + 1]) / diag[i];
  return z;
}

}  // namespace

DescentOutcome preconditioned_descent(const Functional& f, std::vector<double> u0, int n_cells,
                                      const DescentSettings& settings) {
  DescentOutcome out;
  std::vector<double> u = std::move(u0);
  rescale_unit_max(u);
  std::vector<double> g;
  double value = f(u, &g);
  if (!std::isfinite(value)) throw SolverError("descent: non-finite objective at start");
  std::vector<double> z = apply_preconditioner(u, g, n_cells, settings.p);
  std::vector<double> d(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) d[i] = -z[i];
  double gz = dot(g, z);
  double step = 1.0;
  int stalled = 0;
  std::vector<double> trial(u.size());
  std::vector<double> g_new;

  for (int it = 1; it <= settings.max_iter; ++it) {
    out.iterations = it;
    double gd = dot(g, d);
    bool steepest = false;
    if (!(gd < 0.0)) {
      for (std::size_t i = 0; i < z.size(); ++i) d[i] = -z[i];
      gd = -gz;
      steepest = true;
    }
    if (!(gd < 0.0)) {
      out.converged = true;  // stationary to machine precision
      break;
    }

    double t = step;
    double trial_value = 0.0;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      for (std::size_t i = 0; i < u.size(); ++i) trial[i] = u[i] + t * d[i];
      trial_value = f(trial, nullptr);
      if (std::isfinite(trial_value) && trial_value <= value + 1e-4 * t * gd) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (accepted) {
      // One quadratic-interpolation refinement along d; Armijo alone tends to
      // take the largest admissible step, which oscillates in stiff modes.
      const double curv = trial_value - value - gd * t;
      if (curv > 0.0) {
        const double t_q = -gd * t * t / (2.0 * curv);
        if (t_q > 0.05 * t && t_q < 20.0 * t && std::fabs(t_q - t) > 1e-3 * t) {
          std::vector<double> alt(u.size());
          for (std::size_t i = 0; i < u.size(); ++i) alt[i] = u[i] + t_q * d[i];
          const double alt_value = f(alt, nullptr);
          if (std::isfinite(alt_value) && alt_value < trial_value) {
            trial.swap(alt);
            trial_value = alt_value;
            t = t_q;
          }
        }
      }
    }
    if (!accepted) {
      if (!steepest) {
        for (std::size_t i = 0; i < z.size(); ++i) d[i] = -z[i];
        step = 1.0;
        continue;
      }
      out.converged = stalled > 0;
      break;
    }
    step = std::min(2.0 * t, 1e6);

    // Rescaling u by s maps the gradient of a 0-homogeneous functional by 1/s;
    // carry the CG history along so the next conjugate direction stays valid.
    const double sc = rescale_unit_max(trial);
    for (double& v : d) v *= sc;
    for (double& v : z) v /= sc;
    for (double& v : g) v /= sc;
    gz /= sc * sc;
    const double new_value = f(trial, &g_new);
    const double rel = (value - new_value) / std::max(std::fabs(new_value), 1e-300);
    stalled = rel < settings.tol ? stalled + 1 : 0;
    u.swap(trial);
    value = new_value;

    std::vector<double> z_new = apply_preconditioner(u, g_new, n_cells, settings.p);
    double num = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) num += g_new[i] * (z_new[i] - z[i]);
    const double beta = std::max(0.0, num / gz);
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = -z_new[i] + beta * d[i];
    z.swap(z_new);
    g.swap(g_new);
    gz = dot(g, z);

    if (stalled >= settings.stall_limit) {
      out.converged = true;
      break;
    }
  }
  out.u = std::move(u);
  out.value = value;
  return out;
}

}  // namespace nlsp::detail
