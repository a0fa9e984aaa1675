#pragma once

// Discrete minimization of the nonlocal Rayleigh quotient
//
//   Q_alpha[u] = ( int |u'|^p + alpha |int |u|^{r-1} u|^{p/r} ) / int |u|^p
//
// over W_0^{1,p}(-1,1), and an Euler-Lagrange shooting solver that certifies
// the discrete values.

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "nlsp/exponents.hpp"
#include "nlsp/grid_function.hpp"

namespace nlsp::variational {

enum class SignClass { positive, negative, sign_changing };
enum class Method { fem_descent, shooting };
enum class Branch { constant_sign, sign_changing };

std::string to_string(SignClass c);
std::string to_string(Method m);
std::string to_string(Branch b);

struct Classification {
  SignClass sign_class = SignClass::positive;
  int sign_changes = 0;
  double zero_location = std::numeric_limits<double>::quiet_NaN();  // first interior zero
  double odd_defect = 0.0;  // max |u(x) + u(-x)| with ||u||_p = 1
  double m_bar = 0.0;       // depth ratio |min| / max (<= 1); 0 unless sign-changing
};

/// One local minimum reached from one descent start.
struct Candidate {
  std::string start;
  double lambda = 0.0;
  double moment = 0.0;
  SignClass sign_class = SignClass::positive;
  bool converged = false;
  int iterations = 0;
};

struct RayleighResult {
  double lambda = 0.0;
  GridFunction minimizer{8};  // ||u||_p = 1, moment >= 0
  double moment = 0.0;
  double gamma = 0.0;
  SignClass sign_class = SignClass::positive;
  double odd_defect = 0.0;
  double el_residual = 0.0;
  Method method = Method::fem_descent;

  Classification classification;
  bool converged = false;
  int iterations = 0;
  std::string start;                 // winning start (FEM) or branch (shooting)
  std::vector<Candidate> candidates;  // all starts, FEM only
};

/// Q_alpha[u] with exact |M|^{p/r}. Throws DomainError for u == 0.
double rayleigh_quotient(const GridFunction& u, const Exponents& e);

/// int |u|^{r-1} u.
double r_moment(const GridFunction& u, const Exponents& e);

/// L^p norm of the piecewise-linear interpolant.
double lp_norm(const GridFunction& u, double p);

/// The nonlocal constant: 0 when r = p and |moment| <= zero_threshold,
/// otherwise |moment|^{p/r-2} moment.
double gamma_of(double moment, const Exponents& e, double zero_threshold = 1e-12);
double gamma_of(const GridFunction& u, const Exponents& e, double zero_threshold = 1e-12);

struct MinimizeOptions {
  double tol = 1e-12;      // relative decrease stopping tolerance of each descent
  int max_iter = 20000;
  std::uint64_t seed = 20240607;
  int random_starts = 3;
  bool positive_start = true;
  bool odd_start = true;
  int threads = 1;
  double sign_tol = 1e-6;  // zero band for classification, relative to max |u|
};

/// Multi-start preconditioned descent on the discretized Q_alpha. Starts:
/// cos_p(pi_p x/2), sin_p(pi_p x) and seeded random profiles. Returns the
/// best result (ties broken by smaller residual, then start order). Throws
/// SolverError if the winning descent did not converge.
RayleighResult minimize_rayleigh(const Exponents& e, int n_cells, const MinimizeOptions& opts = {});

/// Weak Euler-Lagrange residual
///   max_i | int |y'|^{p-2} y' phi_i' + alpha gamma int |y|^{r-1} phi_i - lambda int |y|^{p-2} y phi_i |
/// over interior hat functions, divided by ||y||_p^{p-1}.
double el_residual(const GridFunction& y, double lambda, double gamma, const Exponents& e);
double el_residual(const RayleighResult& res, const Exponents& e);

/// Residual level below which a result is accepted as a critical point.
double certification_threshold(int n_cells, double lambda);

Classification classify_minimizer(const GridFunction& y, double p, double tol = 1e-6);
Classification classify_minimizer(const RayleighResult& res, double p, double tol = 1e-6);

struct ShootingOptions {
  double rtol = 1e-10;
  double atol = 1e-12;
  int max_newton = 60;
  int n_cells = 2048;  // mesh on which the solution is sampled for output
  // Initial guesses; NaN means "derive one" (see shooting_solve).
  double lambda_guess = std::numeric_limits<double>::quiet_NaN();
  double gamma_guess = std::numeric_limits<double>::quiet_NaN();
  double slope_guess = std::numeric_limits<double>::quiet_NaN();  // y'(-1), constant-sign r < p only
};

/// Solves the Euler-Lagrange two-point problem by shooting from x = -1 with
/// y(-1) = 0 on the system
///   y' = sign(w)|w|^{1/(p-1)},  w' = alpha gamma |y|^{r-1} - lambda |y|^{p-2} y,
/// with Newton so that y(1) = 0 and gamma is consistent with the moment of y.
/// For r = p, gamma is fixed by the branch (1 for constant sign, 0 for
/// sign-changing), y'(-1) = 1, and Newton runs on lambda alone. For r < p the
/// sign-changing branch uses y'(-1) = 1 and unknowns (lambda, gamma); the
/// constant-sign branch pins gamma = 1 and solves for (lambda, y'(-1)), which
/// stays well conditioned when the boundary slope of the positive solution
/// degenerates.
///
/// Without guesses the constant-sign branch is seeded from a FEM solve and the
/// sign-changing branch from (pi_p^p, 0).
RayleighResult shooting_solve(const Exponents& e, Branch branch, double tol = 1e-10,
                              const ShootingOptions& opts = {});

/// Shooting seeded from a FEM result (lambda and rescaled gamma).
RayleighResult shooting_from(const RayleighResult& fem, const Exponents& e, Branch branch,
                             double tol = 1e-10, ShootingOptions opts = {});

}  // namespace nlsp::variational
