#pragma once

// The map alpha -> lambda_alpha(p, r), its saturation threshold alpha_C and
// related closed forms.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "nlsp/exponents.hpp"
#include "nlsp/variational.hpp"

namespace nlsp::critical {

struct CurvePoint {
  double alpha = 0.0;
  double lambda = 0.0;
  double moment = 0.0;
  variational::SignClass sign_class = variational::SignClass::positive;
  double odd_defect = 0.0;
  double el_residual = 0.0;
  double m_bar = 0.0;  // depth ratio, sign-changing points only
  bool ok = true;
  std::string error;  // set when !ok
};

struct CurveOptions {
  int n_cells = 1024;
  variational::MinimizeOptions minimize;
  // Absolute noise band of the computed lambda values, used by the
  // monotonicity and Lipschitz checks.
  double solver_tol = 1e-9;
};

struct LambdaCurve {
  double p = 2.0;
  double r = 2.0;
  double solver_tol = 1e-9;
  std::vector<CurvePoint> points;  // alpha strictly increasing
  std::vector<std::string> violations;
};

/// lambda_alpha on steps equally spaced alphas in [alpha_lo, alpha_hi]
/// (endpoints included). Points are solved independently, possibly
/// concurrently; a failed point is marked !ok. Monotonicity, the Lipschitz
/// bound and the upper bound pi_p^p are checked between consecutive ok
/// points and any breach is recorded in `violations`.
LambdaCurve lambda_curve(const Exponents& exps, double alpha_lo, double alpha_hi, int steps,
                         const CurveOptions& opts = {});

/// Lipschitz constant 2^{(p-r)/r} of alpha -> lambda_alpha.
double lipschitz_constant(const Exponents& exps);

/// CSV with header alpha,lambda,moment,sign_class,odd_defect. Failed points
/// are written with lambda = nan.
void write_csv(std::ostream& os, const LambdaCurve& curve);

/// (2^p - 1)/2^p * pi_p^p, the threshold for r = p.
double alpha_c_exact_rp(PExponent p);

/// (2^p - 1)/2^{p/r+p-1} * pi_p^p; equals alpha_c_exact_rp when r = p.
double alpha_c_lower_bound(const Exponents& exps);

struct Rescaled {
  double lambda;
  double alpha;
};

/// Maps lambda_alpha on (-1,1) to the interval (a,b): returns
/// lambda_ab = (2/(b-a))^p lambda and alpha_tilde = ((b-a)/2)^{p/r+p-1} alpha,
/// so that lambda_alpha(]a,b[) = lambda_ab when lambda = lambda_{alpha_tilde}.
Rescaled rescale_interval(double lambda, double alpha, const Exponents& exps, double a, double b);

/// Inverse of rescale_interval.
Rescaled rescale_interval_inverse(double lambda_ab, double alpha_tilde, const Exponents& exps, double a,
                                  double b);

struct AlphaCOptions {
  double tol = 1e-6;  // final bracket width
  int n_cells = 1024;
  variational::MinimizeOptions minimize;
  bool use_shooting = true;    // refine the FEM bracket with shooting
  double shooting_tol = 1e-11;
  bool solve_branches = true;  // solve both branches at the estimate
};

struct AlphaCResult {
  double alpha_c = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  double lambda_lo = 0.0;
  double lambda_hi = 0.0;
  int iterations = 0;
  double p = 2.0;
  double r = 2.0;
  double tol = 0.0;

  double delta = 0.0;           // saturation margin of the final predicate
  bool shooting_certified = false;
  double fem_lo = 0.0;          // bracket after the FEM stage
  double fem_hi = 0.0;
  int fem_iterations = 0;
  double lower_bound = 0.0;
  std::optional<double> closed_form;  // r = p only

  // Both branches at alpha_c (constant sign at lo, odd at alpha_c).
  std::optional<variational::RayleighResult> positive_branch;
  std::optional<variational::RayleighResult> odd_branch;
};

/// Bisection for alpha_C = min{alpha : lambda_alpha = pi_p^p}. The bracket
/// starts at [0, hi] with hi doubled from the lower bound until the FEM
/// value reaches pi_p^p - delta, delta = max(2 tol_fem, 1e-4 pi_p^p). When
/// use_shooting is set, the bracket is then refined on the constant-sign
/// branch computed by shooting: alpha is sub-critical iff that branch exists
/// with lambda < pi_p^p - delta_s, delta_s tied to shooting_tol.
AlphaCResult find_alpha_c(const Exponents& exps, const AlphaCOptions& opts = {});

std::string to_json(const AlphaCResult& res);

struct ZeroCrossing {
  double alpha_star = 0.0;
  double lambda_at_root = 0.0;
  double certificate = 0.0;  // min int|w'|^p / (int|w|^r)^{p/r}; equals -alpha_star
  int iterations = 0;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
};

struct ZeroCrossingOptions {
  double tol = 1e-8;
  int n_cells = 1024;
  variational::MinimizeOptions minimize;
  double lambda_floor = -1e3;  // bracket growth stops once lambda drops below this
};

/// The alpha < 0 with lambda_alpha = 0, by Illinois iteration on the FEM
/// value, plus the independent certificate.
ZeroCrossing alpha_zero_crossing(const Exponents& exps, const ZeroCrossingOptions& opts = {});

/// min over w of int|w'|^p / (int|w|^r)^{p/r} by the same discrete descent.
double lr_rayleigh_minimum(const Exponents& exps, int n_cells, const variational::MinimizeOptions& opts = {});

}  // namespace nlsp::critical
