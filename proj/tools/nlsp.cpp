// Command-line front end: p-trigonometric functions, the H table, lambda_alpha
// and its curve, alpha_C, and the verification suite.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "nlsp/critical.hpp"
#include "nlsp/errors.hpp"
#include "nlsp/format.hpp"
#include "nlsp/hfun.hpp"
#include "nlsp/parallel.hpp"
#include "nlsp/ptrig.hpp"
#include "nlsp/variational.hpp"
#include "nlsp/verify.hpp"

using namespace nlsp;
using json = nlohmann::ordered_json;

namespace {

enum Exit { kOk = 0, kVerifyFailed = 1, kUsage = 2, kSolver = 3 };

struct Common {
  int threads = default_threads();
  std::uint64_t seed = 20240607;
  bool gnuplot = false;
  std::string out;
};

struct Range {
  double lo = 0.0;
  double hi = 0.0;
  int steps = 0;
};

Range parse_range(const std::string& s, const char* flag) {
  Range r;
  std::stringstream ss(s);
  std::string a, b, c;
  if (!std::getline(ss, a, ':') || !std::getline(ss, b, ':') || !std::getline(ss, c) ) {
    throw DomainError(std::string(flag) + " expects lo:hi:steps, got '" + s + "'");
  }
  try {
    std::size_t used = 0;
    r.lo = std::stod(a, &used);
    if (used != a.size()) throw std::invalid_argument(a);
    r.hi = std::stod(b, &used);
    if (used != b.size()) throw std::invalid_argument(b);
    r.steps = std::stoi(c, &used);
    if (used != c.size()) throw std::invalid_argument(c);
  } catch (const std::logic_error&) {
    throw DomainError(std::string(flag) + " expects lo:hi:steps, got '" + s + "'");
  }
  if (r.steps < 1) throw DomainError(std::string(flag) + ": steps must be >= 1");
  if (r.steps > 1 && !(r.lo < r.hi)) throw DomainError(std::string(flag) + ": need lo < hi");
  return r;
}

double grid_point(const Range& g, int i) {
  if (g.steps == 1) return g.lo;
  if (i == g.steps - 1) return g.hi;
  return g.lo + (g.hi - g.lo) * i / (g.steps - 1);
}

// Writes to --out when given, else to stdout.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary);
      if (!file_) throw DomainError("cannot open output file '" + path + "'");
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

std::string stem_of(const std::string& out, const std::string& fallback) {
  if (out.empty()) return fallback;
  const auto dot = out.find_last_of('.');
  const auto slash = out.find_last_of('/');
  if (dot != std::string::npos && (slash == std::string::npos || dot > slash)) return out.substr(0, dot);
  return out;
}

void write_gnuplot(const std::string& stem, const std::vector<std::pair<double, double>>& data,
                   const std::string& xlabel, const std::string& ylabel, const std::string& title) {
  std::ofstream dat(stem + ".dat", std::ios::binary);
  dat << "# " << xlabel << ' ' << ylabel << '\n';
  for (const auto& [x, y] : data) dat << fmt_double(x) << ' ' << fmt_double(y) << '\n';
  std::ofstream plt(stem + ".plt", std::ios::binary);
  const auto slash = stem.find_last_of('/');
  const std::string base = slash == std::string::npos ? stem : stem.substr(slash + 1);
  plt << "set title \"" << title << "\"\n"
      << "set xlabel \"" << xlabel << "\"\n"
      << "set ylabel \"" << ylabel << "\"\n"
      << "set grid\n"
      << "plot \"" << base << ".dat\" using 1:2 with linespoints notitle\n";
  if (!dat || !plt) throw DomainError("cannot write gnuplot files for '" + stem + "'");
}

json result_json(const variational::RayleighResult& r) {
  json j;
  j["lambda"] = r.lambda;
  j["moment"] = r.moment;
  j["gamma"] = r.gamma;
  j["sign_class"] = variational::to_string(r.sign_class);
  j["odd_defect"] = r.odd_defect;
  j["el_residual"] = r.el_residual;
  j["method"] = variational::to_string(r.method);
  j["m_bar"] = r.classification.m_bar;
  j["sign_changes"] = r.classification.sign_changes;
  j["converged"] = r.converged;
  j["iterations"] = r.iterations;
  j["start"] = r.start;
  return j;
}

// ---------------------------------------------------------------- ptrig

struct PtrigArgs {
  double p = 2.0;
  std::string fn;
  std::optional<double> t;
  std::optional<double> x;
};

int cmd_ptrig(const PtrigArgs& a, const Common& c) {
  const PExponent pe(a.p);
  json j;
  j["fn"] = a.fn;
  j["p"] = a.p;
  double value = 0.0;
  if (a.fn == "pi") {
    j["arg"] = nullptr;
    value = ptrig::pi_p(pe);
  } else if (a.fn == "asin") {
    if (!a.x) throw DomainError("--fn asin needs --x");
    j["arg"] = *a.x;
    value = std::copysign(ptrig::asin_p(std::fabs(*a.x), pe), *a.x);
  } else {
    if (!a.t) throw DomainError("--fn " + a.fn + " needs --t");
    j["arg"] = *a.t;
    if (a.fn == "sin") value = ptrig::sin_p(*a.t, pe);
    else if (a.fn == "cos") value = ptrig::cos_p(*a.t, pe);
    else value = ptrig::sin_p_prime(*a.t, pe);
  }
  j["value"] = value;
  Output out(c.out);
  out.stream() << j.dump() << '\n';
  return kOk;
}

// ---------------------------------------------------------------- h-table

struct HTableArgs {
  double p = 2.0;
  double r = 2.0;
  std::string grid = "0:1:11";
  double tol = 1e-12;
  bool strict = false;
};

int cmd_h_table(const HTableArgs& a, const Common& c) {
  const Exponents e(a.p, a.r);
  const Range g = parse_range(a.grid, "--m-grid");
  if (g.lo < 0.0 || g.hi > 1.0) throw DomainError("--m-grid must lie in [0,1]");
  std::vector<std::string> rows(static_cast<std::size_t>(g.steps));
  std::vector<int> status(rows.size(), kOk);
  parallel_for(rows.size(), c.threads, [&](std::size_t i) {
    const double m = grid_point(g, static_cast<int>(i));
    try {
      const auto h = hfun::eval_H(m, e, a.tol);
      rows[i] = fmt_double(m) + ',' + fmt_double(h.value) + ',' + fmt_double(h.lambda_candidate) + ',' +
                fmt_double(h.est_error);
    } catch (const DivergenceError&) {
      rows[i] = fmt_double(m) + ",inf,inf,nan";
      status[i] = kUsage;
    } catch (const ToleranceError& ex) {
      rows[i] = fmt_double(m) + ',' + fmt_double(ex.best_estimate) + ",nan," + fmt_double(ex.achieved_error);
      status[i] = kSolver;
    }
  });
  int code = kOk;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (status[i] == kUsage) {
      std::cerr << "warning: H diverges at m=" << fmt_double(grid_point(g, static_cast<int>(i)))
                << " when r = p\n";
      if (a.strict) return kUsage;
    } else if (status[i] == kSolver) {
      std::cerr << "warning: quadrature tolerance not reached at m="
                << fmt_double(grid_point(g, static_cast<int>(i))) << '\n';
      code = kSolver;
    }
  }
  Output out(c.out);
  out.stream() << "m,H,lambda_candidate,est_error\n";
  for (const auto& row : rows) out.stream() << row << '\n';
  if (c.gnuplot) {
    std::vector<std::pair<double, double>> data;
    for (int i = 0; i < g.steps; ++i) {
      if (status[i] == kOk) {
        const double m = grid_point(g, i);
        data.emplace_back(m, hfun::eval_H(m, e, a.tol).value);
      }
    }
    write_gnuplot(stem_of(c.out, "h_table"), data, "m", "H(m)",
                  "H(m,p,r), p=" + fmt_double(a.p) + ", r=" + fmt_double(a.r));
  }
  return code;
}

// ---------------------------------------------------------------- lambda

struct LambdaArgs {
  double p = 2.0;
  double r = 2.0;
  double alpha = 0.0;
  int n_cells = 1024;
  std::string method = "fem";
  std::string dump;
  double tol = 1e-12;
  int max_iter = 20000;
};

variational::MinimizeOptions minimize_options(const Common& c, double tol) {
  variational::MinimizeOptions mo;
  mo.threads = c.threads;
  mo.seed = c.seed;
  mo.tol = tol;
  return mo;
}

// Lowest of the two shooting branches; both may be attempted.
variational::RayleighResult shoot_lowest(const Exponents& e, int n_cells,
                                         const variational::RayleighResult* fem) {
  variational::ShootingOptions so;
  so.n_cells = n_cells;
  std::optional<variational::RayleighResult> best;
  std::string errors;
  for (auto branch : {variational::Branch::constant_sign, variational::Branch::sign_changing}) {
    try {
      const bool seeded = fem && (branch == variational::Branch::constant_sign) ==
                                     (fem->sign_class != variational::SignClass::sign_changing);
      auto res = seeded ? variational::shooting_from(*fem, e, branch, 1e-10, so)
                        : variational::shooting_solve(e, branch, 1e-10, so);
      if (!best || res.lambda < best->lambda) best = std::move(res);
    } catch (const SolverError& ex) {
      errors += std::string(errors.empty() ? "" : "; ") + ex.what();
    }
  }
  if (!best) throw SolverError("no shooting branch converged: " + errors);
  return *best;
}

int cmd_lambda(const LambdaArgs& a, const Common& c) {
  const Exponents e(a.p, a.r, a.alpha);
  std::optional<variational::RayleighResult> fem;
  std::optional<variational::RayleighResult> shot;
  if (a.method != "shoot") {
    auto mo = minimize_options(c, a.tol);
    mo.max_iter = a.max_iter;
    fem = variational::minimize_rayleigh(e, a.n_cells, mo);
  }
  if (a.method != "fem") shot = shoot_lowest(e, a.n_cells, fem ? &*fem : nullptr);

  const auto& main = fem ? *fem : *shot;
  json j;
  j["p"] = a.p;
  j["r"] = a.r;
  j["alpha"] = a.alpha;
  j["n_cells"] = a.n_cells;
  const json fields = result_json(main);
  for (const auto& [k, v] : fields.items()) j[k] = v;
  j["certification_threshold"] = variational::certification_threshold(a.n_cells, main.lambda);
  if (fem && shot) {
    j["lambda_shoot"] = shot->lambda;
    j["sign_class_shoot"] = variational::to_string(shot->sign_class);
    j["gamma_shoot"] = shot->gamma;
    j["relative_difference"] = (fem->lambda - shot->lambda) / shot->lambda;
  }
  Output out(c.out);
  out.stream() << j.dump() << '\n';
  if (!a.dump.empty()) {
    std::ofstream f(a.dump, std::ios::binary);
    if (!f) throw DomainError("cannot open '" + a.dump + "'");
    main.minimizer.write_csv(f);
  }
  if (c.gnuplot) {
    std::vector<std::pair<double, double>> data;
    const auto& u = main.minimizer;
    for (int k = 0; k <= u.n_cells(); ++k) data.emplace_back(u.x(k), u.at(k));
    write_gnuplot(stem_of(c.out.empty() ? a.dump : c.out, "minimizer"), data, "x", "u(x)",
                  "minimizer, p=" + fmt_double(a.p) + ", r=" + fmt_double(a.r) + ", alpha=" + fmt_double(a.alpha));
  }
  return kOk;
}

// ---------------------------------------------------------------- lambda-curve

struct CurveArgs {
  double p = 2.0;
  double r = 2.0;
  std::string range = "0:10:11";
  int n_cells = 1024;
  double tol = 1e-12;
};

int cmd_lambda_curve(const CurveArgs& a, const Common& c) {
  const Exponents e(a.p, a.r);
  const Range g = parse_range(a.range, "--alpha-range");
  if (g.steps < 2) throw DomainError("--alpha-range needs at least 2 steps");
  critical::CurveOptions co;
  co.n_cells = a.n_cells;
  co.minimize = minimize_options(c, a.tol);
  const auto curve = critical::lambda_curve(e, g.lo, g.hi, g.steps, co);
  Output out(c.out);
  critical::write_csv(out.stream(), curve);
  bool failed = false;
  for (const auto& pt : curve.points) failed = failed || !pt.ok;
  for (const auto& v : curve.violations) std::cerr << "warning: " << v << '\n';
  if (c.gnuplot) {
    std::vector<std::pair<double, double>> data;
    for (const auto& pt : curve.points) {
      if (pt.ok) data.emplace_back(pt.alpha, pt.lambda);
    }
    write_gnuplot(stem_of(c.out, "lambda_curve"), data, "alpha", "lambda",
                  "lambda_alpha, p=" + fmt_double(a.p) + ", r=" + fmt_double(a.r));
  }
  return failed ? kSolver : kOk;
}

// ---------------------------------------------------------------- alpha-c

struct AlphaCArgs {
  double p = 2.0;
  double r = 2.0;
  double tol = 1e-6;
  int n_cells = 1024;
  bool fem_only = false;
};

int cmd_alpha_c(const AlphaCArgs& a, const Common& c) {
  const Exponents e(a.p, a.r);
  critical::AlphaCOptions ao;
  ao.tol = a.tol;
  ao.n_cells = a.n_cells;
  ao.use_shooting = !a.fem_only;
  ao.minimize = minimize_options(c, 1e-12);
  const auto res = critical::find_alpha_c(e, ao);
  Output out(c.out);
  out.stream() << critical::to_json(res) << '\n';
  return kOk;
}

// ---------------------------------------------------------------- alpha-zero

struct ZeroArgs {
  double p = 2.0;
  double r = 2.0;
  double tol = 1e-8;
  int n_cells = 1024;
};

int cmd_alpha_zero(const ZeroArgs& a, const Common& c) {
  critical::ZeroCrossingOptions zo;
  zo.tol = a.tol;
  zo.n_cells = a.n_cells;
  zo.minimize = minimize_options(c, 1e-12);
  const auto z = critical::alpha_zero_crossing(Exponents(a.p, a.r), zo);
  json j;
  j["p"] = a.p;
  j["r"] = a.r;
  j["alpha_star"] = z.alpha_star;
  j["lambda_at_root"] = z.lambda_at_root;
  j["certificate"] = z.certificate;
  j["iterations"] = z.iterations;
  j["bracket_lo"] = z.bracket_lo;
  j["bracket_hi"] = z.bracket_hi;
  Output out(c.out);
  out.stream() << j.dump() << '\n';
  return kOk;
}

// ---------------------------------------------------------------- rescale

struct RescaleArgs {
  double p = 2.0;
  double r = 2.0;
  double lambda = 0.0;
  double alpha = 0.0;
  double a = -1.0;
  double b = 1.0;
  bool inverse = false;
};

int cmd_rescale(const RescaleArgs& a, const Common& c) {
  const Exponents e(a.p, a.r);
  const auto res = a.inverse ? critical::rescale_interval_inverse(a.lambda, a.alpha, e, a.a, a.b)
                             : critical::rescale_interval(a.lambda, a.alpha, e, a.a, a.b);
  json j;
  j["lambda"] = res.lambda;
  j["alpha"] = res.alpha;
  Output out(c.out);
  out.stream() << j.dump() << '\n';
  return kOk;
}

// ---------------------------------------------------------------- verify

int cmd_verify(const std::string& suite, bool fast, const Common& c) {
  verify::Options vo;
  vo.fast = fast;
  vo.threads = c.threads;
  const auto criteria = verify::run(verify::parse_suite(suite), vo);
  Output out(c.out);
  bool all = true;
  for (const auto& cr : criteria) {
    for (const auto& ch : cr.checks) {
      out.stream() << cr.id << '.' << ch.name << ',' << fmt_double(ch.measured) << ','
                   << fmt_double(ch.expected) << ',' << fmt_double(ch.tol) << ','
                   << (ch.pass ? "PASS" : "FAIL") << '\n';
    }
    all = all && cr.pass();
  }
  return all ? kOk : kVerifyFailed;
}

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--threads", c.threads, "worker threads (default: NLSP_THREADS or hardware)")
      ->check(CLI::PositiveNumber);
  sub->add_option("--seed", c.seed, "seed of the random descent starts");
  sub->add_flag("--gnuplot", c.gnuplot, "also write <stem>.dat and <stem>.plt");
  sub->add_option("--out", c.out, "output file (default: stdout)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nonlocal p-Laplacian eigenvalue toolkit"};
  app.require_subcommand(1);
  Common common;

  PtrigArgs pa;
  auto* ptrig_cmd = app.add_subcommand("ptrig", "p-trigonometric functions");
  ptrig_cmd->add_option("--p", pa.p, "exponent p >= 2")->required();
  ptrig_cmd->add_option("--fn", pa.fn, "function")
      ->required()
      ->check(CLI::IsMember({"pi", "sin", "cos", "asin", "dsin"}));
  ptrig_cmd->add_option("--t", pa.t, "argument of sin/cos/dsin");
  ptrig_cmd->add_option("--x", pa.x, "argument of asin");
  add_common(ptrig_cmd, common);

  HTableArgs ha;
  auto* h_cmd = app.add_subcommand("h-table", "table of H(m,p,r)");
  h_cmd->add_option("--p", ha.p)->required();
  h_cmd->add_option("--r", ha.r)->required();
  h_cmd->add_option("--m-grid", ha.grid, "lo:hi:steps");
  h_cmd->add_option("--tol", ha.tol);
  h_cmd->add_flag("--strict", ha.strict, "fail on divergent points instead of warning");
  add_common(h_cmd, common);

  LambdaArgs la;
  auto* l_cmd = app.add_subcommand("lambda", "lambda_alpha(p,r) at one alpha");
  l_cmd->add_option("--p", la.p)->required();
  l_cmd->add_option("--r", la.r)->required();
  l_cmd->add_option("--alpha", la.alpha)->required();
  l_cmd->add_option("--n-cells", la.n_cells)->check(CLI::Range(8, 1 << 22));
  l_cmd->add_option("--method", la.method)->check(CLI::IsMember({"fem", "shoot", "both"}));
  l_cmd->add_option("--dump-minimizer", la.dump, "write the minimizer as x,y CSV");
  l_cmd->add_option("--tol", la.tol, "descent tolerance");
  l_cmd->add_option("--max-iter", la.max_iter, "descent iteration cap per start")->check(CLI::PositiveNumber);
  add_common(l_cmd, common);

  CurveArgs ca;
  auto* c_cmd = app.add_subcommand("lambda-curve", "lambda_alpha on an alpha grid");
  c_cmd->add_option("--p", ca.p)->required();
  c_cmd->add_option("--r", ca.r)->required();
  c_cmd->add_option("--alpha-range", ca.range, "lo:hi:steps")->required();
  c_cmd->add_option("--n-cells", ca.n_cells)->check(CLI::Range(8, 1 << 22));
  c_cmd->add_option("--tol", ca.tol, "descent tolerance");
  add_common(c_cmd, common);

  AlphaCArgs aa;
  auto* a_cmd = app.add_subcommand("alpha-c", "critical threshold alpha_C(p,r)");
  a_cmd->add_option("--p", aa.p)->required();
  a_cmd->add_option("--r", aa.r)->required();
  a_cmd->add_option("--tol", aa.tol, "bracket width");
  a_cmd->add_option("--n-cells", aa.n_cells)->check(CLI::Range(8, 1 << 22));
  a_cmd->add_flag("--fem-only", aa.fem_only, "skip the shooting refinement");
  add_common(a_cmd, common);

  ZeroArgs za;
  auto* z_cmd = app.add_subcommand("alpha-zero", "the alpha < 0 where lambda_alpha vanishes");
  z_cmd->add_option("--p", za.p)->required();
  z_cmd->add_option("--r", za.r)->required();
  z_cmd->add_option("--tol", za.tol);
  z_cmd->add_option("--n-cells", za.n_cells)->check(CLI::Range(8, 1 << 22));
  add_common(z_cmd, common);

  RescaleArgs ra;
  auto* r_cmd = app.add_subcommand("rescale", "map lambda and alpha between (-1,1) and (a,b)");
  r_cmd->add_option("--p", ra.p)->required();
  r_cmd->add_option("--r", ra.r)->required();
  r_cmd->add_option("--lambda", ra.lambda)->required();
  r_cmd->add_option("--alpha", ra.alpha)->required();
  r_cmd->add_option("--a", ra.a);
  r_cmd->add_option("--b", ra.b);
  r_cmd->add_flag("--inverse", ra.inverse);
  add_common(r_cmd, common);

  std::string suite = "all";
  bool fast = false;
  auto* v_cmd = app.add_subcommand("verify", "run the verification suite");
  v_cmd->add_option("--suite", suite)->check(CLI::IsMember({"ptrig", "hfun", "variational", "critical", "all"}));
  v_cmd->add_flag("--fast", fast, "reduced grids");
  add_common(v_cmd, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*ptrig_cmd) return cmd_ptrig(pa, common);
    if (*h_cmd) return cmd_h_table(ha, common);
    if (*l_cmd) return cmd_lambda(la, common);
    if (*c_cmd) return cmd_lambda_curve(ca, common);
    if (*a_cmd) return cmd_alpha_c(aa, common);
    if (*z_cmd) return cmd_alpha_zero(za, common);
    if (*r_cmd) return cmd_rescale(ra, common);
    if (*v_cmd) return cmd_verify(suite, fast, common);
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const DivergenceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const SolverError& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return kSolver;
  } catch (const ToleranceError& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return kSolver;
  }
  return kUsage;
}
