#include "nlsp/discrete.hpp"

#include <array>
#include <cmath>

#include "nlsp/exponents.hpp"

namespace nlsp::discrete {

namespace {

struct GaussRule {
  std::array<double, 4> xi;  // on [0,1]
  std::array<double, 4> w;   // sum to 1
};

GaussRule make_rule() {
  const double a = std::sqrt(3.0 / 7.0 - 2.0 / 7.0 * std::sqrt(6.0 / 5.0));
  const double b = std::sqrt(3.0 / 7.0 + 2.0 / 7.0 * std::sqrt(6.0 / 5.0));
  const double wa = (18.0 + std::sqrt(30.0)) / 36.0;
  const double wb = (18.0 - std::sqrt(30.0)) / 36.0;
  return {{0.5 * (1 - b), 0.5 * (1 - a), 0.5 * (1 + a), 0.5 * (1 + b)},
          {0.5 * wb, 0.5 * wa, 0.5 * wa, 0.5 * wb}};
}

const GaussRule& rule() {
  static const GaussRule g = make_rule();
  return g;
}

template <bool WithGrad>
Terms evaluate_impl(std::span<const double> u, int n, double p, double r, Gradients* grad) {
  const double h = 2.0 / n;
  const auto& g = rule();
  auto node = [&](int k) { return (k <= 0 || k >= n) ? 0.0 : u[static_cast<std::size_t>(k - 1)]; };
  if constexpr (WithGrad) {
    const std::size_t m = static_cast<std::size_t>(n - 1);
    grad->energy.assign(m, 0.0);
    grad->mass.assign(m, 0.0);
    grad->moment.assign(m, 0.0);
    grad->lr_mass.assign(m, 0.0);
  }
  auto add = [&](std::vector<double>& v, int k, double value) {
    if (k > 0 && k < n) v[static_cast<std::size_t>(k - 1)] += value;
  };

  Terms t;
  for (int c = 0; c < n; ++c) {
    const double ul = node(c);
    const double ur = node(c + 1);
    const double s = (ur - ul) / h;
    t.energy += h * abs_pow(s, p);
    if constexpr (WithGrad) {
      const double flux = p * signed_pow(s, p - 1.0);
      add(grad->energy, c + 1, flux);
      add(grad->energy, c, -flux);
    }
    if (ul == 0.0 && ur == 0.0) continue;
    for (int q = 0; q < 4; ++q) {
      const double xi = g.xi[static_cast<std::size_t>(q)];
      const double wq = h * g.w[static_cast<std::size_t>(q)];
      const double uq = ul * (1.0 - xi) + ur * xi;
      const double a = std::fabs(uq);
      const double a_r1 = abs_pow(a, r - 1.0);
      const double a_p1 = abs_pow(a, p - 1.0);
      const double sgn = uq < 0.0 ? -1.0 : 1.0;
      t.mass += wq * a_p1 * a;
      t.moment += wq * sgn * a_r1 * a;
      t.lr_mass += wq * a_r1 * a;
      if constexpr (WithGrad) {
        const double dm = wq * p * sgn * a_p1;
        const double dmom = wq * r * a_r1;
        const double dlr = wq * r * sgn * a_r1;
        add(grad->mass, c, dm * (1.0 - xi));
        add(grad->mass, c + 1, dm * xi);
        add(grad->moment, c, dmom * (1.0 - xi));
        add(grad->moment, c + 1, dmom * xi);
        add(grad->lr_mass, c, dlr * (1.0 - xi));
        add(grad->lr_mass, c + 1, dlr * xi);
      }
    }
  }
  return t;
}

}  // namespace

Terms evaluate(std::span<const double> interior, int n_cells, double p, double r) {
  return evaluate_impl<false>(interior, n_cells, p, r, nullptr);
}

Terms evaluate(std::span<const double> interior, int n_cells, double p, double r, Gradients& grad) {
  return evaluate_impl<true>(interior, n_cells, p, r, &grad);
}

std::vector<double> slopes(std::span<const double> interior, int n_cells) {
  const double h = 2.0 / n_cells;
  std::vector<double> s(static_cast<std::size_t>(n_cells));
  for (int c = 0; c < n_cells; ++c) {
    const double ul = c == 0 ? 0.0 : interior[static_cast<std::size_t>(c - 1)];
    const double ur = c + 1 == n_cells ? 0.0 : interior[static_cast<std::size_t>(c)];
    s[static_cast<std::size_t>(c)] = (ur - ul) / h;
  }
  return s;
}

}  // namespace nlsp::discrete
