#pragma once

#include <cmath>
#include <numbers>
#include <vector>

namespace meyer::detail {

struct GaussRule {
  std::vector<double> nodes, weights;  // on [-1, 1]
};

/// Gauss-Legendre rule of order q (Newton iteration on P_q).
inline GaussRule gauss_legendre(int q) {
  GaussRule g;
  g.nodes.resize(q);
  g.weights.resize(q);
  for (int i = 0; i < (q + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (q + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= q; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = q * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= q; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = q * (x * p1 - p0) / (x * x - 1.0);
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    g.nodes[i] = -x;
    g.nodes[q - 1 - i] = x;
    g.weights[i] = w;
    g.weights[q - 1 - i] = w;
  }
  if (q % 2 == 1) g.nodes[q / 2] = 0.0;
  return g;
}

/// Integral of f over [a, b] split into `panels` equal pieces.
template <class F>
auto integrate(F&& f, double a, double b, const GaussRule& rule, int panels = 1) {
  using R = decltype(f(a));
  R s{};
  const double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double c = a + (p + 0.5) * h;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) s += rule.weights[i] * 0.5 * h * f(c + 0.5 * h * rule.nodes[i]);
  }
  return s;
}

}  // namespace meyer::detail
