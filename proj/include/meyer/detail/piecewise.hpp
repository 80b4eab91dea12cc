#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

namespace meyer::detail {

/// Compactly supported piecewise polynomial on the real line. On
/// [knots[i], knots[i+1]) the value is sum_j coeffs[i][j] * (x - knots[i])^j.
/// Left of the first knot the value is 0; right of the last knot it is
/// `right_value` (0 for compactly supported functions, the total mass for
/// antiderivatives).
class Piecewise {
 public:
  std::vector<double> knots;
  std::vector<std::vector<double>> coeffs;
  double right_value = 0.0;

  static Piecewise indicator(double a, double b) {
    Piecewise p;
    p.knots = {a, b};
    p.coeffs = {{1.0}};
    return p;
  }

  double operator()(double x) const {
    if (knots.empty() || x < knots.front()) return 0.0;
    if (x >= knots.back()) return right_value;
    auto it = std::upper_bound(knots.begin(), knots.end(), x);
    std::size_t i = static_cast<std::size_t>(it - knots.begin()) - 1;
    return eval_piece(i, x);
  }

  double eval_piece(std::size_t i, double x) const {
    const double u = x - knots[i];
    const auto& c = coeffs[i];
    double v = 0;
    for (std::size_t j = c.size(); j-- > 0;) v = v * u + c[j];
    return v;
  }

  Piecewise antiderivative() const {
    Piecewise F;
    F.knots = knots;
    double acc = 0;
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
      std::vector<double> c(coeffs[i].size() + 1, 0.0);
      c[0] = acc;
      for (std::size_t j = 0; j < coeffs[i].size(); ++j) c[j + 1] = coeffs[i][j] / static_cast<double>(j + 1);
      F.coeffs.push_back(c);
      const double h = knots[i + 1] - knots[i];
      double v = 0;
      for (std::size_t j = c.size(); j-- > 0;) v = v * h + c[j];
      acc = v;
    }
    F.right_value = acc;
    return F;
  }

  /// Convolution with the indicator of [a, b]: F(x - a) - F(x - b).
  Piecewise convolve_box(double a, double b) const {
    const Piecewise F = antiderivative();
    std::vector<double> nk;
    for (double k : knots) {
      nk.push_back(k + a);
      nk.push_back(k + b);
    }
    std::sort(nk.begin(), nk.end());
    nk.erase(std::unique(nk.begin(), nk.end()), nk.end());
    Piecewise out;
    out.knots = nk;
    const std::size_t deg = F.coeffs.empty() ? 1 : F.coeffs.front().size();
    for (std::size_t i = 0; i + 1 < nk.size(); ++i) {
      const double s = nk[i];
      const double mid = 0.5 * (nk[i] + nk[i + 1]);
      std::vector<double> c(deg, 0.0);
      F.add_shifted(c, s - a, mid - a, 1.0);
      F.add_shifted(c, s - b, mid - b, -1.0);
      out.coeffs.push_back(std::move(c));
    }
    out.right_value = 0.0;
    return out;
  }

  double lo() const { return knots.front(); }
  double hi() const { return knots.back(); }

 private:
  /// Adds sign * (polynomial of the piece containing `probe`) re-expanded
  /// around y0 into c (so that c describes a polynomial in (y - y0)).
  void add_shifted(std::vector<double>& c, double y0, double probe, double sign) const {
    if (knots.empty() || probe < knots.front()) return;
    if (probe >= knots.back()) {
      c[0] += sign * right_value;
      return;
    }
    auto it = std::upper_bound(knots.begin(), knots.end(), probe);
    std::size_t i = static_cast<std::size_t>(it - knots.begin()) - 1;
    const auto& p = coeffs[i];
    const double d = y0 - knots[i];
    // p(u) with u = (y - y0) + d: binomial re-expansion.
    for (std::size_t j = 0; j < p.size(); ++j) {
      double cb = 1.0;  // C(j, r)
      for (std::size_t r = 0; r <= j; ++r) {
        if (r > 0) cb = cb * static_cast<double>(j - r + 1) / static_cast<double>(r);
        c[r] += sign * p[j] * cb * std::pow(d, static_cast<double>(j - r));
      }
    }
  }
};

}  // namespace meyer::detail
