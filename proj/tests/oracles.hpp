#pragma once

// Independent reference computations used by the tests. Everything here is
// deliberately naive: brute-force loops and plain quadrature.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <vector>

namespace oracle {

using Complex = std::complex<double>;

/// Composite Simpson rule on [a, b] with n (even) panels.
inline Complex simpson(const std::function<Complex(double)>& f, double a, double b, int n = 20000) {
  if (n % 2) ++n;
  const double h = (b - a) / n;
  Complex s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * (h / 3.0);
}

/// Composite 5-point Gauss-Legendre between breakpoints (integrand smooth
/// between them). Open rule, so values exactly at a jump never enter.
inline Complex simpson_pieces(const std::function<Complex(double)>& f, std::vector<double> knots, int per = 200) {
  static const double xg[5] = {-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831,
                               0.9061798459386640};
  static const double wg[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889, 0.4786286704993665,
                               0.2369268850561891};
  Complex s = 0;
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    if (!(knots[i + 1] > knots[i])) continue;
    const double h = (knots[i + 1] - knots[i]) / per;
    for (int j = 0; j < per; ++j) {
      const double c = knots[i] + (j + 0.5) * h;
      for (int q = 0; q < 5; ++q) s += wg[q] * 0.5 * h * f(c + 0.5 * h * xg[q]);
    }
  }
  return s;
}

/// Fibonacci model set by a plain double loop over (a, b) with |a + b tau| <= R.
inline std::vector<double> fibonacci_model_set(double lo, double hi, double R) {
  const double tau = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<double> out;
  const long long B = static_cast<long long>(R + 10);
  for (long long b = -B; b <= B; ++b)
    for (long long a = -3 * B; a <= 3 * B; ++a) {
      const double x = a + b * tau;
      const double s = a + b * (1.0 - tau);
      if (std::abs(x) <= R && s >= lo - 1e-12 && s <= hi + 1e-12) out.push_back(x);
    }
  std::sort(out.begin(), out.end());
  return out;
}

/// |(1/#) sum_x w(x) e^{-2 pi i k x}|^2 scaled as a periodogram with 1/(2R).
inline double periodogram(const std::vector<double>& xs, const std::vector<double>& w, double k, double R) {
  Complex s = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double ph = -2 * std::numbers::pi * k * xs[i];
    s += w[i] * Complex(std::cos(ph), std::sin(ph));
  }
  return std::norm(s) / (2 * R);
}

/// Convolution of two functions on the line by Simpson quadrature.
inline double convolve_at(const std::function<double(double)>& f, const std::function<double(double)>& g, double x,
                          double lo, double hi, int n = 40000) {
  return simpson([&](double y) { return Complex(f(y) * g(x - y)); }, lo, hi, n).real();
}

/// 2x2 determinant.
inline double det2(double a, double b, double c, double d) { return a * d - b * c; }

}  // namespace oracle
