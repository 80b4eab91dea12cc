#pragma once

// Lattices in R^n x R^m x Z^z, cut-and-project schemes, their duals and
// model-set enumeration.
//
// Coordinates of a lattice vector are ordered (direct | internal real |
// internal discrete). The basis matrix stores generators as columns.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "meyer/detail/polytope_enum.hpp"
#include "meyer/error.hpp"

namespace meyer {

using Vector = std::vector<double>;

inline double norm(const Vector& v) {
  double s = 0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

inline double norm(const double* v, int n) {
  double s = 0;
  for (int i = 0; i < n; ++i) s += v[i] * v[i];
  return std::sqrt(s);
}

/// Volume of the Euclidean d-ball of radius r (V_0 = 1).
inline double ball_volume(int d, double r) {
  if (d == 0) return 1.0;
  if (r <= 0) return 0.0;
  return std::pow(std::numbers::pi, d / 2.0) / std::tgamma(d / 2.0 + 1.0) * std::pow(r, d);
}

struct Tolerances {
  double det = 1e-12;         // relative to the product of generator norms
  double integer = 1e-12;     // integrality of discrete coordinates
  double injectivity = 1e-9;  // direct-part norm treated as zero
  double density_delta = 0.05;
  double density_reference = 1.0;  // half-width of the internal reference box
};

class Lattice {
 public:
  /// Validates and wraps a basis. When `torus_discrete` is set the last z
  /// coordinates are real (dual lattice on T^z) and integrality is not checked.
  static Lattice create(int n, int m, int z, Eigen::MatrixXd basis, bool torus_discrete = false,
                        const Tolerances& tol = {}) {
    const int N = n + m + z;
    if (n < 1 || m < 0 || z < 0)
      throw Error(ErrorCode::InvalidArgument, "dimensions must satisfy n >= 1, m >= 0, z >= 0");
    if (basis.rows() != N || basis.cols() != N)
      throw Error(ErrorCode::InvalidArgument, "basis must be a square matrix of size n+m+z");
    if (!basis.allFinite()) throw Error(ErrorCode::InvalidArgument, "basis has non-finite entries");
    double scale = 1.0;
    for (int j = 0; j < N; ++j) scale *= std::max(basis.col(j).norm(), 1e-300);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(basis);
    const double det = lu.determinant();
    if (!(std::abs(det) > tol.det * scale))
      throw Error(ErrorCode::DegenerateBasis,
                  "|det(basis)| = " + std::to_string(std::abs(det)) + " is below tolerance");
    if (!torus_discrete) {
      for (int j = 0; j < N; ++j) {
        for (int i = n + m; i < N; ++i) {
          const double v = basis(i, j);
          if (std::abs(v - std::round(v)) > tol.integer)
            throw Error(ErrorCode::NonIntegerDiscreteCoordinates,
                        "generator " + std::to_string(j) + " has non-integer discrete coordinate " +
                            std::to_string(v));
          basis(i, j) = std::round(v);
        }
      }
    }
    Lattice l;
    l.n_ = n;
    l.m_ = m;
    l.z_ = z;
    l.torus_ = torus_discrete;
    l.basis_ = std::move(basis);
    l.inverse_ = lu.inverse();
    l.covolume_ = std::abs(det);
    return l;
  }

  int n() const { return n_; }
  int m() const { return m_; }
  int z() const { return z_; }
  int dim() const { return n_ + m_ + z_; }
  bool torus_discrete() const { return torus_; }
  const Eigen::MatrixXd& basis() const { return basis_; }
  const Eigen::MatrixXd& inverse() const { return inverse_; }
  double covolume() const { return covolume_; }
  double density() const { return 1.0 / covolume_; }

  Vector point(const std::vector<long long>& coeffs) const {
    Vector v(dim(), 0.0);
    for (int i = 0; i < dim(); ++i)
      for (int j = 0; j < dim(); ++j) v[i] += basis_(i, j) * static_cast<double>(coeffs[j]);
    return v;
  }

  /// Visits every lattice vector v with lo <= v <= hi (coordinatewise, with a
  /// small slack). visit receives a pointer to dim() doubles.
  template <class Visitor>
  void for_each_in_box(const Vector& lo, const Vector& hi, Visitor&& visit,
                       std::size_t cap = detail::default_enumeration_cap()) const {
    double vol = 1.0;
    for (int i = 0; i < dim(); ++i) vol *= std::max(hi[i] - lo[i], 0.0) + 1e-300;
    const double predicted = vol / covolume_;
    if (predicted > static_cast<double>(cap))
      throw Error(ErrorCode::EnumerationBudgetExceeded,
                  "predicted " + std::to_string(predicted) + " points exceeds cap " + std::to_string(cap));
    detail::BoxEnumerator en(basis_, lo, hi);
    const int N = dim();
    std::vector<double> v(N);
    en.run(
        [&](const std::vector<long long>& c) {
          for (int i = 0; i < N; ++i) {
            double s = 0;
            for (int j = 0; j < N; ++j) s += basis_(i, j) * static_cast<double>(c[j]);
            v[i] = s;
          }
          for (int i = 0; i < N; ++i) {
            const double slack = 1e-9 * (1.0 + std::abs(v[i]));
            if (v[i] < lo[i] - slack || v[i] > hi[i] + slack) return;
          }
          visit(static_cast<const double*>(v.data()));
        },
        4 * cap + 1000);
  }

 private:
  int n_ = 1, m_ = 0, z_ = 0;
  bool torus_ = false;
  Eigen::MatrixXd basis_, inverse_;
  double covolume_ = 1.0;
};

/// Cut-and-project scheme G = R^n, H = R^m x Z^z; projections are implicit.
struct EuclideanCPS {
  Lattice lattice;

  int n() const { return lattice.n(); }
  int m() const { return lattice.m(); }
  int z() const { return lattice.z(); }
  int internal_dim() const { return lattice.m() + lattice.z(); }
  double density() const { return lattice.density(); }
};

struct DualCPS {
  Lattice lattice;  // discrete-dual coordinates live on T^z
  double parent_covolume = 1.0;

  int n() const { return lattice.n(); }
  int m() const { return lattice.m(); }
  int z() const { return lattice.z(); }
};

inline EuclideanCPS make_cps(int n, int m, int z, const Eigen::MatrixXd& basis, const Tolerances& tol = {}) {
  return EuclideanCPS{Lattice::create(n, m, z, basis, false, tol)};
}

/// The standard Fibonacci scheme with generators (1,1) and (tau, 1-tau).
inline EuclideanCPS fibonacci_cps() {
  const double tau = std::numbers::phi;
  Eigen::MatrixXd b(2, 2);
  b << 1.0, tau, 1.0, 1.0 - tau;
  return make_cps(1, 1, 0, b);
}

/// Z^2 viewed as a (degenerate) scheme with one direct and one internal axis.
inline EuclideanCPS integer_square_cps() {
  return make_cps(1, 1, 0, Eigen::MatrixXd::Identity(2, 2));
}

struct Box {
  Vector lo, hi;

  int dim() const { return static_cast<int>(lo.size()); }
  double volume() const {
    double v = 1.0;
    for (int i = 0; i < dim(); ++i) v *= hi[i] - lo[i];
    return v;
  }
  double diameter() const {
    double s = 0;
    for (int i = 0; i < dim(); ++i) s += (hi[i] - lo[i]) * (hi[i] - lo[i]);
    return std::sqrt(s);
  }
  bool contains(const double* v, double slack = 1e-12) const {
    for (int i = 0; i < dim(); ++i)
      if (v[i] < lo[i] - slack || v[i] > hi[i] + slack) return false;
    return true;
  }
  Box translated(const Vector& t) const {
    Box b = *this;
    for (int i = 0; i < dim(); ++i) {
      b.lo[i] += t[i];
      b.hi[i] += t[i];
    }
    return b;
  }
  double distance(const double* v) const {
    double s = 0;
    for (int i = 0; i < dim(); ++i) {
      double d = std::max({lo[i] - v[i], 0.0, v[i] - hi[i]});
      s += d * d;
    }
    return std::sqrt(s);
  }
};

inline Box interval(double a, double b) { return Box{{a}, {b}}; }

/// Compact window in R^m x Z^z: a union of boxes times a finite set F.
struct Window {
  std::vector<Box> boxes;                         // real factor (empty when m = 0)
  std::vector<std::vector<long long>> discrete;   // finite F (empty when z = 0)
  double margin = 0.0;

  void validate(int m, int z) const {
    if (m > 0 && boxes.empty()) throw Error(ErrorCode::InvalidArgument, "window needs at least one box");
    for (const auto& b : boxes) {
      if (b.dim() != m || static_cast<int>(b.hi.size()) != m)
        throw Error(ErrorCode::InvalidArgument, "window box dimension mismatch");
      for (int i = 0; i < m; ++i)
        if (!(b.hi[i] > b.lo[i])) throw Error(ErrorCode::InvalidArgument, "window box has zero volume");
    }
    if (z > 0 && discrete.empty()) throw Error(ErrorCode::InvalidArgument, "discrete window F is empty");
    for (const auto& f : discrete)
      if (static_cast<int>(f.size()) != z) throw Error(ErrorCode::InvalidArgument, "discrete point dimension mismatch");
    if (margin < 0) throw Error(ErrorCode::InvalidArgument, "negative window margin");
  }

  Box real_bounds(int m) const {
    Box r{Vector(m, HUGE_VAL), Vector(m, -HUGE_VAL)};
    for (const auto& b : boxes)
      for (int i = 0; i < m; ++i) {
        r.lo[i] = std::min(r.lo[i], b.lo[i]);
        r.hi[i] = std::max(r.hi[i], b.hi[i]);
      }
    return r;
  }

  bool contains(const double* star, int m, int z, double slack = 1e-12) const {
    if (m > 0) {
      bool in = false;
      for (const auto& b : boxes)
        if (b.contains(star, slack)) {
          in = true;
          break;
        }
      if (!in) return false;
    }
    if (z > 0) {
      for (const auto& f : discrete) {
        bool eq = true;
        for (int i = 0; i < z; ++i)
          if (std::llround(star[m + i]) != f[i]) {
            eq = false;
            break;
          }
        if (eq) return true;
      }
      return false;
    }
    return true;
  }

  /// Euclidean distance from a point of the real factor to the window.
  double real_distance(const double* y) const {
    double d = HUGE_VAL;
    for (const auto& b : boxes) d = std::min(d, b.distance(y));
    return d;
  }
};

inline Window interval_window(double a, double b) { return Window{{interval(a, b)}, {}, 0.0}; }

struct ProjectedPoint {
  Vector x;     // direct part
  Vector star;  // internal part (m reals, then z discrete / torus coordinates)

  friend bool operator<(const ProjectedPoint& a, const ProjectedPoint& b) {
    if (a.x != b.x) return a.x < b.x;
    return a.star < b.star;
  }
};

struct ValidationReport {
  double covolume = 0;
  bool injective = false;
  double min_direct_norm = HUGE_VAL;  // smallest direct norm among nonzero witnesses
  bool dense = false;
  double delta_achieved = HUGE_VAL;
  double r_check = 0;
  bool ok() const { return injective && dense; }
};

namespace detail {

inline Vector region_lo(int n, const Box& real, const std::vector<std::pair<long long, long long>>& disc,
                        double R) {
  Vector lo;
  for (int i = 0; i < n; ++i) lo.push_back(-R);
  for (double v : real.lo) lo.push_back(v);
  for (const auto& p : disc) lo.push_back(static_cast<double>(p.first) - 0.5);
  return lo;
}

inline Vector region_hi(int n, const Box& real, const std::vector<std::pair<long long, long long>>& disc,
                        double R) {
  Vector hi;
  for (int i = 0; i < n; ++i) hi.push_back(R);
  for (double v : real.hi) hi.push_back(v);
  for (const auto& p : disc) hi.push_back(static_cast<double>(p.second) + 0.5);
  return hi;
}

}  // namespace detail

/// Lattice points with |x| <= R and x* in the window, sorted lexicographically.
inline std::vector<ProjectedPoint> enumerate_model_set(const EuclideanCPS& cps, const Window& window, double R,
                                                       std::size_t cap = detail::default_enumeration_cap()) {
  const int n = cps.n(), m = cps.m(), z = cps.z();
  window.validate(m, z);
  if (!(R >= 0)) throw Error(ErrorCode::InvalidArgument, "radius must be non-negative");
  const Box real = window.real_bounds(m);
  std::vector<std::pair<long long, long long>> disc(z, {0, 0});
  for (int i = 0; i < z; ++i) {
    long long lo = window.discrete.front()[i], hi = lo;
    for (const auto& f : window.discrete) {
      lo = std::min(lo, f[i]);
      hi = std::max(hi, f[i]);
    }
    disc[i] = {lo, hi};
  }
  std::vector<ProjectedPoint> out;
  const double r2 = R * R * (1.0 + 1e-14) + 1e-28;
  cps.lattice.for_each_in_box(
      detail::region_lo(n, real, disc, R), detail::region_hi(n, real, disc, R),
      [&](const double* v) {
        double s = 0;
        for (int i = 0; i < n; ++i) s += v[i] * v[i];
        if (s > r2) return;
        if (!window.contains(v + n, m, z)) return;
        ProjectedPoint p{Vector(v, v + n), Vector(v + n, v + n + m + z)};
        for (int i = m; i < m + z; ++i) p.star[i] = std::round(p.star[i]);
        out.push_back(std::move(p));
      },
      cap);
  std::sort(out.begin(), out.end());
  return out;
}

/// Dual CPS: inverse-transpose basis, discrete-dual coordinates on T^z.
inline DualCPS dual_cps(const EuclideanCPS& cps) {
  const auto& l = cps.lattice;
  Eigen::MatrixXd dual = l.inverse().transpose();
  return DualCPS{Lattice::create(l.n(), l.m(), l.z(), dual, true), l.covolume()};
}

/// Inverse operation of dual_cps: recovers a primal scheme from a dual one.
inline EuclideanCPS dual_of_dual(const DualCPS& dual) {
  const auto& l = dual.lattice;
  Eigen::MatrixXd primal = l.inverse().transpose();
  return EuclideanCPS{Lattice::create(l.n(), l.m(), l.z(), primal, false)};
}

/// Reduces a torus coordinate to [0,1), snapping values within 1e-9 of an integer.
inline double reduce_mod1(double v) {
  const double r = std::round(v);
  if (std::abs(v - r) < 1e-9) return 0.0;
  return v - std::floor(v);
}

/// Visits dual lattice points with |k|_inf <= K_max, |k*_real|_inf <= internal_max
/// and torus coordinates in [0,1). visit(const double* v) gets the full vector.
template <class Visitor>
void for_each_dual_point(const DualCPS& dual, double K_max, double internal_max, Visitor&& visit,
                         std::size_t cap = detail::default_enumeration_cap()) {
  const int n = dual.n(), m = dual.m(), z = dual.z();
  Vector lo, hi;
  for (int i = 0; i < n; ++i) {
    lo.push_back(-K_max);
    hi.push_back(K_max);
  }
  for (int i = 0; i < m; ++i) {
    lo.push_back(-internal_max);
    hi.push_back(internal_max);
  }
  for (int i = 0; i < z; ++i) {
    lo.push_back(-1e-9);
    hi.push_back(1.0 - 1e-9);
  }
  // the box search is slightly inclusive; keep one representative per torus class
  dual.lattice.for_each_in_box(
      lo, hi,
      [&](const double* v) {
        for (int i = n + m; i < n + m + z; ++i)
          if (v[i] < -1e-9 || v[i] >= 1.0 - 1e-9) return;
        visit(v);
      },
      cap);
}

/// Dual points with |k| <= K_max (Euclidean) and |k*_real| <= internal_max
/// (defaults to K_max); torus coordinates reduced mod 1; sorted.
inline std::vector<ProjectedPoint> enumerate_dual_points(const DualCPS& dual, double K_max,
                                                         std::optional<double> internal_max = std::nullopt,
                                                         std::size_t cap = detail::default_enumeration_cap()) {
  if (!(K_max > 0)) throw Error(ErrorCode::InvalidArgument, "K_max must be positive");
  const int n = dual.n(), m = dual.m(), z = dual.z();
  const double I = internal_max.value_or(K_max);
  std::vector<ProjectedPoint> out;
  const double k2 = K_max * K_max * (1.0 + 1e-14);
  const double i2 = I * I * (1.0 + 1e-14);
  for_each_dual_point(
      dual, K_max, I,
      [&](const double* v) {
        double s = 0, t = 0;
        for (int i = 0; i < n; ++i) s += v[i] * v[i];
        for (int i = 0; i < m; ++i) t += v[n + i] * v[n + i];
        if (s > k2 || t > i2) return;
        ProjectedPoint p{Vector(v, v + n), Vector(v + n, v + n + m + z)};
        for (int i = m; i < m + z; ++i) p.star[i] = reduce_mod1(p.star[i]);
        out.push_back(std::move(p));
      },
      cap);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end(),
                        [](const ProjectedPoint& a, const ProjectedPoint& b) { return a.x == b.x && a.star == b.star; }),
            out.end());
  return out;
}

/// Largest deviation from integrality of <u, v> over primal/dual basis pairs.
inline double pairing_integrality_residual(const Lattice& primal, const Lattice& dual) {
  Eigen::MatrixXd p = primal.basis().transpose() * dual.basis();
  double worst = 0;
  for (int i = 0; i < p.rows(); ++i)
    for (int j = 0; j < p.cols(); ++j) worst = std::max(worst, std::abs(p(i, j) - std::round(p(i, j))));
  return worst;
}

/// Change-of-basis matrix between two bases of (supposedly) the same lattice.
inline Eigen::MatrixXd change_of_basis(const Lattice& a, const Lattice& b) { return a.inverse() * b.basis(); }

inline ValidationReport validate_cps(const EuclideanCPS& cps, double R_check = -1, const Tolerances& tol = {},
                                     std::size_t cap = detail::default_enumeration_cap()) {
  const auto& l = cps.lattice;
  const int n = l.n(), m = l.m(), z = l.z(), N = l.dim();
  ValidationReport rep;
  rep.covolume = l.covolume();
  if (!(R_check > 0)) R_check = 50.0 * std::pow(l.covolume(), 1.0 / N);
  rep.r_check = R_check;

  // Injectivity witness: nonzero vectors whose direct part is (numerically) zero.
  {
    Vector lo(N, -R_check), hi(N, R_check);
    for (int i = 0; i < n; ++i) {
      lo[i] = -tol.injectivity;
      hi[i] = tol.injectivity;
    }
    bool found = false;
    l.for_each_in_box(
        lo, hi,
        [&](const double* v) {
          double full = norm(v, N);
          if (full < 1e-12) return;
          found = true;
          rep.min_direct_norm = std::min(rep.min_direct_norm, norm(v, n));
        },
        cap);
    rep.injective = !found;
  }

  // Density witness over the internal reference box.
  {
    const double ref = tol.density_reference;
    const double d = tol.density_delta;
    Vector lo, hi;
    for (int i = 0; i < n; ++i) {
      lo.push_back(-R_check);
      hi.push_back(R_check);
    }
    for (int i = 0; i < m; ++i) {
      lo.push_back(-ref - d);
      hi.push_back(ref + d);
    }
    const long long zr = static_cast<long long>(std::floor(ref));
    for (int i = 0; i < z; ++i) {
      lo.push_back(static_cast<double>(-zr) - 0.5);
      hi.push_back(static_cast<double>(zr) + 0.5);
    }
    // group stars by discrete part
    std::vector<std::pair<std::vector<long long>, Vector>> stars;
    l.for_each_in_box(
        lo, hi,
        [&](const double* v) {
          if (norm(v, n) > R_check) return;
          std::vector<long long> key(z);
          for (int i = 0; i < z; ++i) key[i] = std::llround(v[n + m + i]);
          stars.emplace_back(std::move(key), Vector(v + n, v + n + m));
        },
        cap);
    std::vector<std::vector<long long>> keys;
    {
      std::vector<long long> k(z, -zr);
      if (z == 0) {
        keys.push_back({});
      } else {
        for (;;) {
          keys.push_back(k);
          int i = 0;
          while (i < z && ++k[i] > zr) k[i++] = -zr;
          if (i == z) break;
        }
      }
    }
    double worst = 0;
    for (const auto& key : keys) {
      std::vector<Vector> pts;
      for (const auto& s : stars)
        if (s.first == key) pts.push_back(s.second);
      if (pts.empty()) {
        worst = HUGE_VAL;
        break;
      }
      if (m == 0) continue;
      if (m == 1) {
        Vector xs;
        for (const auto& p : pts) xs.push_back(p[0]);
        std::sort(xs.begin(), xs.end());
        double w = std::max(xs.front() - (-ref), ref - xs.back());
        for (std::size_t i = 1; i < xs.size(); ++i) w = std::max(w, 0.5 * (xs[i] - xs[i - 1]));
        worst = std::max(worst, w);
      } else {
        const double step = d / 2;
        const int cells = static_cast<int>(std::ceil(2 * ref / step));
        std::vector<int> idx(m, 0);
        for (;;) {
          double best = HUGE_VAL;
          for (const auto& p : pts) {
            double s = 0;
            for (int i = 0; i < m; ++i) {
              double g = -ref + idx[i] * (2 * ref / cells);
              s += (p[i] - g) * (p[i] - g);
            }
            best = std::min(best, s);
          }
          worst = std::max(worst, std::sqrt(best));
          int i = 0;
          while (i < m && ++idx[i] > cells) idx[i++] = 0;
          if (i == m) break;
        }
      }
    }
    rep.delta_achieved = worst;
    rep.dense = worst <= d;
  }
  return rep;
}

}  // namespace meyer
