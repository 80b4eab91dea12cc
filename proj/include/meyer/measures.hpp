#pragma once

// Atomic measures on R^n with a record of where they are complete, the
// sliding-window norms ||mu||_K, and finite mixed measures (point masses,
// B-spline densities, Cantor-type components) with closed-form transforms.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "meyer/detail/quadrature.hpp"
#include "meyer/error.hpp"
#include "meyer/lattice_cps.hpp"
#include "meyer/weights.hpp"

namespace meyer {

inline constexpr double kMergeGap = 1e-9;

struct Atom {
  Vector x;
  Complex w;
};

/// Ball inside which a measure is known to be complete.
struct SafeBall {
  Vector center;
  double radius = 0;
};

class AtomicMeasure {
 public:
  AtomicMeasure() = default;

  /// Atoms complete within |x| <= truncation_radius.
  AtomicMeasure(int n, std::vector<Atom> atoms, double truncation_radius)
      : AtomicMeasure(n, std::move(atoms), std::vector<SafeBall>{SafeBall{Vector(n, 0.0), truncation_radius}}) {
    for (const auto& a : atoms_)
      if (norm(a.x) > truncation_radius * (1 + 1e-12) + kMergeGap)
        throw Error(ErrorCode::InvalidArgument, "atom lies outside the truncation radius");
  }

  AtomicMeasure(int n, std::vector<Atom> atoms, std::vector<SafeBall> regions)
      : n_(n), regions_(std::move(regions)) {
    for (const auto& a : atoms)
      if (static_cast<int>(a.x.size()) != n_) throw Error(ErrorCode::InvalidArgument, "atom dimension mismatch");
    atoms_ = merge(std::move(atoms));
  }

  int n() const { return n_; }
  const std::vector<Atom>& atoms() const { return atoms_; }
  const std::vector<SafeBall>& regions() const { return regions_; }
  std::size_t size() const { return atoms_.size(); }

  /// Radius of the smallest completeness ball.
  double truncation_radius() const {
    double r = HUGE_VAL;
    for (const auto& b : regions_) r = std::min(r, b.radius);
    return r;
  }

  bool region_contains(const double* p, double slack = 1e-12) const {
    for (const auto& b : regions_) {
      double s = 0;
      for (int i = 0; i < n_; ++i) s += (p[i] - b.center[i]) * (p[i] - b.center[i]);
      if (std::sqrt(s) > b.radius + slack) return false;
    }
    return true;
  }

  /// True when every corner of the box lies in the completeness region.
  bool region_contains_box(const Box& box, double slack = 1e-12) const {
    Vector c(n_);
    for (unsigned mask = 0; mask < (1u << n_); ++mask) {
      for (int i = 0; i < n_; ++i) c[i] = (mask >> i) & 1u ? box.hi[i] : box.lo[i];
      if (!region_contains(c.data(), slack)) return false;
    }
    return true;
  }

  /// Weight of the atom at x (0 when there is none within the merge gap).
  Complex at(const Vector& x) const {
    auto it = std::lower_bound(atoms_.begin(), atoms_.end(), x[0] - kMergeGap,
                               [](const Atom& a, double v) { return a.x[0] < v; });
    for (; it != atoms_.end() && it->x[0] <= x[0] + kMergeGap; ++it) {
      double s = 0;
      for (int i = 0; i < n_; ++i) s += (it->x[i] - x[i]) * (it->x[i] - x[i]);
      if (std::sqrt(s) <= kMergeGap) return it->w;
    }
    return 0.0;
  }

  double total_variation() const {
    double s = 0;
    for (const auto& a : atoms_) s += std::abs(a.w);
    return s;
  }

  /// |mu|(B) for a closed box.
  double variation_in(const Box& box) const {
    double s = 0;
    for (const auto& a : atoms_)
      if (box.contains(a.x.data(), 1e-12)) s += std::abs(a.w);
    return s;
  }

  Complex mass_in(const Box& box) const {
    Complex s = 0;
    for (const auto& a : atoms_)
      if (box.contains(a.x.data(), 1e-12)) s += a.w;
    return s;
  }

  /// T_t mu: every atom and completeness ball moved by t.
  AtomicMeasure translated(const Vector& t) const {
    AtomicMeasure r = *this;
    for (auto& a : r.atoms_)
      for (int i = 0; i < n_; ++i) a.x[i] += t[i];
    for (auto& b : r.regions_)
      for (int i = 0; i < n_; ++i) b.center[i] += t[i];
    return r;
  }

  AtomicMeasure scaled(Complex c) const {
    AtomicMeasure r = *this;
    for (auto& a : r.atoms_) a.w *= c;
    return r;
  }

  /// Restriction to atoms satisfying pred (completeness region unchanged).
  AtomicMeasure filtered(const std::function<bool(const Atom&)>& pred) const {
    std::vector<Atom> kept;
    for (const auto& a : atoms_)
      if (pred(a)) kept.push_back(a);
    return AtomicMeasure(n_, std::move(kept), regions_);
  }

  friend AtomicMeasure operator+(const AtomicMeasure& a, const AtomicMeasure& b) {
    if (a.n_ != b.n_) throw Error(ErrorCode::InvalidArgument, "measure dimension mismatch");
    auto atoms = a.atoms_;
    atoms.insert(atoms.end(), b.atoms_.begin(), b.atoms_.end());
    auto regions = a.regions_;
    regions.insert(regions.end(), b.regions_.begin(), b.regions_.end());
    return AtomicMeasure(a.n_, std::move(atoms), std::move(regions));
  }
  friend AtomicMeasure operator-(const AtomicMeasure& a, const AtomicMeasure& b) { return a + b.scaled(-1.0); }

  std::string provenance;

 private:
  int n_ = 1;
  std::vector<Atom> atoms_;
  std::vector<SafeBall> regions_;

  static bool lex_less(const Atom& a, const Atom& b) { return a.x < b.x; }

  static std::vector<Atom> merge(std::vector<Atom> atoms) {
    std::sort(atoms.begin(), atoms.end(), lex_less);
    std::vector<Atom> out;
    out.reserve(atoms.size());
    for (auto& a : atoms) {
      bool merged = false;
      for (std::size_t j = out.size(); j-- > 0;) {
        if (out[j].x[0] < a.x[0] - kMergeGap) break;
        double s = 0;
        for (std::size_t i = 0; i < a.x.size(); ++i) s += (out[j].x[i] - a.x[i]) * (out[j].x[i] - a.x[i]);
        if (std::sqrt(s) <= kMergeGap) {
          out[j].w += a.w;
          merged = true;
          break;
        }
      }
      if (!merged) out.push_back(std::move(a));
    }
    return out;
  }
};

struct KNormResult {
  double value = 0;
  Vector t;  // maximising translate
};

namespace detail {

class KNormSweep {
 public:
  using SafePredicate = std::function<bool(const Box&)>;

  KNormSweep(const AtomicMeasure& mu, const Box& K, SafePredicate safe = {})
      : mu_(mu), K_(K), n_(mu.n()), safe_(std::move(safe)) {
    best_.t = Vector(n_, 0.0);
    for (const auto& b : mu.regions())
      if (mu.region_contains(b.center.data())) {
        // centre of K at the centre of a completeness ball
        for (int i = 0; i < n_; ++i) best_.t[i] = b.center[i] - 0.5 * (K.lo[i] + K.hi[i]);
        break;
      }
  }

  KNormResult run() {
    std::vector<int> all(mu_.size());
    std::iota(all.begin(), all.end(), 0);
    Vector t(n_, 0.0);
    recurse(0, all, t);
    return best_;
  }

 private:
  const AtomicMeasure& mu_;
  const Box& K_;
  int n_;
  SafePredicate safe_;
  KNormResult best_;

  double coord(int a, int d) const { return mu_.atoms()[a].x[d]; }

  std::vector<double> candidates(const std::vector<int>& idx, int d) const {
    std::vector<double> c;
    c.reserve(2 * idx.size());
    for (int a : idx) {
      c.push_back(coord(a, d) - K_.lo[d]);  // left edge on the atom
      c.push_back(coord(a, d) - K_.hi[d]);  // right edge on the atom
    }
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
    return c;
  }

  bool safe(const Vector& t) const {
    const Box B = K_.translated(t);
    return safe_ ? safe_(B) : mu_.region_contains_box(B);
  }

  void recurse(int d, std::vector<int> idx, Vector& t) {
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return coord(a, d) < coord(b, d); });
    std::vector<double> xs(idx.size()), prefix(idx.size() + 1, 0.0);
    for (std::size_t i = 0; i < idx.size(); ++i) {
      xs[i] = coord(idx[i], d);
      prefix[i + 1] = prefix[i] + std::abs(mu_.atoms()[idx[i]].w);
    }
    for (double td : candidates(idx, d)) {
      const double a = td + K_.lo[d], b = td + K_.hi[d];
      const double slack = 1e-12 * (1.0 + std::abs(a) + std::abs(b));
      const auto lo = std::lower_bound(xs.begin(), xs.end(), a - slack) - xs.begin();
      const auto hi = std::upper_bound(xs.begin(), xs.end(), b + slack) - xs.begin();
      if (hi <= lo) continue;
      t[d] = td;
      if (d + 1 == n_) {
        const double v = prefix[hi] - prefix[lo];
        if (v > best_.value && safe(t)) {
          best_.value = v;
          best_.t = t;
        }
      } else {
        if (prefix[hi] - prefix[lo] <= best_.value) continue;
        recurse(d + 1, std::vector<int>(idx.begin() + lo, idx.begin() + hi), t);
      }
    }
  }
};

}  // namespace detail

/// sup_t |mu|(t + K) over closed translates lying in the completeness region.
inline KNormResult k_norm_argmax(const AtomicMeasure& mu, const Box& K) {
  if (K.dim() != mu.n()) throw Error(ErrorCode::InvalidArgument, "K has wrong dimension");
  for (int i = 0; i < K.dim(); ++i)
    if (!(K.hi[i] > K.lo[i])) throw Error(ErrorCode::InvalidArgument, "K must have positive side lengths");
  if (K.diameter() >= mu.truncation_radius())
    throw Error(ErrorCode::WindowTooLarge, "diam(K) is not below the truncation radius");
  return detail::KNormSweep(mu, K).run();
}

inline double k_norm(const AtomicMeasure& mu, const Box& K) { return k_norm_argmax(mu, K).value; }

/// ||mu - nu||_K with atoms at (numerically) equal positions merged first.
inline double norm_distance(const AtomicMeasure& mu, const AtomicMeasure& nu, const Box& K) {
  return k_norm(mu - nu, K);
}

// ---------------------------------------------------------------------------
// Finite mixed measures

/// Cantor-type measure: the self-similar probability measure on [0,1] with
/// maps x -> r x and x -> r x + (1 - r), pushed forward by y -> shift + scale y
/// and multiplied by `mass`.
struct CantorComponent {
  double ratio = 1.0 / 3.0;
  Complex mass{1.0, 0.0};
  double scale = 1.0;
  double shift = 0.0;

  void validate() const {
    if (!(ratio > 0 && ratio <= 0.5)) throw Error(ErrorCode::InvalidArgument, "Cantor ratio must lie in (0, 1/2]");
    if (!(scale > 0)) throw Error(ErrorCode::InvalidArgument, "Cantor scale must be positive");
  }
  double lo() const { return shift; }
  double hi() const { return shift + scale; }
};

/// Number of cosine factors needed so the dropped tail changes the product by < tol.
inline int cantor_factor_count(double r, double xi, double tol = 1e-10) {
  const double a = kPi * (1 - r) * std::abs(xi);
  int J = 0;
  double rj = 1.0;  // r^J
  while (a * a * rj * rj / (2 * (1 - r * r)) >= tol && J < 2000) {
    ++J;
    rj *= r;
  }
  return J;
}

/// \int e^{2 pi i xi x} dc_r(x) for the unit Cantor measure, truncated so the
/// error is below 1e-10.
inline Complex cantor_transform(double r, double xi) {
  const int J = cantor_factor_count(r, xi);
  double p = 1.0, rj = 1.0;
  for (int j = 1; j <= J; ++j) {
    p *= std::cos(kPi * (1 - r) * rj * xi);
    rj *= r;
  }
  return std::polar(p, kPi * xi);
}

/// Distribution function of the unit Cantor measure.
inline double cantor_cdf(double r, double u) {
  double acc = 0.0, w = 1.0;
  for (int depth = 0; depth < 200 && w > 1e-18; ++depth) {
    if (u <= 0) return acc;
    if (u >= 1) return acc + w;
    if (u <= r) {
      u /= r;
    } else if (u >= 1 - r) {
      acc += 0.5 * w;
      u = (u - (1 - r)) / r;
    } else {
      return acc + 0.5 * w;
    }
    w *= 0.5;
  }
  return acc;
}

struct PointMass {
  Vector x;
  Complex mass;
};

/// coeff * chain(x): an absolutely continuous part in dimension 1.
struct AcComponent {
  Complex coeff{1.0, 0.0};
  BoxChain density;
};

class FiniteMixedMeasure {
 public:
  FiniteMixedMeasure() = default;
  FiniteMixedMeasure(int n, std::vector<PointMass> pp, std::vector<AcComponent> ac = {},
                     std::vector<CantorComponent> sc = {})
      : n_(n), pp_(std::move(pp)), ac_(std::move(ac)), sc_(std::move(sc)) {
    if (n_ < 1) throw Error(ErrorCode::InvalidArgument, "dimension must be positive");
    for (const auto& p : pp_)
      if (static_cast<int>(p.x.size()) != n_) throw Error(ErrorCode::InvalidArgument, "point mass dimension mismatch");
    if (n_ > 1 && (!ac_.empty() || !sc_.empty()))
      throw Error(ErrorCode::UnsupportedDimension, "continuous parts are implemented for n = 1 only");
    for (const auto& c : sc_) c.validate();
  }

  static FiniteMixedMeasure dirac(const Vector& x, Complex mass = 1.0) {
    return FiniteMixedMeasure(static_cast<int>(x.size()), {PointMass{x, mass}});
  }

  int n() const { return n_; }
  const std::vector<PointMass>& pp() const { return pp_; }
  const std::vector<AcComponent>& ac() const { return ac_; }
  const std::vector<CantorComponent>& sc() const { return sc_; }
  bool empty() const { return pp_.empty() && ac_.empty() && sc_.empty(); }

  FiniteMixedMeasure pp_part() const { return FiniteMixedMeasure(n_, pp_); }
  FiniteMixedMeasure ac_part() const { return FiniteMixedMeasure(n_, {}, ac_); }
  FiniteMixedMeasure sc_part() const { return FiniteMixedMeasure(n_, {}, {}, sc_); }

  double variation_pp() const {
    double s = 0;
    for (const auto& p : pp_) s += std::abs(p.mass);
    return s;
  }

  /// \int |sum_j c_j chain_j|. Exact when the coefficients share a phase
  /// (the chains are non-negative); otherwise Gauss-Legendre on the pieces.
  double variation_ac() const {
    if (ac_.empty()) return 0.0;
    bool common_phase = true;
    const Complex ref = ac_.front().coeff / std::abs(ac_.front().coeff);
    for (const auto& a : ac_)
      if (std::abs(a.coeff) > 0 && std::abs(a.coeff / std::abs(a.coeff) - ref) > 1e-14) common_phase = false;
    if (common_phase) {
      double s = 0;
      for (const auto& a : ac_) s += std::abs(a.coeff) * a.density.integral();
      return s;
    }
    return ac_abs_integral(-HUGE_VAL, HUGE_VAL);
  }

  double variation_sc() const {
    double s = 0;
    for (const auto& c : sc_) s += std::abs(c.mass);
    return s;
  }

  double total_variation() const { return variation_pp() + variation_ac() + variation_sc(); }

  /// nu_check(x) = \int e^{+2 pi i k.x} d nu(k); same sign as the weight transform.
  Complex transform(const Vector& x) const {
    if (static_cast<int>(x.size()) != n_) throw Error(ErrorCode::InvalidArgument, "transform argument dimension");
    Complex s = 0;
    for (const auto& p : pp_) {
      double ph = 0;
      for (int i = 0; i < n_; ++i) ph += p.x[i] * x[i];
      s += p.mass * std::polar(1.0, 2 * kPi * ph);
    }
    for (const auto& a : ac_) s += a.coeff * a.density.transform(x[0]);
    for (const auto& c : sc_)
      s += c.mass * std::polar(1.0, 2 * kPi * c.shift * x[0]) * cantor_transform(c.ratio, c.scale * x[0]);
    return s;
  }
  Complex transform(double x) const { return transform(Vector{x}); }

  /// Largest |k| over the support.
  double support_radius() const {
    double r = 0;
    for (const auto& p : pp_) r = std::max(r, norm(p.x));
    for (const auto& a : ac_)
      r = std::max({r, std::abs(a.density.support_lo()), std::abs(a.density.support_hi())});
    for (const auto& c : sc_) r = std::max({r, std::abs(c.lo()), std::abs(c.hi())});
    return r;
  }

  /// nu([a, b]) for n = 1 (closed interval).
  Complex mass_in(double a, double b) const {
    Complex s = 0;
    for (const auto& p : pp_)
      if (p.x[0] >= a - 1e-12 && p.x[0] <= b + 1e-12) s += p.mass;
    for (const auto& c : ac_) s += c.coeff * (c.density.cumulative(b) - c.density.cumulative(a));
    for (const auto& c : sc_)
      s += c.mass * (cantor_cdf(c.ratio, (b - c.shift) / c.scale) - cantor_cdf(c.ratio, (a - c.shift) / c.scale));
    return s;
  }

  /// \int_a^b |sum_j c_j chain_j(x)| dx by Gauss-Legendre on smooth pieces.
  double ac_abs_integral(double a, double b) const {
    std::vector<double> knots;
    for (const auto& c : ac_)
      for (double k : c.density.knots()) knots.push_back(k);
    std::sort(knots.begin(), knots.end());
    const double lo = std::max(a, knots.front()), hi = std::min(b, knots.back());
    if (!(hi > lo)) return 0.0;
    knots.erase(std::unique(knots.begin(), knots.end()), knots.end());
    static const detail::GaussRule rule = detail::gauss_legendre(8);
    auto f = [&](double x) {
      Complex v = 0;
      for (const auto& c : ac_) v += c.coeff * c.density(x);
      return std::abs(v);
    };
    double total = 0;
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
      const double u = std::max(lo, knots[i]), v = std::min(hi, knots[i + 1]);
      if (v > u) total += detail::integrate(f, u, v, rule, 64);
    }
    return total;
  }

 private:
  int n_ = 1;
  std::vector<PointMass> pp_;
  std::vector<AcComponent> ac_;
  std::vector<CantorComponent> sc_;
};

inline double total_variation(const FiniteMixedMeasure& nu) { return nu.total_variation(); }

/// Closed-form nu_check with the truncation error of the Cantor factors.
struct FiniteTransform {
  FiniteMixedMeasure nu;
  double error_bound = 0;  // |computed - exact| <= error_bound everywhere

  Complex operator()(const Vector& x) const { return nu.transform(x); }
  Complex operator()(double x) const { return nu.transform(x); }
};

inline FiniteTransform transform_finite(const FiniteMixedMeasure& nu) {
  return FiniteTransform{nu, 1e-10 * nu.variation_sc()};
}

}  // namespace meyer
