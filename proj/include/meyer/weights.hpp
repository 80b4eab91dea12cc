#pragma once

// Weight functions on the internal space R^m x Z^z with closed-form
// transforms. Transform convention: h_check(k) = \int h(x) e^{+2 pi i k.x} dx,
// with counting measure on Z^z so the discrete factor maps to a
// trigonometric polynomial on T^z.

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <optional>
#include <variant>
#include <vector>

#include "meyer/detail/piecewise.hpp"
#include "meyer/error.hpp"
#include "meyer/lattice_cps.hpp"

namespace meyer {

using Complex = std::complex<double>;
inline constexpr double kPi = std::numbers::pi;

/// e^{i pi k (a+b)} * \int_a^b ... = \int_a^b e^{2 pi i k x} dx.
inline Complex box_transform(double a, double b, double k) {
  const double L = b - a;
  const double u = kPi * k * L;
  const double sinc = std::abs(u) < 1e-8 ? 1.0 - u * u / 6.0 : std::sin(u) / u;
  const double ph = kPi * k * (a + b);
  return Complex(std::cos(ph), std::sin(ph)) * (L * sinc);
}

/// Convolution of indicator functions of closed intervals.
class BoxChain {
 public:
  BoxChain() = default;
  explicit BoxChain(std::vector<std::pair<double, double>> boxes) : boxes_(std::move(boxes)) {
    if (boxes_.empty()) throw Error(ErrorCode::InvalidArgument, "a B-spline needs at least one box");
    for (const auto& [a, b] : boxes_)
      if (!(b > a)) throw Error(ErrorCode::InvalidArgument, "B-spline box has non-positive length");
    build();
  }

  const std::vector<std::pair<double, double>>& boxes() const { return boxes_; }
  int order() const { return static_cast<int>(boxes_.size()); }

  double operator()(double x) const {
    if (boxes_.size() == 1) return (x >= boxes_[0].first && x <= boxes_[0].second) ? 1.0 : 0.0;
    return pw_(x);
  }

  Complex transform(double k) const {
    Complex v(1.0, 0.0);
    for (const auto& [a, b] : boxes_) v *= box_transform(a, b, k);
    return v;
  }

  const std::vector<double>& knots() const { return pw_.knots; }
  double support_lo() const { return pw_.lo(); }
  double support_hi() const { return pw_.hi(); }
  double integral() const {
    double v = 1.0;
    for (const auto& [a, b] : boxes_) v *= b - a;
    return v;
  }
  /// \int_{-inf}^{u} chain.
  double cumulative(double u) const { return cdf_(u); }

  /// sup of the chain: product of lengths divided by the largest one.
  double sup() const {
    double prod = 1.0, mx = 0.0;
    for (const auto& [a, b] : boxes_) {
      prod *= b - a;
      mx = std::max(mx, b - a);
    }
    return prod / mx;
  }

  /// Monotone bound on |transform(k)| for |k| >= rho.
  double envelope(double rho) const {
    double v = 1.0;
    for (const auto& [a, b] : boxes_) v *= rho > 0 ? std::min(b - a, 1.0 / (kPi * rho)) : (b - a);
    return v;
  }

  /// Bound on |d/dk transform(k)| at |k| = rho (monotone in rho).
  double derivative_envelope(double rho) const {
    double total = 0;
    for (std::size_t i = 0; i < boxes_.size(); ++i) {
      const auto [a, b] = boxes_[i];
      const double L = b - a;
      const double phi = rho > 0 ? std::min(L, 1.0 / (kPi * rho)) : L;
      double ds = kPi * L * L / 2.0;
      if (rho > 0) ds = std::min(ds, L / rho + 1.0 / (kPi * rho * rho));
      double term = kPi * std::abs(a + b) * phi + ds;
      for (std::size_t j = 0; j < boxes_.size(); ++j) {
        if (j == i) continue;
        const double Lj = boxes_[j].second - boxes_[j].first;
        term *= rho > 0 ? std::min(Lj, 1.0 / (kPi * rho)) : Lj;
      }
      total += term;
    }
    return total;
  }

  /// Lipschitz constant (infinite for a single discontinuous box).
  double lipschitz() const {
    if (boxes_.size() == 1) return HUGE_VAL;
    double best = HUGE_VAL;
    for (std::size_t j = 0; j < boxes_.size(); ++j) {
      double prod = 1.0, mx = 0.0, width = 0.0;
      for (std::size_t i = 0; i < boxes_.size(); ++i) {
        if (i == j) continue;
        const double L = boxes_[i].second - boxes_[i].first;
        prod *= L;
        mx = std::max(mx, L);
        width += L;
      }
      const double Lj = boxes_[j].second - boxes_[j].first;
      const double factor = Lj >= width ? 1.0 : 2.0;
      best = std::min(best, factor * prod / mx);
    }
    return best;
  }

  BoxChain reflected() const {
    std::vector<std::pair<double, double>> r;
    for (const auto& [a, b] : boxes_) r.emplace_back(-b, -a);
    return BoxChain(std::move(r));
  }

  BoxChain convolved(const BoxChain& o) const {
    auto r = boxes_;
    r.insert(r.end(), o.boxes_.begin(), o.boxes_.end());
    return BoxChain(std::move(r));
  }

 private:
  std::vector<std::pair<double, double>> boxes_;
  detail::Piecewise pw_, cdf_;

  void build() {
    // Shortest boxes first so the widest one is applied last; keeps plateaus exact.
    auto sorted = boxes_;
    std::sort(sorted.begin(), sorted.end(),
              [](const auto& x, const auto& y) { return (x.second - x.first) < (y.second - y.first); });
    pw_ = detail::Piecewise::indicator(sorted[0].first, sorted[0].second);
    for (std::size_t i = 1; i < sorted.size(); ++i) pw_ = pw_.convolve_box(sorted[i].first, sorted[i].second);
    cdf_ = pw_.antiderivative();
  }
};

/// q(x) exp(-pi (x/sigma)^2) with a real polynomial q.
struct Gaussian1D {
  double sigma = 1.0;
  std::vector<double> poly{1.0};

  double operator()(double x) const {
    double q = 0;
    for (std::size_t j = poly.size(); j-- > 0;) q = q * x + poly[j];
    const double u = x / sigma;
    return q * std::exp(-kPi * u * u);
  }

  /// M_j(s) = \int u^j e^{-pi u^2} e^{2 pi i s u} du via
  /// M_{j+1} = (j / 2pi) M_{j-1} + i s M_j.
  static std::vector<Complex> moments(std::size_t count, double s) {
    std::vector<Complex> M(std::max<std::size_t>(count, 1));
    M[0] = std::exp(-kPi * s * s);
    if (count > 1) M[1] = Complex(0, s) * M[0];
    for (std::size_t j = 1; j + 1 < count; ++j)
      M[j + 1] = (static_cast<double>(j) / (2 * kPi)) * M[j - 1] + Complex(0, s) * M[j];
    return M;
  }

  Complex transform(double k) const {
    auto M = moments(poly.size(), sigma * k);
    Complex v = 0;
    double sp = sigma;
    for (std::size_t j = 0; j < poly.size(); ++j) {
      v += poly[j] * sp * M[j];
      sp *= sigma;
    }
    return v;
  }

  /// Monotone bound on |transform(k)| for |k| >= rho, by dense sampling of
  /// the absolute-coefficient majorant.
  double envelope(double rho) const {
    // |M_j(s)| <= P_j(|s|) e^{-pi s^2}, P_j with absolute coefficients.
    const std::size_t n = poly.size();
    auto majorant = [&](double k) {
      const double s = sigma * std::abs(k);
      std::vector<std::vector<double>> P(std::max<std::size_t>(n, 1));
      P[0] = {1.0};
      if (n > 1) P[1] = {0.0, 1.0};
      for (std::size_t j = 1; j + 1 < n; ++j) {
        std::vector<double> next(j + 2, 0.0);
        for (std::size_t r = 0; r < P[j - 1].size(); ++r) next[r] += static_cast<double>(j) / (2 * kPi) * P[j - 1][r];
        for (std::size_t r = 0; r < P[j].size(); ++r) next[r + 1] += P[j][r];
        P[j + 1] = next;
      }
      double total = 0, sp = sigma;
      for (std::size_t j = 0; j < n; ++j) {
        double pv = 0;
        for (std::size_t r = P[j].size(); r-- > 0;) pv = pv * s + P[j][r];
        total += std::abs(poly[j]) * sp * pv;
        sp *= sigma;
      }
      return total * std::exp(-kPi * s * s);
    };
    const double span = 12.0 / sigma + 12.0;
    double best = 0;
    for (int i = 0; i <= 4000; ++i) best = std::max(best, majorant(rho + span * i / 4000.0));
    return best * (1.0 + 1e-3);
  }

  double sup_abs() const {
    const double span = 12.0 * sigma + 12.0;
    double best = 0;
    for (int i = 0; i <= 20000; ++i) best = std::max(best, std::abs((*this)(span * i / 20000.0)));
    for (int i = 0; i <= 20000; ++i) best = std::max(best, std::abs((*this)(-span * i / 20000.0)));
    return best * (1.0 + 1e-3);
  }

  double lipschitz() const {
    const double span = 12.0 * sigma + 12.0;
    const double h = span / 20000.0;
    double best = 0;
    for (int i = -20000; i < 20000; ++i) {
      const double x = i * h;
      best = std::max(best, std::abs((*this)(x + h) - (*this)(x)) / h);
    }
    return best * 1.05;
  }

  Gaussian1D scaled(double c) const {
    Gaussian1D g = *this;
    for (double& v : g.poly) v *= c;
    return g;
  }

  Gaussian1D reflected() const {
    Gaussian1D g = *this;
    for (std::size_t j = 1; j < g.poly.size(); j += 2) g.poly[j] = -g.poly[j];
    return g;
  }
};

using Factor1D = std::variant<BoxChain, Gaussian1D>;

inline double factor_value(const Factor1D& f, double x) {
  return std::visit([x](const auto& v) { return v(x); }, f);
}
inline Complex factor_transform(const Factor1D& f, double k) {
  return std::visit([k](const auto& v) { return v.transform(k); }, f);
}
inline double factor_envelope(const Factor1D& f, double rho) {
  return std::visit([rho](const auto& v) { return v.envelope(rho); }, f);
}
inline double factor_sup(const Factor1D& f) {
  if (auto* c = std::get_if<BoxChain>(&f)) return c->sup();
  return std::get<Gaussian1D>(f).sup_abs();
}
inline double factor_lipschitz(const Factor1D& f) {
  return std::visit([](const auto& v) { return v.lipschitz(); }, f);
}

/// Finitely supported complex function on Z^z.
struct DiscreteProfile {
  std::map<std::vector<long long>, Complex> values;

  Complex operator()(const double* v, int z) const {
    std::vector<long long> key(z);
    for (int i = 0; i < z; ++i) key[i] = std::llround(v[i]);
    auto it = values.find(key);
    return it == values.end() ? Complex(0) : it->second;
  }

  /// sum_u psi(u) e^{2 pi i theta.u}
  Complex transform(const double* theta, int z) const {
    Complex s = 0;
    for (const auto& [u, val] : values) {
      double ph = 0;
      for (int i = 0; i < z; ++i) ph += theta[i] * static_cast<double>(u[i]);
      s += val * Complex(std::cos(2 * kPi * ph), std::sin(2 * kPi * ph));
    }
    return s;
  }

  double l1() const {
    double s = 0;
    for (const auto& [u, v] : values) s += std::abs(v);
    return s;
  }
  double sup() const {
    double s = 0;
    for (const auto& [u, v] : values) s = std::max(s, std::abs(v));
    return s;
  }

  static DiscreteProfile indicator(const std::vector<std::vector<long long>>& F) {
    DiscreteProfile d;
    for (const auto& f : F) d.values[f] = 1.0;
    return d;
  }
};

struct ProfileTerm {
  Complex coeff{1.0, 0.0};
  std::vector<Factor1D> real;  // one factor per real internal coordinate
  DiscreteProfile discrete;    // ignored when z = 0
};

/// Finite linear combination of tensor-product terms on R^m x Z^z.
class WeightProfile {
 public:
  WeightProfile() = default;
  WeightProfile(int m, int z, std::vector<ProfileTerm> terms) : m_(m), z_(z), terms_(std::move(terms)) {
    for (const auto& t : terms_) {
      if (static_cast<int>(t.real.size()) != m_)
        throw Error(ErrorCode::InvalidArgument, "profile term has wrong number of real factors");
      for (const auto& [u, v] : t.discrete.values)
        if (static_cast<int>(u.size()) != z_) throw Error(ErrorCode::InvalidArgument, "discrete support dimension mismatch");
    }
  }

  int m() const { return m_; }
  int z() const { return z_; }
  const std::vector<ProfileTerm>& terms() const { return terms_; }

  Complex operator()(const double* star) const {
    Complex total = 0;
    for (const auto& t : terms_) {
      Complex v = t.coeff;
      for (int i = 0; i < m_ && v != 0.0; ++i) v *= factor_value(t.real[i], star[i]);
      if (z_ > 0 && v != 0.0) v *= t.discrete(star + m_, z_);
      total += v;
    }
    return total;
  }
  Complex operator()(const Vector& star) const { return (*this)(star.data()); }

  /// h_check at (k_real, theta) with theta on T^z.
  Complex transform(const double* k) const {
    Complex total = 0;
    for (const auto& t : terms_) {
      Complex v = t.coeff;
      for (int i = 0; i < m_; ++i) v *= factor_transform(t.real[i], k[i]);
      if (z_ > 0) v *= t.discrete.transform(k + m_, z_);
      total += v;
    }
    return total;
  }
  Complex transform(const Vector& k) const { return transform(k.data()); }

  /// \int h over R^m x Z^z (counting measure on the discrete factor).
  Complex integral() const {
    Vector zero(m_ + z_, 0.0);
    return transform(zero.data());
  }

  /// Monotone bound on |h_check(k)| over all k with |k_real| >= rho.
  double envelope(double rho) const {
    double total = 0;
    for (const auto& t : terms_) {
      double c = std::abs(t.coeff) * (z_ > 0 ? t.discrete.l1() : 1.0);
      if (m_ == 0) {
        total += c;
        continue;
      }
      const double r = rho / std::sqrt(static_cast<double>(m_));
      double best = 0;
      for (int j = 0; j < m_; ++j) {
        double v = factor_envelope(t.real[j], r);
        for (int i = 0; i < m_; ++i)
          if (i != j) v *= factor_envelope(t.real[i], 0.0);
        best = std::max(best, v);
      }
      total += c * best;
    }
    return total;
  }

  /// Upper bound on sup |h|.
  double sup_bound() const {
    double total = 0;
    for (const auto& t : terms_) {
      double v = std::abs(t.coeff) * (z_ > 0 ? t.discrete.sup() : 1.0);
      for (const auto& f : t.real) v *= factor_sup(f);
      total += v;
    }
    return total;
  }

  /// Lipschitz constant in the real internal coordinates (Euclidean).
  double lipschitz() const {
    double total = 0;
    for (const auto& t : terms_) {
      double s2 = 0;
      for (int j = 0; j < m_; ++j) {
        double v = factor_lipschitz(t.real[j]);
        for (int i = 0; i < m_; ++i)
          if (i != j) v *= factor_sup(t.real[i]);
        s2 += v * v;
      }
      total += std::abs(t.coeff) * (z_ > 0 ? t.discrete.sup() : 1.0) * std::sqrt(s2);
    }
    return total;
  }

  /// Modulus of continuity bound sup_{|d| <= delta} |h(x + d) - h(x)| for
  /// displacements in the real internal factor.
  double modulus_of_continuity(double delta) const {
    return std::min(lipschitz() * delta, 2.0 * sup_bound());
  }

  /// Bounding box of the real support; infinite for Gaussian factors.
  Box real_support() const {
    Box b{Vector(m_, HUGE_VAL), Vector(m_, -HUGE_VAL)};
    for (const auto& t : terms_)
      for (int i = 0; i < m_; ++i) {
        if (const auto* c = std::get_if<BoxChain>(&t.real[i])) {
          b.lo[i] = std::min(b.lo[i], c->support_lo());
          b.hi[i] = std::max(b.hi[i], c->support_hi());
        } else {
          b.lo[i] = -HUGE_VAL;
          b.hi[i] = HUGE_VAL;
        }
      }
    return b;
  }

  std::vector<std::vector<long long>> discrete_support() const {
    std::vector<std::vector<long long>> out;
    for (const auto& t : terms_)
      for (const auto& [u, v] : t.discrete.values)
        if (std::find(out.begin(), out.end(), u) == out.end()) out.push_back(u);
    std::sort(out.begin(), out.end());
    return out;
  }

  bool compactly_supported() const {
    for (const auto& t : terms_)
      for (const auto& f : t.real)
        if (std::holds_alternative<Gaussian1D>(f)) return false;
    return true;
  }

  /// Smallest number of box factors over all real factors (8 for Gaussians).
  int decay_order() const {
    int p = 8;
    for (const auto& t : terms_)
      for (const auto& f : t.real)
        if (const auto* c = std::get_if<BoxChain>(&f)) p = std::min(p, c->order());
    return p;
  }

  /// h~(x) = conj(h(-x)).
  WeightProfile tilde() const {
    auto terms = terms_;
    for (auto& t : terms) {
      t.coeff = std::conj(t.coeff);
      for (auto& f : t.real) {
        if (auto* c = std::get_if<BoxChain>(&f)) f = c->reflected();
        else f = std::get<Gaussian1D>(f).reflected();
      }
      DiscreteProfile d;
      for (const auto& [u, v] : t.discrete.values) {
        auto neg = u;
        for (auto& x : neg) x = -x;
        d.values[neg] = std::conj(v);
      }
      t.discrete = d;
    }
    return WeightProfile(m_, z_, std::move(terms));
  }

  friend WeightProfile operator+(const WeightProfile& a, const WeightProfile& b) {
    if (a.m_ != b.m_ || a.z_ != b.z_) throw Error(ErrorCode::InvalidArgument, "profile dimension mismatch");
    auto terms = a.terms_;
    terms.insert(terms.end(), b.terms_.begin(), b.terms_.end());
    return WeightProfile(a.m_, a.z_, std::move(terms));
  }
  friend WeightProfile operator*(Complex c, const WeightProfile& a) {
    auto terms = a.terms_;
    for (auto& t : terms) t.coeff *= c;
    return WeightProfile(a.m_, a.z_, std::move(terms));
  }
  friend WeightProfile operator-(const WeightProfile& a, const WeightProfile& b) {
    return a + Complex(-1.0) * b;
  }

 private:
  int m_ = 0, z_ = 0;
  std::vector<ProfileTerm> terms_;
};

/// Convolution of two compactly supported profiles (B-spline factors only).
inline WeightProfile convolve(const WeightProfile& a, const WeightProfile& b) {
  if (a.m() != b.m() || a.z() != b.z()) throw Error(ErrorCode::InvalidArgument, "profile dimension mismatch");
  std::vector<ProfileTerm> out;
  for (const auto& s : a.terms())
    for (const auto& t : b.terms()) {
      ProfileTerm r;
      r.coeff = s.coeff * t.coeff;
      for (int i = 0; i < a.m(); ++i) {
        const auto* x = std::get_if<BoxChain>(&s.real[i]);
        const auto* y = std::get_if<BoxChain>(&t.real[i]);
        if (!x || !y) throw Error(ErrorCode::InvalidArgument, "convolution requires B-spline factors");
        r.real.push_back(x->convolved(*y));
      }
      for (const auto& [u, v] : s.discrete.values)
        for (const auto& [w, x] : t.discrete.values) {
          std::vector<long long> sum(u.size());
          for (std::size_t i = 0; i < u.size(); ++i) sum[i] = u[i] + w[i];
          r.discrete.values[sum] += v * x;
        }
      out.push_back(std::move(r));
    }
  return WeightProfile(a.m(), a.z(), std::move(out));
}

/// Single-term B-spline profile from per-coordinate box chains.
inline WeightProfile bspline_profile(std::vector<BoxChain> chains, Complex coeff = 1.0, int z = 0,
                                     DiscreteProfile discrete = {}) {
  ProfileTerm t;
  t.coeff = coeff;
  for (auto& c : chains) t.real.emplace_back(std::move(c));
  t.discrete = std::move(discrete);
  const int m = static_cast<int>(t.real.size());
  return WeightProfile(m, z, {t});
}

inline WeightProfile gaussian_profile(double sigma, std::vector<double> poly = {1.0}) {
  ProfileTerm t;
  t.real.emplace_back(Gaussian1D{sigma, std::move(poly)});
  return WeightProfile(1, 0, {t});
}

/// Box [a,b] convolved with itself after centring: the triangle of base [2a, 2b].
inline BoxChain triangle_chain(double a, double b) { return BoxChain({{a, b}, {a, b}}); }

/// Smooth bump equal to 1 on the window and vanishing outside W + [-1.5 margin, 1.5 margin]^m:
/// per coordinate the ramp 1_{[lo - margin, hi + margin]} * (2/margin) 1_{[-margin/4, margin/4]}
/// mollified by another normalized box of width margin/2.
inline WeightProfile build_bump(const Window& window, int m, int z, double margin,
                                const std::optional<Vector>& exclude = std::nullopt) {
  if (!(margin > 0)) throw Error(ErrorCode::InvalidArgument, "bump margin must be positive");
  window.validate(m, z);
  const Box bounds = window.real_bounds(m);
  if (exclude) {
    if (static_cast<int>(exclude->size()) != m + z)
      throw Error(ErrorCode::InvalidArgument, "excluded point has wrong dimension");
    bool discrete_in = true;
    if (z > 0) discrete_in = DiscreteProfile::indicator(window.discrete)(exclude->data() + m, z) != 0.0;
    if (discrete_in && m > 0 && bounds.distance(exclude->data()) <= 2 * margin)
      throw Error(ErrorCode::ExclusionTooClose, "excluded point lies within 2*margin of the window");
    if (discrete_in && m == 0) throw Error(ErrorCode::ExclusionTooClose, "excluded point lies in the window");
  }
  ProfileTerm t;
  const double w = margin / 2.0;
  double norm = 1.0;
  for (int i = 0; i < m; ++i) {
    t.real.emplace_back(BoxChain({{bounds.lo[i] - margin, bounds.hi[i] + margin}, {-w / 2, w / 2}, {-w / 2, w / 2}}));
    norm *= 1.0 / (w * w);
  }
  t.coeff = norm;
  if (z > 0) t.discrete = DiscreteProfile::indicator(window.discrete);
  return WeightProfile(m, z, {t});
}

/// Closed-form transform with a certified decay envelope.
struct TransformedWeight {
  WeightProfile profile;
  double c_env = 0;  // |h_check(k)| <= c_env / (1 + |k|)^p
  int p = 0;

  Complex operator()(const double* k) const { return profile.transform(k); }
  Complex operator()(const Vector& k) const { return profile.transform(k.data()); }
  double envelope(double rho) const { return profile.envelope(rho); }
};

inline TransformedWeight transform_weight(const WeightProfile& h) {
  TransformedWeight tw{h, 0.0, h.decay_order()};
  double best = h.envelope(0.0);
  for (int i = 0; i <= 600; ++i) {
    const double rho = std::pow(10.0, -3.0 + 9.0 * i / 600.0);
    best = std::max(best, h.envelope(rho) * std::pow(1.0 + rho, tw.p));
  }
  tw.c_env = best * (1.0 + 1e-9);
  return tw;
}

/// phi = phi1 + phi2 with phi1 = phi * taper compactly supported and the
/// weighted tail sup (1 + |x|^{2d}) |phi2(x)| bounded.
struct SchwartzSplit {
  Gaussian1D phi;
  BoxChain taper;
  double taper_scale = 1.0;
  double r_cut = 0;
  int d = 1;
  double tail_bound = 0;

  double taper_value(double x) const { return taper_scale * taper(x); }
  double phi1(double x) const { return phi(x) * taper_value(x); }
  double phi2(double x) const { return phi(x) * (1.0 - taper_value(x)); }
};

inline SchwartzSplit schwartz_split(const Gaussian1D& phi, double r_cut, int d = 1) {
  if (!(r_cut >= 0)) throw Error(ErrorCode::InvalidArgument, "R_cut must be non-negative");
  SchwartzSplit s;
  s.phi = phi;
  s.r_cut = r_cut;
  s.d = d;
  const double margin = 2.0 / 3.0;
  auto bump = build_bump(interval_window(-r_cut, r_cut == 0 ? 1e-12 : r_cut), 1, 0, margin);
  s.taper = std::get<BoxChain>(bump.terms()[0].real[0]);
  s.taper_scale = bump.terms()[0].coeff.real();
  // Weighted tail on |x| >= r_cut: dense sampling up to where the Gaussian
  // factor underflows, then a check that the sampled function is decreasing
  // at the far end.
  auto weighted = [&](double x) { return (1.0 + std::pow(std::abs(x), 2.0 * d)) * std::abs(phi(x)); };
  const double far = r_cut + 40.0 * phi.sigma + 10.0;
  const int samples = 200000;
  double best = 0;
  for (int i = 0; i <= samples; ++i) {
    const double x = r_cut + (far - r_cut) * i / samples;
    best = std::max({best, weighted(x), weighted(-x)});
  }
  s.tail_bound = best;
  return s;
}

}  // namespace meyer
