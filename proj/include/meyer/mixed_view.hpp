#pragma once

// Measures of the form (atomic) * (finite mixed), kept as translated copies
// so the three Lebesgue parts stay separate: point masses, translates of the
// B-spline densities and translates of the Cantor components.

#include <algorithm>
#include <cmath>
#include <vector>

#include "meyer/measures.hpp"

namespace meyer {

struct Translate {
  double y;
  Complex amp;
};

class MixedMeasureView {
 public:
  MixedMeasureView() = default;

  /// pp atoms in R^n; continuous copies amp_i * (nu_cont shifted by y_i) in
  /// dimension 1. `window` is where the view is complete.
  MixedMeasureView(int n, std::vector<Atom> pp, std::vector<Translate> copies, FiniteMixedMeasure continuous,
                   Box window)
      : n_(n), continuous_(std::move(continuous)), window_(std::move(window)) {
    if (!continuous_.pp().empty()) throw Error(ErrorCode::InvalidArgument, "continuous part carries point masses");
    if (n_ > 1 && !continuous_.empty()) throw Error(ErrorCode::UnsupportedDimension, "continuous views need n = 1");
    pp_ = AtomicMeasure(n_, std::move(pp), std::vector<SafeBall>{}).atoms();
    std::sort(copies.begin(), copies.end(), [](const Translate& a, const Translate& b) { return a.y < b.y; });
    for (auto& c : copies) {
      if (!copies_.empty() && std::abs(copies_.back().y - c.y) <= kMergeGap) copies_.back().amp += c.amp;
      else copies_.push_back(c);
    }
    lo_ = HUGE_VAL;
    hi_ = -HUGE_VAL;
    for (const auto& a : continuous_.ac()) {
      lo_ = std::min(lo_, a.density.support_lo());
      hi_ = std::max(hi_, a.density.support_hi());
    }
    for (const auto& c : continuous_.sc()) {
      lo_ = std::min(lo_, c.lo());
      hi_ = std::max(hi_, c.hi());
    }
  }

  int n() const { return n_; }
  const std::vector<Atom>& pp_atoms() const { return pp_; }
  const std::vector<Translate>& copies() const { return copies_; }
  const FiniteMixedMeasure& continuous() const { return continuous_; }
  const Box& window() const { return window_; }

  MixedMeasureView pp_part() const { return MixedMeasureView(n_, pp_, {}, FiniteMixedMeasure(n_, {}), window_); }
  MixedMeasureView ac_part() const {
    return MixedMeasureView(n_, {}, copies_, continuous_.ac_part(), window_);
  }
  MixedMeasureView sc_part() const {
    return MixedMeasureView(n_, {}, copies_, continuous_.sc_part(), window_);
  }

  /// Complex mass of a closed box.
  Complex mass(const Box& B) const {
    Complex s = 0;
    for (const auto& a : pp_)
      if (B.contains(a.x.data(), 1e-12)) s += a.w;
    if (continuous_.empty()) return s;
    for_copies(B, [&](const Translate& c) { s += c.amp * continuous_.mass_in(B.lo[0] - c.y, B.hi[0] - c.y); });
    return s;
  }

  double variation_pp(const Box& B) const {
    double s = 0;
    for (const auto& a : pp_)
      if (B.contains(a.x.data(), 1e-12)) s += std::abs(a.w);
    return s;
  }

  /// \int_B |density| for the sum of translated B-spline densities.
  double variation_ac(const Box& B) const {
    if (continuous_.ac().empty()) return 0.0;
    std::vector<const Translate*> hits;
    for_copies(B, [&](const Translate& c) { hits.push_back(&c); });
    if (hits.empty()) return 0.0;
    std::vector<double> knots{B.lo[0], B.hi[0]};
    for (const auto* c : hits)
      for (const auto& a : continuous_.ac())
        for (double k : a.density.knots()) {
          const double v = k + c->y;
          if (v > B.lo[0] && v < B.hi[0]) knots.push_back(v);
        }
    std::sort(knots.begin(), knots.end());
    knots.erase(std::unique(knots.begin(), knots.end()), knots.end());
    static const detail::GaussRule rule = detail::gauss_legendre(8);
    auto f = [&](double x) {
      Complex v = 0;
      for (const auto* c : hits)
        for (const auto& a : continuous_.ac()) v += c->amp * a.coeff * a.density(x - c->y);
      return std::abs(v);
    };
    double total = 0;
    for (std::size_t i = 0; i + 1 < knots.size(); ++i)
      if (knots[i + 1] > knots[i]) total += detail::integrate(f, knots[i], knots[i + 1], rule, 8);
    return total;
  }

  /// Cantor translates at distinct shifts are treated as mutually singular.
  double variation_sc(const Box& B) const {
    if (continuous_.sc().empty()) return 0.0;
    double s = 0;
    for_copies(B, [&](const Translate& c) {
      for (const auto& k : continuous_.sc()) {
        const double F = cantor_cdf(k.ratio, (B.hi[0] - c.y - k.shift) / k.scale) -
                         cantor_cdf(k.ratio, (B.lo[0] - c.y - k.shift) / k.scale);
        s += std::abs(c.amp * k.mass) * F;
      }
    });
    return s;
  }

  /// |view|(B); the three parts are mutually singular so variations add.
  double variation(const Box& B) const { return variation_pp(B) + variation_ac(B) + variation_sc(B); }

  MixedMeasureView translated(double t) const {
    if (n_ != 1) throw Error(ErrorCode::UnsupportedDimension, "translation of views implemented for n = 1");
    auto pp = pp_;
    for (auto& a : pp) a.x[0] += t;
    auto copies = copies_;
    for (auto& c : copies) c.y += t;
    return MixedMeasureView(n_, std::move(pp), std::move(copies), continuous_, window_.translated({t}));
  }

  /// Difference of two views over the same continuous template.
  friend MixedMeasureView operator-(const MixedMeasureView& a, const MixedMeasureView& b) {
    auto pp = a.pp_;
    for (auto at : b.pp_) {
      at.w = -at.w;
      pp.push_back(at);
    }
    auto copies = a.copies_;
    for (auto c : b.copies_) {
      c.amp = -c.amp;
      copies.push_back(c);
    }
    Box w = a.window_;
    for (int i = 0; i < a.n_; ++i) {
      w.lo[i] = std::max(w.lo[i], b.window_.lo[i]);
      w.hi[i] = std::min(w.hi[i], b.window_.hi[i]);
    }
    return MixedMeasureView(a.n_, std::move(pp), std::move(copies), a.continuous_, w);
  }

 private:
  int n_ = 1;
  std::vector<Atom> pp_;
  std::vector<Translate> copies_;
  FiniteMixedMeasure continuous_;
  Box window_;
  double lo_ = 0, hi_ = 0;  // support of the continuous template

  template <class F>
  void for_copies(const Box& B, F&& f) const {
    if (copies_.empty() || continuous_.empty()) return;
    // copy i touches B iff y_i + [lo_, hi_] meets [B.lo, B.hi]
    auto it = std::lower_bound(copies_.begin(), copies_.end(), B.lo[0] - hi_ - 1e-12,
                               [](const Translate& c, double v) { return c.y < v; });
    for (; it != copies_.end() && it->y <= B.hi[0] - lo_ + 1e-12; ++it) f(*it);
  }
};

/// sup_t |view|(t + K) over translates with t + K inside the view window.
/// Candidates: a grid of spacing `step` plus every translate placing an atom
/// on an edge of t + K (1D views).
inline KNormResult k_norm(const MixedMeasureView& v, const Box& K, double step = 0.01) {
  if (v.n() != 1) {
    if (!v.continuous().empty()) throw Error(ErrorCode::UnsupportedDimension, "continuous views need n = 1");
    AtomicMeasure pp(v.n(), v.pp_atoms(), std::vector<SafeBall>{});
    const Box& w = v.window();
    return detail::KNormSweep(pp, K, [&w](const Box& B) {
             for (int i = 0; i < B.dim(); ++i)
               if (B.lo[i] < w.lo[i] - 1e-12 || B.hi[i] > w.hi[i] + 1e-12) return false;
             return true;
           }).run();
  }
  const double tmin = v.window().lo[0] - K.lo[0], tmax = v.window().hi[0] - K.hi[0];
  if (!(tmax >= tmin)) throw Error(ErrorCode::WindowTooLarge, "K does not fit inside the view window");
  std::vector<double> ts;
  const int steps = static_cast<int>(std::ceil((tmax - tmin) / step));
  for (int i = 0; i <= steps; ++i) ts.push_back(tmin + (tmax - tmin) * i / std::max(steps, 1));
  for (const auto& a : v.pp_atoms()) {
    for (double t : {a.x[0] - K.lo[0], a.x[0] - K.hi[0]})
      if (t >= tmin && t <= tmax) ts.push_back(t);
  }
  std::sort(ts.begin(), ts.end());
  KNormResult best{0.0, {tmin}};
  for (double t : ts) {
    const double val = v.variation(K.translated({t}));
    if (val > best.value) best = {val, {t}};
  }
  return best;
}

/// mu * nu for an atomic mu and a finite mixed nu, complete on `window`.
inline MixedMeasureView convolve(const AtomicMeasure& mu, const FiniteMixedMeasure& nu, const Box& window) {
  if (mu.n() != nu.n()) throw Error(ErrorCode::InvalidArgument, "dimension mismatch");
  const double r = nu.support_radius();
  Box grown = window;
  for (int i = 0; i < mu.n(); ++i) {
    grown.lo[i] -= r;
    grown.hi[i] += r;
  }
  if (!mu.region_contains_box(grown))
    throw Error(ErrorCode::InsufficientPeakCoverage, "mu is not complete on the window dilated by supp(nu)");
  std::vector<Atom> pp;
  std::vector<Translate> copies;
  for (const auto& a : mu.atoms()) {
    if (!grown.contains(a.x.data(), 1e-12)) continue;
    for (const auto& p : nu.pp()) {
      Atom b{a.x, a.w * p.mass};
      for (int i = 0; i < mu.n(); ++i) b.x[i] += p.x[i];
      if (window.contains(b.x.data(), 1e-12)) pp.push_back(std::move(b));
    }
    if (!nu.ac().empty() || !nu.sc().empty()) copies.push_back({a.x[0], a.w});
  }
  FiniteMixedMeasure cont(nu.n(), {}, nu.ac(), nu.sc());
  return MixedMeasureView(mu.n(), std::move(pp), std::move(copies), std::move(cont), window);
}

}  // namespace meyer
