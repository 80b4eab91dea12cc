#pragma once

// Weighted Dirac combs over a cut-and-project scheme, their transforms as
// peak lists over the dual scheme, and the Poisson-pairing verifier.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "meyer/lattice_cps.hpp"
#include "meyer/measures.hpp"
#include "meyer/mixed_view.hpp"
#include "meyer/weights.hpp"

namespace meyer {

/// Smallest nonzero vector length of a lattice.
inline double lattice_min_distance(const Lattice& l) {
  const int N = l.dim();
  double r = std::pow(l.covolume(), 1.0 / N);
  for (int attempt = 0; attempt < 60; ++attempt, r *= 2) {
    double best = HUGE_VAL;
    l.for_each_in_box(Vector(N, -r), Vector(N, r), [&](const double* v) {
      const double s = norm(v, N);
      if (s > 1e-12) best = std::min(best, s);
    });
    if (best <= r) return best;
  }
  throw Error(ErrorCode::EnumerationBudgetExceeded, "could not find a shortest lattice vector");
}

/// Everything needed to bound the contribution of dual points that a peak
/// list does not contain: those with |y| > K or |y*| > B.
struct TailModel {
  int n = 1, m = 0, z = 0;
  double dens = 1.0;   // amplitude = dens * h_check(y*)
  double delta = 1.0;  // minimal distance of the dual lattice
  double K = 0, B = 0;
  std::function<double(double)> weight_envelope;  // |h_check| for |y*_real| >= rho

  /// Upper bound on sum over missing dual points of |amp(y)| * E(|y|), where
  /// E is a monotone bound for the paired function on |y| >= rho.
  double bound(const std::function<double(double)>& E) const {
    const double half = delta / 2;
    const int N = n + m + z;
    const double cell_ball = ball_volume(N, half);
    const double torus = std::pow(1.0 + delta, z);
    auto grid = [](double cut) {
      std::vector<double> g{0.0};
      const double fine = std::min(0.5, cut > 0 ? cut / 4 : 0.5);
      while (g.back() + fine < std::min(cut, 8.0) - 1e-12) g.push_back(g.back() + fine);
      while (g.back() * 1.25 < cut - 1e-12) g.push_back(std::max(g.back() + fine, g.back() * 1.25));
      if (cut > 0) g.push_back(cut);
      while (g.back() < 1e30) g.push_back(std::max(g.back() * 1.25, g.back() + 1.0));
      return g;
    };
    auto shell = [](int d, double r1, double r2) {
      if (d == 0) return 1.0;
      return ball_volume(d, r2) - ball_volume(d, std::max(0.0, r1));
    };
    const std::vector<double> ag = grid(K);
    const std::vector<double> bg = m > 0 ? grid(B) : std::vector<double>{0.0, 0.0};
    const std::size_t nb = m > 0 ? bg.size() - 1 : 1;
    double total = 0, last = 0;
    for (std::size_t i = 0; i + 1 < ag.size(); ++i) {
      const double Ea = E(ag[i]);
      if (Ea == 0) continue;
      const double va = shell(n, ag[i] - half, ag[i + 1] + half);
      double row = 0;
      for (std::size_t j = 0; j < nb; ++j) {
        const bool outside = ag[i] >= K - 1e-12 || (m > 0 && bg[j] >= B - 1e-12);
        if (!outside) continue;
        const double lo = m > 0 ? bg[j] : 0.0, hi = m > 0 ? bg[j + 1] : 0.0;
        const double Eh = weight_envelope(lo);
        if (Eh == 0) continue;
        const double count = va * shell(m, lo - half, hi + half) * torus / cell_ball;
        row += count * dens * Eh * Ea;
      }
      total += row;
      last = row;
    }
    // the last geometric shells decay at least by a factor 2 per step
    return total + last;
  }
};

/// Transform of a weighted comb: amplitudes dens * h_check(y*) at dual points.
class PeakList {
 public:
  int n = 1, m = 0, z = 0;
  double K_max = 0;
  double internal_cutoff = 0;  // B: only |y*_real| <= B enumerated
  double amp_floor = 0;
  std::vector<double> discarded_by_radius;  // |amp| mass below floor, in |y| bins of width kBin
  TailModel tail;
  std::string provenance;

  static constexpr double kBin = 0.25;

  std::size_t size() const { return amp_.size(); }
  const double* k(std::size_t i) const { return &k_[i * n]; }
  const double* star(std::size_t i) const { return &star_[i * (m + z)]; }
  Complex amp(std::size_t i) const { return amp_[i]; }
  double intensity(std::size_t i) const { return std::norm(amp_[i]); }
  Vector k_vec(std::size_t i) const { return Vector(k(i), k(i) + n); }

  void push(const double* kk, const double* ss, Complex a) {
    k_.insert(k_.end(), kk, kk + n);
    star_.insert(star_.end(), ss, ss + m + z);
    amp_.push_back(a);
  }

  double discarded_mass() const { return std::accumulate(discarded_by_radius.begin(), discarded_by_radius.end(), 0.0); }

  /// Bound on sum over discarded in-region peaks of |amp| * E(|y|).
  double discarded_bound(const std::function<double(double)>& E) const {
    double s = 0;
    for (std::size_t b = 0; b < discarded_by_radius.size(); ++b)
      if (discarded_by_radius[b] > 0) s += discarded_by_radius[b] * E(b * kBin);
    return s;
  }

  /// Index of the peak at position y (within 1e-9), if present.
  std::optional<std::size_t> find(const Vector& y) const {
    for (std::size_t i = 0; i < size(); ++i) {
      double d = 0;
      for (int j = 0; j < n; ++j) d = std::max(d, std::abs(k(i)[j] - y[j]));
      if (d <= 1e-9) return i;
    }
    return std::nullopt;
  }

  void sort_peaks() {
    std::vector<std::size_t> idx(size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      for (int j = 0; j < n; ++j)
        if (k(a)[j] != k(b)[j]) return k(a)[j] < k(b)[j];
      for (int j = 0; j < m + z; ++j)
        if (star(a)[j] != star(b)[j]) return star(a)[j] < star(b)[j];
      return false;
    });
    std::vector<double> kk, ss;
    std::vector<Complex> aa;
    kk.reserve(k_.size());
    ss.reserve(star_.size());
    aa.reserve(amp_.size());
    for (std::size_t i : idx) {
      kk.insert(kk.end(), k(i), k(i) + n);
      ss.insert(ss.end(), star(i), star(i) + m + z);
      aa.push_back(amp_[i]);
    }
    k_ = std::move(kk);
    star_ = std::move(ss);
    amp_ = std::move(aa);
  }

 private:
  std::vector<double> k_, star_;
  std::vector<Complex> amp_;
};

/// Smallest rho on a geometric grid with scale * envelope(rho) <= level.
inline double envelope_cutoff(const std::function<double(double)>& env, double scale, double level) {
  if (scale * env(0.0) <= level) return 0.0;
  double hi = 1.0;
  while (scale * env(hi) > level) {
    hi *= 2;
    if (hi > 1e12) throw Error(ErrorCode::EnumerationBudgetExceeded, "weight envelope decays too slowly");
  }
  double lo = hi / 2;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (scale * env(mid) > level ? lo : hi) = mid;
  }
  return hi;
}

/// Peaks of omega_h at dual points with |k| <= K_max. The internal range
/// |k*| <= B is chosen so every omitted amplitude is below amp_floor, unless
/// internal_cutoff is given. amp_floor < 0 selects 1e-12 * (dens * sup |h_check|).
inline PeakList transform_comb(const EuclideanCPS& cps, const WeightProfile& h, double K_max, double amp_floor = -1,
                               std::optional<double> internal_cutoff = std::nullopt,
                               std::size_t cap = detail::default_enumeration_cap()) {
  if (h.m() != cps.m() || h.z() != cps.z()) throw Error(ErrorCode::InvalidArgument, "weight does not match the internal space");
  if (!(K_max > 0)) throw Error(ErrorCode::InvalidArgument, "K_max must be positive");
  const DualCPS dual = dual_cps(cps);
  const double dens = cps.density();
  auto env = [h](double rho) { return h.envelope(rho); };
  if (amp_floor < 0) amp_floor = 1e-12 * dens * h.envelope(0.0);
  double B = 0;
  if (cps.m() > 0) {
    if (internal_cutoff) B = *internal_cutoff;
    else if (amp_floor > 0) B = envelope_cutoff(env, dens, amp_floor);
    else throw Error(ErrorCode::InvalidArgument, "amp_floor = 0 needs an explicit internal cutoff");
  }
  PeakList pl;
  pl.n = cps.n();
  pl.m = cps.m();
  pl.z = cps.z();
  pl.K_max = K_max;
  pl.internal_cutoff = B;
  pl.amp_floor = amp_floor;
  pl.discarded_by_radius.assign(static_cast<std::size_t>(K_max / PeakList::kBin) + 2, 0.0);
  const int n = pl.n, m = pl.m, z = pl.z;
  const double k2 = K_max * K_max * (1 + 1e-14), b2 = B * B * (1 + 1e-14);
  Vector star(m + z);
  for_each_dual_point(
      dual, K_max, B,
      [&](const double* v) {
        double s = 0, t = 0;
        for (int i = 0; i < n; ++i) s += v[i] * v[i];
        for (int i = 0; i < m; ++i) t += v[n + i] * v[n + i];
        if (s > k2 || t > b2) return;
        for (int i = 0; i < m; ++i) star[i] = v[n + i];
        for (int i = 0; i < z; ++i) star[m + i] = reduce_mod1(v[n + m + i]);
        const Complex a = dens * h.transform(star.data());
        if (std::abs(a) < amp_floor) {
          pl.discarded_by_radius[static_cast<std::size_t>(std::sqrt(s) / PeakList::kBin)] += std::abs(a);
          return;
        }
        pl.push(v, star.data(), a);
      },
      cap);
  pl.sort_peaks();
  pl.tail = TailModel{n, m, z, dens, lattice_min_distance(dual.lattice), K_max, B, env};
  pl.provenance = "comb transform over the dual scheme";
  return pl;
}

struct CombPoint {
  ProjectedPoint p;
  Complex w;
};

/// Lattice points with |x| <= R and h(x*) != 0, sorted by x (h compactly supported).
inline std::vector<CombPoint> comb_points(const EuclideanCPS& cps, const WeightProfile& h, double R,
                                          std::size_t cap = detail::default_enumeration_cap()) {
  if (!h.compactly_supported()) throw Error(ErrorCode::InvalidArgument, "comb weights must be compactly supported");
  const int n = cps.n(), m = cps.m(), z = cps.z();
  const Box supp = h.real_support();
  const auto disc = h.discrete_support();
  Vector lo(n, -R), hi(n, R);
  for (int i = 0; i < m; ++i) {
    lo.push_back(supp.lo[i]);
    hi.push_back(supp.hi[i]);
  }
  for (int i = 0; i < z; ++i) {
    long long a = disc.empty() ? 0 : disc.front()[i], b = a;
    for (const auto& d : disc) {
      a = std::min(a, d[i]);
      b = std::max(b, d[i]);
    }
    lo.push_back(a - 0.5);
    hi.push_back(b + 0.5);
  }
  std::vector<CombPoint> out;
  Vector star(m + z);
  cps.lattice.for_each_in_box(
      lo, hi,
      [&](const double* v) {
        if (norm(v, n) > R * (1 + 1e-14)) return;
        for (int i = 0; i < m + z; ++i) star[i] = i < m ? v[n + i] : std::round(v[n + i]);
        const Complex w = h(star.data());
        if (w == 0.0) return;
        out.push_back({{Vector(v, v + n), star}, w});
      },
      cap);
  std::sort(out.begin(), out.end(), [](const CombPoint& a, const CombPoint& b) { return a.p < b.p; });
  return out;
}

/// omega_h restricted to |x| <= R (h must be compactly supported).
inline AtomicMeasure make_comb(const EuclideanCPS& cps, const WeightProfile& h, double R,
                               std::size_t cap = detail::default_enumeration_cap()) {
  std::vector<Atom> atoms;
  for (auto& c : comb_points(cps, h, R, cap)) atoms.push_back({std::move(c.p.x), c.w});
  AtomicMeasure mu(cps.n(), std::move(atoms), R);
  mu.provenance = "weighted comb";
  return mu;
}

struct PairingReport {
  std::string test_id;
  Complex lhs, rhs;
  double lhs_error = 0;  // lhs is an exact finite sum
  double rhs_tail = 0;   // certified bound on omitted peaks
  double tolerance = 0;
  bool pass = false;
  double residual() const { return std::abs(lhs - rhs); }
};

/// Compares lhs with sum_i amp_i * G(y_i); E bounds |G| on |y| >= rho.
template <class GFun>
PairingReport pairing_against_peaks(Complex lhs, const PeakList& peaks, GFun&& G,
                                    const std::function<double(double)>& E, double tolerance, std::string id) {
  PairingReport rep;
  rep.test_id = std::move(id);
  rep.lhs = lhs;
  rep.tolerance = tolerance;
  rep.rhs_tail = peaks.tail.bound(E) + peaks.discarded_bound(E);
  if (rep.rhs_tail > tolerance / 2)
    throw Error(ErrorCode::InsufficientPeakCoverage,
                "rhs tail bound " + std::to_string(rep.rhs_tail) + " exceeds tolerance/2");
  Complex rhs = 0;
  for (std::size_t i = 0; i < peaks.size(); ++i) rhs += peaks.amp(i) * G(peaks.k(i));
  rep.rhs = rhs;
  rep.pass = rep.residual() <= tolerance + rep.rhs_tail;
  return rep;
}

/// <mu, g> = <mu_hat, g_check> for a B-spline test function g on R^n.
inline PairingReport verify_pairing(const AtomicMeasure& mu, const PeakList& peaks, const WeightProfile& g,
                                    double tolerance, std::string id = "g") {
  if (g.m() != mu.n() || g.z() != 0) throw Error(ErrorCode::InvalidArgument, "test function lives on R^n");
  if (!g.compactly_supported()) throw Error(ErrorCode::InvalidArgument, "test function must be compactly supported");
  if (!mu.region_contains_box(g.real_support()))
    throw Error(ErrorCode::InvalidArgument, "supp(g) leaves the region where mu is complete");
  Complex lhs = 0;
  for (const auto& a : mu.atoms()) lhs += a.w * g(a.x.data());
  return pairing_against_peaks(
      lhs, peaks, [&g](const double* y) { return g.transform(y); }, [&g](double r) { return g.envelope(r); },
      tolerance, std::move(id));
}

/// I_R(k) = |sum_{|x| <= R} w(x) e^{-2 pi i k.x}|^2 / vol(B_R).
inline std::vector<double> periodogram(const AtomicMeasure& patch, double R, const std::vector<Vector>& k_grid) {
  const int n = patch.n();
  const double vol = ball_volume(n, R);
  std::vector<double> out;
  out.reserve(k_grid.size());
  for (const auto& k : k_grid) {
    Complex s = 0;
    for (const auto& a : patch.atoms()) {
      if (norm(a.x) > R * (1 + 1e-14)) continue;
      double ph = 0;
      for (int i = 0; i < n; ++i) ph += k[i] * a.x[i];
      s += a.w * std::polar(1.0, -2 * kPi * ph);
    }
    out.push_back(std::norm(s) / vol);
  }
  return out;
}

/// gamma_R = sum_{|x|,|y| <= R} w(x) conj(w(y)) delta_{x-y} / vol(B_R).
inline AtomicMeasure autocorrelation_patch(const AtomicMeasure& patch, double R) {
  const int n = patch.n();
  const double vol = ball_volume(n, R);
  std::vector<const Atom*> in;
  for (const auto& a : patch.atoms())
    if (norm(a.x) <= R * (1 + 1e-14)) in.push_back(&a);
  std::vector<Atom> atoms;
  atoms.reserve(in.size() * in.size());
  for (const auto* a : in)
    for (const auto* b : in) {
      Vector d(n);
      for (int i = 0; i < n; ++i) d[i] = a->x[i] - b->x[i];
      atoms.push_back({std::move(d), a->w * std::conj(b->w) / vol});
    }
  // a finite measure: nothing is missing anywhere
  return AtomicMeasure(n, std::move(atoms), std::vector<SafeBall>{});
}

/// omega_hat * nu restricted to eval_window, kept as translated copies.
inline MixedMeasureView convolve_peaks(const PeakList& peaks, const FiniteMixedMeasure& nu, const Box& eval_window) {
  if (nu.n() != peaks.n) throw Error(ErrorCode::InvalidArgument, "dimension mismatch");
  const double r = nu.support_radius();
  Vector corner(peaks.n);
  for (unsigned mask = 0; mask < (1u << peaks.n); ++mask) {
    double s = 0;
    for (int i = 0; i < peaks.n; ++i) {
      const double c = (mask >> i) & 1u ? eval_window.hi[i] : eval_window.lo[i];
      s += c * c;
    }
    if (std::sqrt(s) + r > peaks.K_max)
      throw Error(ErrorCode::InsufficientPeakCoverage, "peak list does not cover the window dilated by supp(nu)");
  }
  std::vector<Atom> pp;
  std::vector<Translate> copies;
  Box grown = eval_window;
  for (int i = 0; i < peaks.n; ++i) {
    grown.lo[i] -= r;
    grown.hi[i] += r;
  }
  for (std::size_t i = 0; i < peaks.size(); ++i) {
    if (!grown.contains(peaks.k(i), 1e-12)) continue;
    for (const auto& p : nu.pp()) {
      Atom a{peaks.k_vec(i), peaks.amp(i) * p.mass};
      for (int j = 0; j < peaks.n; ++j) a.x[j] += p.x[j];
      if (eval_window.contains(a.x.data(), 1e-12)) pp.push_back(std::move(a));
    }
    if (!nu.ac().empty() || !nu.sc().empty()) copies.push_back({peaks.k(i)[0], peaks.amp(i)});
  }
  return MixedMeasureView(peaks.n, std::move(pp), std::move(copies), FiniteMixedMeasure(nu.n(), {}, nu.ac(), nu.sc()),
                          eval_window);
}

}  // namespace meyer
