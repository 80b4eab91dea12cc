#pragma once

// Norm almost periods of combs and of their transforms, the AP1 constant,
// the conv-preserves-NAP check and level sets of peak lists.

#include <algorithm>
#include <cmath>
#include <optional>
#include <numeric>
#include <tuple>
#include <variant>
#include <string>
#include <vector>

#include "meyer/detail/quadrature.hpp"
#include "meyer/mixed_view.hpp"
#include "meyer/transform.hpp"

namespace meyer {

/// Largest gap between consecutive sorted coordinates, maximised over axes.
inline double max_gap(const std::vector<Vector>& pts) {
  if (pts.size() < 2) return 0.0;
  const std::size_t n = pts.front().size();
  double g = 0;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> c;
    for (const auto& p : pts) c.push_back(p[i]);
    std::sort(c.begin(), c.end());
    for (std::size_t j = 1; j < c.size(); ++j) g = std::max(g, c[j] - c[j - 1]);
  }
  return g;
}

/// sup over all translates s of #(L ∩ (s + box)) in the full space.
inline double lattice_box_norm(const Lattice& L, const Box& box) {
  const int N = L.dim();
  if (box.dim() != N) throw Error(ErrorCode::InvalidArgument, "box dimension must equal the lattice dimension");
  double fd = 0;
  for (int j = 0; j < N; ++j) fd += L.basis().col(j).norm();
  double corner = 0;
  for (unsigned mask = 0; mask < (1u << N); ++mask) {
    double s = 0;
    for (int i = 0; i < N; ++i) s += std::pow((mask >> i) & 1u ? box.hi[i] : box.lo[i], 2);
    corner = std::max(corner, std::sqrt(s));
  }
  const double R = corner + fd + 1e-9;
  std::vector<Atom> atoms;
  L.for_each_in_box(Vector(N, -R), Vector(N, R), [&](const double* v) {
    if (norm(v, N) <= R) atoms.push_back({Vector(v, v + N), 1.0});
  });
  return k_norm(AtomicMeasure(N, std::move(atoms), R), box);
}

// Integer ranges enter box norms padded by this much; a closed interval of
// length k + 2 * pad < k + 1 still meets at most k + 1 integers.
inline constexpr double kDiscretePad = 0.4;

/// Internal box (real part dilated by delta, discrete bounding box) of a weight.
inline Box internal_support_box(const WeightProfile& h, double delta) {
  if (!h.compactly_supported()) throw Error(ErrorCode::InvalidArgument, "weight must be compactly supported");
  Box b = h.real_support();
  for (auto& v : b.lo) v -= delta;
  for (auto& v : b.hi) v += delta;
  const auto disc = h.discrete_support();
  for (int i = 0; i < h.z(); ++i) {
    long long lo = disc.empty() ? 0 : disc.front()[i], hi = lo;
    for (const auto& d : disc) {
      lo = std::min(lo, d[i]);
      hi = std::max(hi, d[i]);
    }
    b.lo.push_back(lo - kDiscretePad);
    b.hi.push_back(hi + kDiscretePad);
  }
  return b;
}

inline Box product_box(const Box& a, const Box& b) {
  Box r = a;
  r.lo.insert(r.lo.end(), b.lo.begin(), b.lo.end());
  r.hi.insert(r.hi.end(), b.hi.begin(), b.hi.end());
  return r;
}

/// Bound on ||T_t omega_h - omega_h||_K valid for every t in L with |t*_real| < delta, t*_discrete = 0.
inline double comb_period_bound(const EuclideanCPS& cps, const WeightProfile& h, const Box& K, double delta) {
  const double N = lattice_box_norm(cps.lattice, product_box(K, internal_support_box(h, delta)));
  return N * h.modulus_of_continuity(delta);
}

/// Lattice points t with |t|_inf <= T, |t*_real| < delta and t*_discrete = 0.
inline std::vector<Vector> certified_comb_candidates(const EuclideanCPS& cps, double T, double delta) {
  const int n = cps.n(), m = cps.m(), z = cps.z();
  const double side = delta / std::sqrt(static_cast<double>(std::max(m, 1)));
  Vector lo(n, -T), hi(n, T);
  for (int i = 0; i < m; ++i) {
    lo.push_back(-side);
    hi.push_back(side);
  }
  for (int i = 0; i < z; ++i) {
    lo.push_back(-0.5);
    hi.push_back(0.5);
  }
  std::vector<Vector> out;
  cps.lattice.for_each_in_box(lo, hi, [&](const double* v) {
    if (norm(v + n, m) < delta) out.emplace_back(v, v + n);
  });
  std::sort(out.begin(), out.end());
  return out;
}

struct PeriodCertificate {
  EuclideanCPS cps;
  WeightProfile h;
  double delta = 0;
};

struct AlmostPeriodSet {
  double eps = 0;
  Box K;
  double T = 0;
  std::vector<Vector> periods;
  std::vector<double> distances;
  double max_gap = 0;
  bool certified = false;
  double delta = 0;
  double certified_bound = 0;  // bound predicted for every certified candidate
  std::vector<Vector> certified_periods;
  std::vector<double> certified_distances;
};

/// P_eps^K(mu) within [-T, T]^n from atom differences; with a certificate also
/// the CPS candidates Lambda(B_delta) and their measured distances.
inline AlmostPeriodSet find_almost_periods(const AtomicMeasure& mu, double eps, const Box& K, double T,
                                           const std::optional<PeriodCertificate>& cert = std::nullopt) {
  if (!(eps >= 0) || !(T >= 0)) throw Error(ErrorCode::InvalidArgument, "eps and T must be non-negative");
  if (mu.truncation_radius() < T + K.diameter())
    throw Error(ErrorCode::WindowTooLarge, "truncation radius must be at least T + diam(K)");
  const int n = mu.n();
  AlmostPeriodSet out;
  out.eps = eps;
  out.K = K;
  out.T = T;
  std::vector<Atom> diffs{{Vector(n, 0.0), 1.0}};
  const auto& at = mu.atoms();
  for (std::size_t i = 0; i < at.size(); ++i)
    for (std::size_t j = 0; j < at.size(); ++j) {
      if (i == j) continue;
      Vector d(n);
      bool inside = true;
      for (int k = 0; k < n && inside; ++k) {
        d[k] = at[i].x[k] - at[j].x[k];
        inside = std::abs(d[k]) <= T;
      }
      if (inside) diffs.push_back({std::move(d), 1.0});
    }
  const AtomicMeasure cand(n, std::move(diffs), std::vector<SafeBall>{});
  auto distance = [&](const Vector& t) { return norm_distance(mu.translated(t), mu, K); };
  for (const auto& c : cand.atoms()) {
    const double d = distance(c.x);
    if (d < eps || d <= 1e-12) {
      out.periods.push_back(c.x);
      out.distances.push_back(d);
    }
  }
  out.max_gap = max_gap(out.periods);
  if (cert) {
    out.certified = true;
    out.delta = cert->delta;
    out.certified_bound = comb_period_bound(cert->cps, cert->h, K, cert->delta);
    out.certified_periods = certified_comb_candidates(cert->cps, T, cert->delta);
    for (const auto& t : out.certified_periods) out.certified_distances.push_back(distance(t));
  }
  return out;
}

struct AP1Constant {
  Box K;
  Box W;                   // discrete window bounding box (dimension z; empty when z = 0)
  int d = 1;
  double lattice_factor = 0;
  double series = 0;
  double series_tail = 0;  // certified bound on |series - true sum|
  double value = 0;
};

namespace detail {

/// Sum over n in Z^d of sup over n + [-1/2, 1/2]^d of 1 / (1 + |z|^{2d}),
/// with a bound on the neglected part.
inline std::pair<double, double> ap1_series(int d) {
  if (d < 1) throw Error(ErrorCode::InvalidArgument, "the Schwartz factor needs d >= 1");
  if (d == 1) {
    // partial sum, remainder bracketed between two integrals of 1/(1+x^2)
    const long S = 100000;
    double s = 0;
    for (long k = S; k >= 1; --k) {
      const double x = k - 0.5;
      s += 1.0 / (1.0 + x * x);
    }
    const double upper = kPi / 2 - std::atan(S - 0.5), lower = kPi / 2 - std::atan(S + 0.5);
    return {1.0 + 2.0 * (s + 0.5 * (upper + lower)), upper - lower};
  }
  // box shells |n|_inf <= S; remainder <= 2 * 3^{d-1} * (S - 1/2)^{-d}
  const long S = static_cast<long>((std::pow(2e7, 1.0 / d) - 1) / 2);
  if (S < 3) throw Error(ErrorCode::UnsupportedDimension, "series too expensive in this dimension");
  double total = 0;
  std::vector<long> idx(d, -S);
  while (true) {
    double r2 = 0;
    for (long v : idx) {
      const double c = std::max(std::abs(static_cast<double>(v)) - 0.5, 0.0);
      r2 += c * c;
    }
    total += 1.0 / (1.0 + std::pow(r2, d));
    int j = 0;
    while (j < d && idx[j] == S) idx[j++] = -S;
    if (j == d) break;
    ++idx[j];
  }
  return {total, 2.0 * std::pow(3.0, d - 1) * std::pow(S - 0.5, -d)};
}

}  // namespace detail

/// C(K, W) = ||delta_L||_{K x [-1/2,1/2]^d x W} * series; d = m of the scheme.
inline AP1Constant ap1_constant(const EuclideanCPS& cps, const Box& K, const Box& W) {
  const int d = cps.m();
  if (W.dim() != cps.z()) throw Error(ErrorCode::InvalidArgument, "W must live in the discrete factor");
  AP1Constant c;
  c.K = K;
  c.W = W;
  c.d = d;
  Box cube{Vector(d, -0.5), Vector(d, 0.5)};
  Box Wp = W;
  for (int i = 0; i < W.dim(); ++i) {
    Wp.lo[i] = std::ceil(W.lo[i] - 1e-9) - kDiscretePad;
    Wp.hi[i] = std::floor(W.hi[i] + 1e-9) + kDiscretePad;
  }
  c.lattice_factor = lattice_box_norm(cps.lattice, product_box(product_box(K, cube), Wp));
  std::tie(c.series, c.series_tail) = detail::ap1_series(d);
  c.value = c.lattice_factor * c.series;
  return c;
}

struct AP1Report {
  AP1Constant C;
  double lhs = 0;
  double psi_sup = 0;
  double phi_weighted_sup = 0;  // sup (1 + x^2) |phi(x)|
  double rhs = 0;
  double slack = 0;
  std::size_t points = 0;
  bool pass = false;
};

/// sup over x of (1 + x^2) |phi(x)|.
inline double weighted_gaussian_sup(const Gaussian1D& phi) {
  if (phi.poly.size() == 1) {
    // (1 + x^2) e^{-x^2/s}, s = sigma^2/pi, peaks at x^2 = s - 1 when s > 1
    const double s = phi.sigma * phi.sigma / kPi;
    return std::abs(phi.poly[0]) * (s > 1 ? s * std::exp(-(s - 1) / s) : 1.0);
  }
  const double X = 12 * phi.sigma + 12;
  double best = 0;
  for (double x = -X; x <= X; x += 1e-4 * (1 + phi.sigma)) best = std::max(best, (1 + x * x) * std::abs(phi(x)));
  return best;
}

/// ||omega_{phi (x) psi}||_K on a patch against C ||psi||_inf ||(1+x^2) phi||_inf.
/// Internal space R x Z^z; the patch extends `margin` beyond K.
inline AP1Report check_ap1_bound(const EuclideanCPS& cps, const Gaussian1D& phi, const DiscreteProfile& psi, const Box& K,
                                 double margin = 10.0) {
  if (cps.m() != 1) throw Error(ErrorCode::UnsupportedDimension, "AP1 check implemented for d = 1");
  const int n = cps.n(), z = cps.z();
  if (psi.values.empty()) throw Error(ErrorCode::InvalidArgument, "psi is zero");
  AP1Report r;
  Box W{Vector(z, HUGE_VAL), Vector(z, -HUGE_VAL)};
  for (const auto& [u, v] : psi.values)
    for (int i = 0; i < z; ++i) {
      W.lo[i] = std::min(W.lo[i], static_cast<double>(u[i]));
      W.hi[i] = std::max(W.hi[i], static_cast<double>(u[i]));
    }
  r.C = ap1_constant(cps, K, W);
  r.psi_sup = psi.sup();
  r.phi_weighted_sup = weighted_gaussian_sup(phi);
  r.rhs = r.C.value * r.psi_sup * r.phi_weighted_sup;

  double R = 0;
  for (int i = 0; i < n; ++i) R += std::pow(std::max(std::abs(K.lo[i]), std::abs(K.hi[i])), 2);
  R = std::sqrt(R) + K.diameter() + margin;
  // beyond |x*| = cut the Gaussian is below e^{-45} of its polynomial factor
  const double cut = phi.sigma * std::sqrt(45.0 / kPi) + 1.0;
  Vector lo(n, -R), hi(n, R);
  lo.push_back(-cut);
  hi.push_back(cut);
  for (int i = 0; i < z; ++i) {
    lo.push_back(W.lo[i] - 1e-9);
    hi.push_back(W.hi[i] + 1e-9);
  }
  std::vector<Atom> atoms;
  cps.lattice.for_each_in_box(lo, hi, [&](const double* v) {
    if (norm(v, n) > R) return;
    const Complex w = phi(v[n]) * psi(v + n + 1, z);
    if (w != 0.0) atoms.push_back({Vector(v, v + n), w});
  });
  r.points = atoms.size();
  r.lhs = k_norm(AtomicMeasure(n, std::move(atoms), R), K);
  r.slack = r.rhs - r.lhs;
  r.pass = r.lhs <= r.rhs;
  return r;
}

/// Bound on |d/dk h_check| over |k| >= rho for m = 1 box-chain weights.
inline double transform_derivative_envelope(const WeightProfile& h, double rho) {
  if (h.m() != 1) throw Error(ErrorCode::UnsupportedDimension, "derivative envelope implemented for m = 1");
  double total = 0;
  for (const auto& t : h.terms()) {
    const auto* c = std::get_if<BoxChain>(&t.real[0]);
    if (!c) throw Error(ErrorCode::InvalidArgument, "derivative envelope needs box-chain factors");
    total += std::abs(t.coeff) * (h.z() > 0 ? t.discrete.l1() : 1.0) * c->derivative_envelope(rho);
  }
  return total;
}

namespace detail {

/// sum_{j >= j0} f(j) for f with f(rho) rho^p non-increasing beyond the summed range.
template <class F>
double shell_sum(F&& f, long j0, int p, long J = 20000) {
  double s = 0;
  for (long j = std::max(j0, 0L); j < J; ++j) s += f(static_cast<double>(j));
  if (p < 2) throw Error(ErrorCode::InvalidArgument, "envelope decays too slowly for a shell sum");
  return s + f(static_cast<double>(J)) * static_cast<double>(J) / (p - 1);
}

}  // namespace detail

/// Almost periods of omega_hat_h from the dual scheme: dual points t with |t|_inf <= T, |t*| < delta.
struct SpectralPeriods {
  double delta = 0;
  double bound = 0;       // sup over certified t of ||T_t omega_hat - omega_hat||_K1 (true measure)
  double truncation = 0;  // extra allowance for peaks missing from a finite list
  std::vector<Vector> periods;
  std::vector<double> stars;
};

/// delta * sum_shells 2 N dens D(j - delta), N = ||delta_dual||_{K1 x [0,1]}.
inline double spectral_period_bound(const EuclideanCPS& cps, const WeightProfile& h, const Box& K1, double delta) {
  if (cps.m() != 1 || cps.z() != 0) throw Error(ErrorCode::UnsupportedDimension, "spectral periods need m = 1, z = 0");
  const DualCPS dual = dual_cps(cps);
  const double N = lattice_box_norm(dual.lattice, product_box(K1, interval(0.0, 1.0)));
  const double dens = cps.density();
  const double s = detail::shell_sum(
      [&](double j) { return 2 * N * dens * transform_derivative_envelope(h, std::max(0.0, j - delta)); }, 0,
      h.decay_order());
  return delta * s;
}

/// Largest delta (up to delta_max) whose spectral bound stays below `level`, and the periods it certifies.
inline SpectralPeriods spectral_almost_periods(const EuclideanCPS& cps, const WeightProfile& h, const Box& K1, double T,
                                               double level, const PeakList* peaks = nullptr, double delta_max = 0.5) {
  if (!(level > 0)) throw Error(ErrorCode::InvalidArgument, "level must be positive");
  SpectralPeriods sp;
  double lo = 0, hi = delta_max;
  if (spectral_period_bound(cps, h, K1, hi) < level) lo = hi;
  else
    for (int it = 0; it < 50; ++it) {
      const double mid = 0.5 * (lo + hi);
      (spectral_period_bound(cps, h, K1, mid) < level ? lo : hi) = mid;
    }
  sp.delta = lo;
  sp.bound = lo > 0 ? spectral_period_bound(cps, h, K1, lo) : 0.0;
  if (peaks) {
    // peaks beyond the internal cutoff or below the floor, counted for mu and its translate
    const DualCPS dual = dual_cps(cps);
    const double N = lattice_box_norm(dual.lattice, product_box(K1, interval(0.0, 1.0)));
    const double dens = cps.density();
    const long B = static_cast<long>(std::floor(peaks->internal_cutoff));
    const double beyond =
        detail::shell_sum([&](double j) { return 2 * N * dens * h.envelope(j); }, B, h.decay_order());
    sp.truncation = 2 * (beyond + 2 * N * (B + 1) * peaks->amp_floor);
  }
  if (lo == 0) return sp;
  const DualCPS dual = dual_cps(cps);
  for_each_dual_point(dual, T, lo, [&](const double* v) {
    if (std::abs(v[1]) < lo) {
      sp.periods.push_back({v[0]});
      sp.stars.push_back(v[1]);
    }
  });
  std::vector<std::size_t> idx(sp.periods.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return sp.periods[a] < sp.periods[b]; });
  SpectralPeriods sorted = sp;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    sorted.periods[i] = sp.periods[idx[i]];
    sorted.stars[i] = sp.stars[idx[i]];
  }
  return sorted;
}

/// Peak list as an atomic measure complete within |k| <= K_max.
inline AtomicMeasure peaks_measure(const PeakList& peaks) {
  std::vector<Atom> atoms;
  atoms.reserve(peaks.size());
  for (std::size_t i = 0; i < peaks.size(); ++i) atoms.push_back({peaks.k_vec(i), peaks.amp(i)});
  return AtomicMeasure(peaks.n, std::move(atoms), peaks.K_max);
}

struct ConvNapReport {
  double eps = 0;
  double nu_mass = 0;
  double threshold = 0;  // eps / (1 + 2 |nu|)
  bool certified = false;
  double delta = 0, bound = 0, truncation = 0;
  std::vector<Vector> periods;
  std::vector<double> mu_distance;    // ||T_t mu - mu||_K
  std::vector<double> conv_distance;  // ||T_t(mu * nu) - mu * nu||_K on the evaluation window
  std::size_t failures = 0;
  bool pass = false;
};

namespace detail {

/// Hull of E and E - t, so that T_t(view) - view is exact on E.
inline Box pull_back_hull(const Box& E, double t) {
  return Box{{std::min(E.lo[0], E.lo[0] - t)}, {std::max(E.hi[0], E.hi[0] - t)}};
}

template <class ViewOn>
void finish_conv_nap(ConvNapReport& r, ViewOn&& view_on, const Box& E, const Box& K, double step) {
  for (const auto& t : r.periods) {
    const MixedMeasureView v = view_on(pull_back_hull(E, t[0]));
    const double d = k_norm(v.translated(t[0]) - v, K, step).value;
    r.conv_distance.push_back(d);
    if (!(d < r.eps)) ++r.failures;
  }
  r.pass = r.failures == 0;
}

}  // namespace detail

/// Measured almost periods of an atomic mu at level eps / (1 + 2|nu|), then
/// ||T_t(mu * nu) - mu * nu||_K over translates of K inside eval_window (n = 1).
inline ConvNapReport check_conv_nap(const AtomicMeasure& mu, const FiniteMixedMeasure& nu, double eps, const Box& K,
                                    double T, const Box& eval_window, double step = 0.01) {
  if (mu.n() != 1) throw Error(ErrorCode::UnsupportedDimension, "conv-NAP check implemented for n = 1");
  ConvNapReport r;
  r.eps = eps;
  r.nu_mass = nu.total_variation();
  r.threshold = eps / (1 + 2 * r.nu_mass);
  const auto ap = find_almost_periods(mu, r.threshold, K, T);
  r.periods = ap.periods;
  r.mu_distance = ap.distances;
  detail::finish_conv_nap(r, [&](const Box& W) { return convolve(mu, nu, W); }, eval_window, K, step);
  return r;
}

/// Certified almost periods of omega_hat_h (dual points with small |t*|) and the
/// convolution distance of the peak list with nu over translates of K inside eval_window.
inline ConvNapReport check_conv_nap(const EuclideanCPS& cps, const WeightProfile& h, const PeakList& peaks,
                                    const FiniteMixedMeasure& nu, double eps, const Box& K, double T,
                                    const Box& eval_window, double step = 0.01) {
  if (peaks.n != 1) throw Error(ErrorCode::UnsupportedDimension, "conv-NAP check implemented for n = 1");
  ConvNapReport r;
  r.eps = eps;
  r.nu_mass = nu.total_variation();
  r.threshold = eps / (1 + 2 * r.nu_mass);
  const auto sp = spectral_almost_periods(cps, h, K, T, r.threshold, &peaks);
  r.certified = true;
  r.delta = sp.delta;
  r.bound = sp.bound;
  r.truncation = sp.truncation;
  r.periods = sp.periods;
  const auto mu = peaks_measure(peaks);
  if (mu.truncation_radius() < T + K.diameter() + std::max(std::abs(K.lo[0]), std::abs(K.hi[0])))
    throw Error(ErrorCode::WindowTooLarge, "peak list too short for T and K");
  for (const auto& t : r.periods) r.mu_distance.push_back(norm_distance(mu.translated(t), mu, K));
  detail::finish_conv_nap(r, [&](const Box& W) { return convolve_peaks(peaks, nu, W); }, eval_window, K, step);
  return r;
}

struct LevelSet {
  double a = 0;
  std::vector<Vector> points;
  std::vector<double> intensities;
  double max_gap = 0;
  bool cross_checked = false;
  bool cross_check_pass = false;
  double window_radius = 0;  // internal radius bounding {dens |h_check| >= sqrt(a)}
  std::size_t model_set_size = 0;
};

/// {k : |amp(k)|^2 >= a} from a peak list; with the source scheme the set is
/// matched against the dual model set with window [-rho_a, rho_a]^m.
inline LevelSet level_set(const PeakList& peaks, double a, const EuclideanCPS* source = nullptr) {
  if (!(a > 0) || !std::isfinite(a)) throw Error(ErrorCode::InvalidThreshold, "threshold must be positive and finite");
  LevelSet ls;
  ls.a = a;
  for (std::size_t i = 0; i < peaks.size(); ++i)
    if (peaks.intensity(i) >= a) {
      ls.points.push_back(peaks.k_vec(i));
      ls.intensities.push_back(peaks.intensity(i));
    }
  ls.max_gap = max_gap(ls.points);
  if (!source || source->z() != 0 || source->m() < 1 || !peaks.tail.weight_envelope) return ls;
  const double rho = envelope_cutoff(peaks.tail.weight_envelope, source->density(), std::sqrt(a));
  ls.window_radius = rho;
  // the list must contain every dual point in that window
  if (rho > peaks.internal_cutoff || std::sqrt(a) <= peaks.amp_floor) return ls;
  ls.cross_checked = true;
  const DualCPS dual = dual_cps(*source);
  const int m = source->m();
  const double r = std::max(rho, 1e-9);
  const Window w{{Box{Vector(m, -r), Vector(m, r)}}, {}, 0.0};
  const auto ms = enumerate_model_set(EuclideanCPS{dual.lattice}, w, peaks.K_max);
  ls.model_set_size = ms.size();
  std::vector<Vector> expected;
  for (const auto& p : ms) {
    const auto i = peaks.find(p.x);
    if (i && peaks.intensity(*i) >= a) expected.push_back(p.x);
  }
  std::sort(expected.begin(), expected.end());
  auto got = ls.points;
  std::sort(got.begin(), got.end());
  ls.cross_check_pass = expected.size() == got.size();
  for (std::size_t i = 0; ls.cross_check_pass && i < got.size(); ++i)
    for (std::size_t j = 0; j < got[i].size(); ++j)
      if (std::abs(got[i][j] - expected[i][j]) > 1e-9) ls.cross_check_pass = false;
  return ls;
}

}  // namespace meyer
