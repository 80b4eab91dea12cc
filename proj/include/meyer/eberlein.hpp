#pragma once

// Ping-pong synthesis gamma = nu_check * omega, its generalized Eberlein
// split, the two ping-pong identities, and the polarization split into
// positive definite combs.

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "meyer/detail/quadrature.hpp"
#include "meyer/transform.hpp"

namespace meyer {

struct PingPongSystem {
  EuclideanCPS cps;
  Window window;
  WeightProfile h;
  double R = 0;
  std::vector<CombPoint> points;  // supp(omega) within B_R, sorted by x
  AtomicMeasure omega;
  PeakList omega_hat;
  double U = 0;  // 0.99 * minimal gap of supp(omega)

  /// Star of an atom of omega, if x is one.
  std::optional<Vector> star_of(const Vector& x) const {
    auto it = std::lower_bound(points.begin(), points.end(), x,
                               [](const CombPoint& c, const Vector& v) { return c.p.x < v; });
    for (; it != points.end(); ++it) {
      double d = 0;
      for (std::size_t i = 0; i < x.size(); ++i) d = std::max(d, std::abs(it->p.x[i] - x[i]));
      if (d <= 1e-9) return it->p.star;
      if (it->p.x[0] > x[0] + 1e-9) break;
    }
    return std::nullopt;
  }
};

inline double minimal_gap(const std::vector<CombPoint>& pts) {
  double best = HUGE_VAL;
  const std::size_t N = pts.size();
  // sorted by first coordinate: stop once that coordinate alone exceeds the best gap
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = i + 1; j < N && pts[j].p.x[0] - pts[i].p.x[0] < best; ++j) {
      double s = 0;
      for (std::size_t d = 0; d < pts[i].p.x.size(); ++d) s += std::pow(pts[j].p.x[d] - pts[i].p.x[d], 2);
      best = std::min(best, std::sqrt(s));
    }
  return best;
}

/// Builds omega = omega_h on B_R and its peak list. h must equal 1 on the window.
inline PingPongSystem make_pingpong_system(const EuclideanCPS& cps, const Window& window, const WeightProfile& h,
                                           double R, double K_max, double amp_floor = -1,
                                           std::optional<double> internal_cutoff = std::nullopt) {
  PingPongSystem s{cps, window, h, R, comb_points(cps, h, R), {}, {}, 0.0};
  std::vector<Atom> atoms;
  for (const auto& c : s.points) {
    if (window.contains(c.p.star.data(), cps.m(), cps.z()) && std::abs(c.w - 1.0) > 1e-12)
      throw Error(ErrorCode::InvalidArgument, "bump is not 1 on the window");
    atoms.push_back({c.p.x, c.w});
  }
  if (s.points.size() < 2) throw Error(ErrorCode::InvalidArgument, "patch too small to estimate U");
  s.omega = AtomicMeasure(cps.n(), std::move(atoms), R);
  s.omega_hat = transform_comb(cps, h, K_max, amp_floor, internal_cutoff);
  s.U = 0.99 * minimal_gap(s.points);
  return s;
}

/// Probe f = c * (box * box) per coordinate with half-width a = scale * U / (5 sqrt n),
/// normalized so (f * f~)(0) = 1. Returns f * f~.
inline WeightProfile probe_correlation(double U, int n, double scale = 1.0) {
  const double a = scale * U / (5.0 * std::sqrt(static_cast<double>(n)));
  std::vector<BoxChain> chains(n, BoxChain({{-a, a}, {-a, a}, {-a, a}, {-a, a}}));
  return bspline_profile(std::move(chains), std::pow(3.0 / (16.0 * a * a * a), n));
}

/// gamma = nu_check * omega on supp(omega) within B_R.
inline AtomicMeasure synthesize_gamma(const PingPongSystem& sys, const FiniteMixedMeasure& nu, double R) {
  if (R > sys.R) throw Error(ErrorCode::InvalidArgument, "radius exceeds the system patch");
  std::vector<Atom> atoms;
  for (const auto& a : sys.omega.atoms())
    if (norm(a.x) <= R * (1 + 1e-14)) atoms.push_back({a.x, nu.transform(a.x) * a.w});
  AtomicMeasure g(sys.cps.n(), std::move(atoms), R);
  g.provenance = "ping-pong synthesis";
  return g;
}

struct EberleinTriple {
  AtomicMeasure gamma, gamma_s, gamma_0a, gamma_0s;
  MixedMeasureView hat_pp, hat_ac, hat_sc;  // omega_hat * nu_alpha on the evaluation window
  double reconstruction_residual = 0;       // max |gamma_s + gamma_0a + gamma_0s - gamma|
  double support_violation = 0;             // max distance of an atom's star outside supp(h)
};

inline EberleinTriple eberlein_decompose(const PingPongSystem& sys, const FiniteMixedMeasure& nu, double R,
                                         const Box& eval_window) {
  EberleinTriple t;
  t.gamma = synthesize_gamma(sys, nu, R);
  t.gamma_s = synthesize_gamma(sys, nu.pp_part(), R);
  t.gamma_0a = synthesize_gamma(sys, nu.ac_part(), R);
  t.gamma_0s = synthesize_gamma(sys, nu.sc_part(), R);
  const auto& g = t.gamma.atoms();
  const auto& a = t.gamma_s.atoms();
  const auto& b = t.gamma_0a.atoms();
  const auto& c = t.gamma_0s.atoms();
  if (a.size() != g.size() || b.size() != g.size() || c.size() != g.size())
    throw Error(ErrorCode::InvalidArgument, "component atoms do not line up");
  const Box supp = sys.h.real_support();
  for (std::size_t i = 0; i < g.size(); ++i) {
    t.reconstruction_residual = std::max(t.reconstruction_residual, std::abs(a[i].w + b[i].w + c[i].w - g[i].w));
    const auto star = sys.star_of(g[i].x);
    if (!star) {
      t.support_violation = HUGE_VAL;
      continue;
    }
    t.support_violation = std::max(t.support_violation, supp.distance(star->data()));
  }
  t.hat_pp = convolve_peaks(sys.omega_hat, nu.pp_part(), eval_window);
  t.hat_ac = convolve_peaks(sys.omega_hat, nu.ac_part(), eval_window);
  t.hat_sc = convolve_peaks(sys.omega_hat, nu.sc_part(), eval_window);
  return t;
}

/// S(x) = sum over peaks of amp * e^{2 pi i y x}, cached at Gauss-Legendre
/// nodes of equal panels on [lo, hi] (n = 1). Integrals of f(x) S(x) then
/// pair f against the peak list.
class SpectralSampler {
 public:
  SpectralSampler(const PeakList& peaks, double lo, double hi, double panel = 0.125, int q = 16)
      : peaks_(&peaks), lo_(lo) {
    if (peaks.n != 1) throw Error(ErrorCode::UnsupportedDimension, "spectral sampler is one-dimensional");
    panels_ = std::max(1, static_cast<int>(std::ceil((hi - lo) / panel - 1e-9)));
    width_ = (hi - lo) / panels_;
    const auto rule = detail::gauss_legendre(q);
    q_ = q;
    for (int j = 0; j < q; ++j) {
      offsets_.push_back(0.5 * width_ * (rule.nodes[j] + 1.0));
      weights_.push_back(0.5 * width_ * rule.weights[j]);
    }
    S_.assign(static_cast<std::size_t>(panels_) * q, 0.0);
    std::vector<Complex> E(q);
    for (std::size_t i = 0; i < peaks.size(); ++i) {
      const double y = peaks.k(i)[0];
      const Complex amp = peaks.amp(i);
      for (int j = 0; j < q; ++j) E[j] = amp * std::polar(1.0, 2 * kPi * y * offsets_[j]);
      const Complex step = std::polar(1.0, 2 * kPi * y * width_);
      Complex cur = std::polar(1.0, 2 * kPi * y * lo_);
      for (int p = 0; p < panels_; ++p) {
        Complex* row = &S_[static_cast<std::size_t>(p) * q];
        for (int j = 0; j < q; ++j) row[j] += cur * E[j];
        cur *= step;
        if ((p & 31) == 31) cur /= std::abs(cur);
      }
    }
  }

  double lo() const { return lo_; }
  double hi() const { return lo_ + panels_ * width_; }
  const PeakList& peaks() const { return *peaks_; }

  /// \int_{[a,b]} f S with f evaluated only at nodes in panels meeting [a, b].
  template <class F>
  Complex integrate(F&& f, double a, double b) const {
    if (a < lo() - 1e-9 || b > hi() + 1e-9) throw Error(ErrorCode::InvalidArgument, "range outside the sampler grid");
    const int p0 = std::max(0, static_cast<int>(std::floor((a - lo_) / width_ + 1e-9)));
    const int p1 = std::min(panels_, static_cast<int>(std::ceil((b - lo_) / width_ - 1e-9)));
    Complex s = 0;
    for (int p = p0; p < p1; ++p) {
      const double x0 = lo_ + p * width_;
      for (int j = 0; j < q_; ++j) s += weights_[j] * f(x0 + offsets_[j]) * S_[static_cast<std::size_t>(p) * q_ + j];
    }
    return s;
  }

 private:
  const PeakList* peaks_;
  double lo_, width_ = 0;
  int panels_ = 0, q_ = 0;
  std::vector<double> offsets_, weights_;
  std::vector<Complex> S_;
};

/// <gamma, g> against <omega_hat * nu, g_check>. Point-mass nu uses closed-form
/// transforms at the peaks; continuous parts go through the sampler (n = 1).
inline PairingReport spectral_pairing(const AtomicMeasure& gamma, const PeakList& peaks, const FiniteMixedMeasure& nu,
                                      const WeightProfile& g, double tolerance, std::string id = "g",
                                      const SpectralSampler* sampler = nullptr) {
  if (!gamma.region_contains_box(g.real_support()))
    throw Error(ErrorCode::InvalidArgument, "supp(g) leaves the region where gamma is complete");
  Complex lhs = 0;
  for (const auto& a : gamma.atoms()) lhs += a.w * g(a.x.data());
  const double mass = nu.total_variation();
  const double r = nu.support_radius();
  auto E = [&](double rho) { return mass * g.envelope(std::max(0.0, rho - r)); };
  const bool continuous = !nu.ac().empty() || !nu.sc().empty();
  if (!continuous) {
    const int n = peaks.n;
    Vector y(n);
    auto G = [&](const double* k) {
      Complex s = 0;
      for (const auto& p : nu.pp()) {
        for (int i = 0; i < n; ++i) y[i] = k[i] + p.x[i];
        s += p.mass * g.transform(y.data());
      }
      return s;
    };
    return pairing_against_peaks(lhs, peaks, G, E, tolerance, std::move(id));
  }
  if (!sampler || &sampler->peaks() != &peaks)
    throw Error(ErrorCode::InvalidArgument, "continuous spectral parts need a sampler over these peaks");
  PairingReport rep;
  rep.test_id = std::move(id);
  rep.lhs = lhs;
  rep.tolerance = tolerance;
  rep.rhs_tail = peaks.tail.bound(E) + peaks.discarded_bound(E);
  if (rep.rhs_tail > tolerance / 2)
    throw Error(ErrorCode::InsufficientPeakCoverage,
                "rhs tail bound " + std::to_string(rep.rhs_tail) + " exceeds tolerance/2");
  const Box s = g.real_support();
  rep.rhs = sampler->integrate(
      [&](double x) {
        const Complex gx = g(&x);
        return gx == 0.0 ? Complex(0) : gx * nu.transform(x);
      },
      s.lo[0], s.hi[0]);
  rep.pass = rep.residual() <= tolerance + rep.rhs_tail;
  return rep;
}

struct PingPongOptions {
  const PingPongSystem* multiplier = nullptr;  // system whose omega multiplies; defaults to the synthesis system
  double probe_scale = 1.0;                    // > 1.25 breaks supp(f * f~) inside the U-ball
  const SpectralSampler* sampler = nullptr;
};

struct PingPongReport {
  double direct_residual = 0;
  std::size_t atoms_checked = 0;
  bool direct_pass = false;
  std::vector<PairingReport> spectral;
  bool spectral_pass = true;
  std::string failed;  // "direct", "spectral", "direct+spectral" or empty
  bool pass() const { return failed.empty(); }
};

/// (a) (gamma * f * f~) . omega = gamma at every atom whose U-neighbourhood is
/// inside gamma's region; (b) <gamma, g> = <omega_hat * nu, g_check> for each g.
inline PingPongReport pingpong_verify(const PingPongSystem& sys, const AtomicMeasure& gamma,
                                      const FiniteMixedMeasure& nu, double tolerance,
                                      const std::vector<WeightProfile>& tests, const PingPongOptions& opt = {}) {
  const PingPongSystem& mult = opt.multiplier ? *opt.multiplier : sys;
  const int n = gamma.n();
  const WeightProfile ff = probe_correlation(mult.U, n, opt.probe_scale);
  const Box fs = ff.real_support();
  const double reach = std::max(-fs.lo[0], fs.hi[0]) * std::sqrt(static_cast<double>(n));
  PingPongReport rep;
  const auto& at = gamma.atoms();
  Vector d(n);
  for (std::size_t i = 0; i < at.size(); ++i) {
    Box nb{at[i].x, at[i].x};
    for (int j = 0; j < n; ++j) {
      nb.lo[j] -= reach;
      nb.hi[j] += reach;
    }
    if (!gamma.region_contains_box(nb)) continue;
    Complex conv = 0;
    for (std::size_t k = 0; k < at.size(); ++k) {
      bool near = true;
      for (int j = 0; j < n && near; ++j) {
        d[j] = at[i].x[j] - at[k].x[j];
        near = std::abs(d[j]) <= reach;
      }
      if (near) conv += at[k].w * ff(d.data());
    }
    const Complex lhs = conv * mult.omega.at(at[i].x);
    rep.direct_residual = std::max(rep.direct_residual, std::abs(lhs - at[i].w));
    ++rep.atoms_checked;
  }
  rep.direct_pass = rep.atoms_checked > 0 && rep.direct_residual <= 1e-9;
  for (std::size_t i = 0; i < tests.size(); ++i) {
    rep.spectral.push_back(
        spectral_pairing(gamma, sys.omega_hat, nu, tests[i], tolerance, "g" + std::to_string(i), opt.sampler));
    rep.spectral_pass = rep.spectral_pass && rep.spectral.back().pass;
  }
  if (!rep.direct_pass) rep.failed = "direct";
  if (!rep.spectral_pass) rep.failed += rep.failed.empty() ? "spectral" : "+spectral";
  return rep;
}

/// Internal weights u_j with omega_1 - omega_2 + i omega_3 - i omega_4 = omega_{g * h~}.
struct PolarizationSplit {
  std::array<WeightProfile, 4> weights;
  std::array<AtomicMeasure, 4> combs;
  std::array<PeakList, 4> peaks;
  WeightProfile combined;  // g * h~
};

inline std::array<WeightProfile, 4> polarization_weights(const WeightProfile& g, const WeightProfile& h) {
  const Complex I(0, 1);
  auto sq = [](const WeightProfile& u) { return Complex(0.25) * convolve(u, u.tilde()); };
  return {sq(g + h), sq(g - h), sq(g + I * h), sq(g - I * h)};
}

inline PolarizationSplit polarization_split(const EuclideanCPS& cps, const WeightProfile& g, const WeightProfile& h,
                                            double R, double K_max, double amp_floor = -1) {
  PolarizationSplit p;
  p.weights = polarization_weights(g, h);
  p.combined = convolve(g, h.tilde());
  for (int j = 0; j < 4; ++j) {
    p.combs[j] = make_comb(cps, p.weights[j], R);
    p.peaks[j] = transform_comb(cps, p.weights[j], K_max, amp_floor);
  }
  return p;
}

/// Checks that a finite measure is positive; throws NegativePart otherwise.
inline void require_positive(const FiniteMixedMeasure& nu, const std::string& name) {
  auto bad = [&](Complex c) { return c.real() < 0 || std::abs(c.imag()) > 1e-14 * (1 + std::abs(c)); };
  for (const auto& p : nu.pp())
    if (bad(p.mass)) throw Error(ErrorCode::NegativePart, name + " has a non-positive atom");
  for (const auto& a : nu.ac())
    if (bad(a.coeff)) throw Error(ErrorCode::NegativePart, name + " has a non-positive density");
  for (const auto& c : nu.sc())
    if (bad(c.mass)) throw Error(ErrorCode::NegativePart, name + " has a non-positive singular part");
}

struct PosdefDecomposition {
  std::array<AtomicMeasure, 4> gamma;
  double reconstruction_residual = 0;  // vs nu_check * omega_{g * h~}
  double pd_violation = 0;             // max over atoms of |f_j(x)| - f_j(0), clipped at 0
};

/// gamma_j built from f_j = check(nu_j) and the polarization combs:
/// rows (f1,f2,f3,f4) applied to (w1,w2,w4,w3), (w2,w1,w3,w4), (w3,w4,w1,w2), (w4,w3,w2,w1).
inline PosdefDecomposition posdef_decompose_gamma(const EuclideanCPS& cps, const PolarizationSplit& pol,
                                                  const std::array<FiniteMixedMeasure, 4>& parts, double R) {
  for (int j = 0; j < 4; ++j) require_positive(parts[j], "nu_" + std::to_string(j + 1));
  static constexpr int table[4][4] = {{0, 1, 3, 2}, {1, 0, 2, 3}, {2, 3, 0, 1}, {3, 2, 1, 0}};
  // table[row][j]: comb index multiplied by f_{j+1} in gamma_{row+1}
  const int n = cps.n();
  PosdefDecomposition out;
  std::array<double, 4> f0;
  for (int j = 0; j < 4; ++j) f0[j] = parts[j].transform(Vector(n, 0.0)).real();
  std::array<std::vector<Atom>, 4> atoms;
  for (int k = 0; k < 4; ++k) {
    for (const auto& a : pol.combs[k].atoms()) {
      if (norm(a.x) > R * (1 + 1e-14)) continue;
      std::array<Complex, 4> f;
      for (int j = 0; j < 4; ++j) {
        f[j] = parts[j].transform(a.x);
        out.pd_violation = std::max(out.pd_violation, std::abs(f[j]) - f0[j] * (1 + 1e-12));
      }
      for (int row = 0; row < 4; ++row)
        for (int j = 0; j < 4; ++j)
          if (table[row][j] == k) atoms[row].push_back({a.x, f[j] * a.w});
    }
  }
  for (int row = 0; row < 4; ++row) out.gamma[row] = AtomicMeasure(n, std::move(atoms[row]), R);
  const Complex I(0, 1);
  const AtomicMeasure recon = out.gamma[0] - out.gamma[1] + out.gamma[2].scaled(I) - out.gamma[3].scaled(I);
  std::vector<Atom> target;
  for (const auto& c : comb_points(cps, pol.combined, R)) {
    Complex f = parts[0].transform(c.p.x) - parts[1].transform(c.p.x) + I * parts[2].transform(c.p.x) -
                I * parts[3].transform(c.p.x);
    target.push_back({c.p.x, f * c.w});
  }
  const AtomicMeasure diff = recon - AtomicMeasure(n, std::move(target), R);
  for (const auto& a : diff.atoms()) out.reconstruction_residual = std::max(out.reconstruction_residual, std::abs(a.w));
  out.pd_violation = std::max(out.pd_violation, 0.0);
  return out;
}

}  // namespace meyer
