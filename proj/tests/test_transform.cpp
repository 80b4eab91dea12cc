#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "meyer/transform.hpp"
#include "oracles.hpp"

using namespace meyer;

namespace {

const double kTau = std::numbers::phi;

WeightProfile triangle_weight() { return bspline_profile({triangle_chain(-0.5, 0.5)}); }

WeightProfile fib_bump(double margin = 0.25) { return build_bump(interval_window(-1.0, kTau - 1.0), 1, 0, margin); }

/// Six unit boxes centred at c: a unit-mass test function on [c-3, c+3].
WeightProfile six_box(double c, Complex scale = 1.0) {
  std::vector<std::pair<double, double>> boxes(6, {-0.5, 0.5});
  boxes[0] = {c - 0.5, c + 0.5};
  return bspline_profile({BoxChain(boxes)}, scale);
}

}  // namespace

TEST(TransformComb, IntegerSquareTriangleIsDeltaZ) {
  const auto cps = integer_square_cps();
  const auto pl = transform_comb(cps, triangle_weight(), 5.0, 1e-9, 40.0);
  ASSERT_EQ(pl.size(), 11u);
  for (std::size_t i = 0; i < pl.size(); ++i) {
    EXPECT_NEAR(pl.k(i)[0], static_cast<double>(i) - 5.0, 1e-12);
    EXPECT_NEAR(pl.star(i)[0], 0.0, 1e-12);
    EXPECT_NEAR(pl.amp(i).real(), 1.0, 1e-12);
    EXPECT_NEAR(pl.amp(i).imag(), 0.0, 1e-12);
  }
  // the comb itself is delta_Z
  const auto mu = make_comb(cps, triangle_weight(), 10.0);
  ASSERT_EQ(mu.size(), 21u);
  for (const auto& a : mu.atoms()) EXPECT_NEAR(std::abs(a.w - 1.0), 0.0, 1e-12);
}

TEST(TransformComb, IntegerSquareBoxWeight) {
  const auto box = bspline_profile({BoxChain({{-0.5, 0.5}})});
  const auto pl = transform_comb(integer_square_cps(), box, 3.0, 1e-9, 50.0);
  ASSERT_EQ(pl.size(), 7u);
  for (std::size_t i = 0; i < pl.size(); ++i) EXPECT_NEAR(pl.amp(i).real(), 1.0, 1e-12);
}

TEST(TransformComb, ZeroPeakConservation) {
  const auto cps = fibonacci_cps();
  for (double margin : {0.1, 0.25, 0.4}) {
    const auto h = fib_bump(margin);
    const auto pl = transform_comb(cps, h, 3.0);
    const auto i0 = pl.find({0.0});
    ASSERT_TRUE(i0.has_value());
    const Box s = h.real_support();
    const double integral = oracle::simpson_pieces([&](double x) { return h(&x).real(); },
                                                   {s.lo[0], -1.0 - margin / 2, -1.0 + margin / 2,
                                                    kTau - 1.0 - margin / 2, kTau - 1.0 + margin / 2, s.hi[0]})
                                .real();
    const double expected = integral / std::sqrt(5.0);
    EXPECT_NEAR(pl.amp(*i0).real(), expected, 1e-9 * expected);
    EXPECT_NEAR(integral, kTau + 2 * margin, 1e-9);
  }
}

TEST(TransformComb, FloorAboveMaxGivesEmptyList) {
  const auto pl = transform_comb(fibonacci_cps(), fib_bump(), 3.0, 10.0, 50.0);
  EXPECT_EQ(pl.size(), 0u);
  EXPECT_GT(pl.discarded_mass(), 0.7);
}

TEST(TransformComb, HermitianAndBounded) {
  const auto h = fib_bump();
  const auto pl = transform_comb(fibonacci_cps(), h, 4.0);
  ASSERT_GT(pl.size(), 100u);
  const double dens = 1.0 / std::sqrt(5.0);
  for (std::size_t i = 0; i < pl.size(); i += 97) {
    EXPECT_LE(std::abs(pl.k(i)[0]), 4.0 + 1e-12);
    EXPECT_GE(std::abs(pl.amp(i)), pl.amp_floor);
    EXPECT_LE(std::abs(pl.amp(i)), dens * h.envelope(std::abs(pl.star(i)[0])) * (1 + 1e-12));
    const auto j = pl.find({-pl.k(i)[0]});
    ASSERT_TRUE(j.has_value());
    EXPECT_NEAR(std::abs(pl.amp(*j) - std::conj(pl.amp(i))), 0.0, 1e-12);
  }
}

TEST(TransformComb, PeaksSortedAndDeterministic) {
  const auto a = transform_comb(fibonacci_cps(), fib_bump(), 2.0);
  const auto b = transform_comb(fibonacci_cps(), fib_bump(), 2.0);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a.k(i)[0], b.k(i)[0]);
    EXPECT_EQ(a.amp(i), b.amp(i));
    if (i > 0) {
      EXPECT_LE(a.k(i - 1)[0], a.k(i)[0]);
    }
  }
}

TEST(Pairing, DeltaZTriangle) {
  const auto cps = integer_square_cps();
  const auto mu = make_comb(cps, triangle_weight(), 50.0);
  const auto pl = transform_comb(cps, triangle_weight(), 400.0, 1e-15, 2000.0);
  const auto g = bspline_profile({triangle_chain(-0.5, 0.5)});
  const auto rep = verify_pairing(mu, pl, g, 1e-2, "triangle");
  EXPECT_NEAR(rep.lhs.real(), 1.0, 1e-15);
  EXPECT_NEAR(rep.rhs.real(), 1.0, 1e-2);
  EXPECT_TRUE(rep.pass);
}

TEST(Pairing, FibonacciBumpSixBox) {
  const auto cps = fibonacci_cps();
  const auto h = fib_bump();
  const auto mu = make_comb(cps, h, 30.0);
  const auto pl = transform_comb(cps, h, 10.0, 1e-13 / std::sqrt(5.0));
  for (double c : {0.0, 0.3, -2.7, 11.1}) {
    const auto rep = verify_pairing(mu, pl, six_box(c), 1e-6);
    EXPECT_TRUE(rep.pass) << "c=" << c << " lhs=" << rep.lhs << " rhs=" << rep.rhs << " tail=" << rep.rhs_tail;
    EXPECT_LT(rep.rhs_tail, 5e-7);
  }
  // linearity in g
  const auto r1 = verify_pairing(mu, pl, six_box(0.7), 1e-6);
  const auto r2 = verify_pairing(mu, pl, six_box(0.7, 2.0), 2e-6);
  EXPECT_NEAR(std::abs(r2.lhs - 2.0 * r1.lhs), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(r2.rhs - 2.0 * r1.rhs), 0.0, 1e-12);
}

TEST(Pairing, InsufficientCoverageThrows) {
  const auto cps = fibonacci_cps();
  const auto mu = make_comb(cps, fib_bump(), 30.0);
  const auto pl = transform_comb(cps, fib_bump(), 2.0);
  try {
    verify_pairing(mu, pl, six_box(0.0), 1e-6);
    FAIL() << "expected InsufficientPeakCoverage";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InsufficientPeakCoverage);
  }
}

TEST(Pairing, SupportOutsideRegionRejected) {
  const auto cps = fibonacci_cps();
  const auto mu = make_comb(cps, fib_bump(), 5.0);
  const auto pl = transform_comb(cps, fib_bump(), 10.0);
  EXPECT_THROW(verify_pairing(mu, pl, six_box(4.0), 1e-6), Error);
}

TEST(Periodogram, DeltaZ) {
  const auto cps = integer_square_cps();
  const auto mu = make_comb(cps, triangle_weight(), 400.0);
  const auto I = periodogram(mu, 100.0, {{0.0}});
  EXPECT_NEAR(I[0], 201.0 * 201.0 / 200.0, 1e-9);
  const double k = 1.0 / std::sqrt(2.0);
  for (double R : {100.0, 200.0, 400.0}) EXPECT_LT(periodogram(mu, R, {{k}})[0], 1.0);
  AtomicMeasure empty(1, {}, 10.0);
  EXPECT_EQ(periodogram(empty, 10.0, {{0.3}})[0], 0.0);
}

TEST(Periodogram, BraggIntensityConverges) {
  const auto cps = fibonacci_cps();
  const auto h = fib_bump();
  const auto mu = make_comb(cps, h, 200.0);
  const auto pl = transform_comb(cps, h, 2.0);
  // strongest nonzero peak
  std::size_t best = 0;
  for (std::size_t i = 0; i < pl.size(); ++i)
    if (std::abs(pl.k(i)[0]) > 0.1 && pl.intensity(i) > pl.intensity(best)) best = i;
  const double target = pl.intensity(best);
  auto rel = [&](double R) {
    return std::abs(periodogram(mu, R, {pl.k_vec(best)})[0] / ball_volume(1, R) - target) / target;
  };
  const double e100 = rel(100.0), e200 = rel(200.0);
  EXPECT_LT(e200, 0.1);
  EXPECT_LT(e200, e100);
}

TEST(Autocorrelation, Examples) {
  AtomicMeasure one(1, {{{0.0}, 1.0}}, 3.0);
  const auto g1 = autocorrelation_patch(one, 3.0);
  ASSERT_EQ(g1.size(), 1u);
  EXPECT_NEAR(g1.atoms()[0].w.real(), 1.0 / 6.0, 1e-15);

  AtomicMeasure two(1, {{{0.0}, 1.0}, {{1.0}, 1.0}}, 2.0);
  const auto g2 = autocorrelation_patch(two, 2.0);
  ASSERT_EQ(g2.size(), 3u);
  EXPECT_NEAR(g2.at({-1.0}).real(), 0.25, 1e-15);
  EXPECT_NEAR(g2.at({0.0}).real(), 0.5, 1e-15);
  EXPECT_NEAR(g2.at({1.0}).real(), 0.25, 1e-15);
}

TEST(Autocorrelation, FibonacciDensityAtOrigin) {
  const auto cps = fibonacci_cps();
  const auto mu = make_comb(cps, bspline_profile({BoxChain({{-1.0, kTau - 1.0}})}), 50.0);
  const auto g = autocorrelation_patch(mu, 50.0);
  const double count = static_cast<double>(oracle::fibonacci_model_set(-1.0, kTau - 1.0, 50.0).size());
  EXPECT_NEAR(g.at({0.0}).real(), count / 100.0, 1e-12);
  EXPECT_NEAR(g.at({0.0}).real(), kTau / std::sqrt(5.0), 0.05 * kTau / std::sqrt(5.0));
  // positive definite: its transform is the periodogram
  for (double k = -2.0; k <= 2.0; k += 0.0371) {
    Complex s = 0;
    for (const auto& a : g.atoms()) s += a.w * std::polar(1.0, -2 * kPi * k * a.x[0]);
    EXPECT_GE(s.real(), -1e-9);
    EXPECT_NEAR(s.imag(), 0.0, 1e-9);
  }
}

TEST(ConvolvePeaks, PointMassShift) {
  const auto pl = transform_comb(integer_square_cps(), triangle_weight(), 10.0, 1e-9, 40.0);
  const auto nu = FiniteMixedMeasure(1, {{{0.25}, 0.5}});
  const auto v = convolve_peaks(pl, nu, interval(-3, 3));
  EXPECT_NEAR(std::abs(v.mass(interval(0, 1)) - 0.5), 0.0, 1e-12);
  EXPECT_NEAR(v.variation(interval(-3, 3)), 3.0, 1e-12);
  EXPECT_THROW(convolve_peaks(pl, nu, interval(-10, 10)), Error);
}

TEST(TransformComb, IntegerFactorHasOnePeakPerTorusClass) {
  // Fibonacci plus its copy shifted by sqrt 2, indexed by the Z factor
  Eigen::MatrixXd b(3, 3);
  b << 1.0, kTau, std::sqrt(2.0), 1.0, 1.0 - kTau, 0.0, 0.0, 0.0, 1.0;
  const auto cps = make_cps(1, 1, 1, b);
  const Window w{{interval(-1.0, kTau - 1.0)}, {{0}, {1}}, 0.0};
  const auto h = build_bump(w, 1, 1, 0.25);
  const auto pl = transform_comb(cps, h, 10.0, 1e-14);
  std::size_t at_origin = 0;
  for (std::size_t i = 0; i < pl.size(); ++i) {
    if (std::abs(pl.k(i)[0]) < 1e-12) ++at_origin;
    EXPECT_GE(pl.star(i)[1], 0.0);
    EXPECT_LT(pl.star(i)[1], 1.0);
  }
  EXPECT_EQ(at_origin, 1u);
  const auto i0 = pl.find({0.0});
  ASSERT_TRUE(i0.has_value());
  EXPECT_NEAR(pl.amp(*i0).real(), 2 * (kTau + 0.5) / std::sqrt(5.0), 1e-9);
  const auto mu = make_comb(cps, h, 30.0);
  const auto rep = verify_pairing(mu, pl, bspline_profile({BoxChain(std::vector<std::pair<double, double>>(10, {-0.5, 0.5}))}), 1e-6);
  EXPECT_TRUE(rep.pass) << rep.residual();
}
