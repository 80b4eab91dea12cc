#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "meyer/lattice_cps.hpp"
#include "oracles.hpp"

using namespace meyer;

namespace {
const double kTau = std::numbers::phi;

Eigen::MatrixXd mat2(double a, double b, double c, double d) {
  Eigen::MatrixXd m(2, 2);
  m << a, b, c, d;
  return m;
}
}  // namespace

TEST(Lattice, FibonacciCovolume) {
  auto cps = fibonacci_cps();
  EXPECT_NEAR(cps.lattice.covolume(), std::abs(oracle::det2(1, kTau, 1, 1 - kTau)), 1e-12);
  EXPECT_NEAR(cps.lattice.covolume(), 2.2360679774997896, 1e-12);
  auto rep = validate_cps(cps);
  EXPECT_TRUE(rep.injective);
  EXPECT_TRUE(rep.dense);
  EXPECT_TRUE(rep.ok());
}

TEST(Lattice, IntegerSquareNotDense) {
  auto rep = validate_cps(integer_square_cps());
  EXPECT_FALSE(rep.dense);
}

TEST(Lattice, DegenerateBasis) {
  try {
    make_cps(1, 1, 0, mat2(1, 2, 1, 2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DegenerateBasis);
  }
}

TEST(Lattice, NonIntegerDiscrete) {
  try {
    make_cps(1, 0, 1, mat2(1, 0.5, 0.5, 1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonIntegerDiscreteCoordinates);
  }
}

TEST(Dual, SelfDualAndDiagonal) {
  auto d = dual_cps(integer_square_cps());
  EXPECT_TRUE(d.lattice.basis().isApprox(Eigen::MatrixXd::Identity(2, 2)));
  auto d2 = dual_cps(make_cps(1, 1, 0, mat2(2, 0, 0, 0.5)));
  EXPECT_NEAR(d2.lattice.basis()(0, 0), 0.5, 1e-15);
  EXPECT_NEAR(d2.lattice.basis()(1, 1), 2.0, 1e-15);
}

TEST(Dual, FibonacciPairingAndDualOfDual) {
  auto cps = fibonacci_cps();
  auto d = dual_cps(cps);
  Eigen::MatrixXd B = cps.lattice.basis();
  Eigen::MatrixXd P = B.transpose() * d.lattice.basis();
  EXPECT_TRUE(P.isApprox(Eigen::MatrixXd::Identity(2, 2), 1e-12));
  EXPECT_LT(pairing_integrality_residual(cps.lattice, d.lattice), 1e-9);
  EXPECT_NEAR(d.lattice.covolume() * cps.lattice.covolume(), 1.0, 1e-12);
  auto back = dual_of_dual(d);
  Eigen::MatrixXd C = change_of_basis(cps.lattice, back.lattice);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) EXPECT_NEAR(C(i, j), std::round(C(i, j)), 1e-9);
  EXPECT_NEAR(std::abs(C.determinant()), 1.0, 1e-9);
}

TEST(ModelSet, IntegerSquare) {
  auto pts = enumerate_model_set(integer_square_cps(), interval_window(-0.5, 0.5), 3.0);
  ASSERT_EQ(pts.size(), 7u);
  for (int i = 0; i < 7; ++i) {
    EXPECT_EQ(pts[i].x[0], i - 3.0);
    EXPECT_EQ(pts[i].star[0], 0.0);
  }
}

TEST(ModelSet, FibonacciMatchesBruteForce) {
  auto cps = fibonacci_cps();
  auto pts = enumerate_model_set(cps, interval_window(-1, kTau - 1), 10.0);
  auto ref = oracle::fibonacci_model_set(-1, kTau - 1, 10.0);
  ASSERT_EQ(pts.size(), ref.size());
  for (std::size_t i = 0; i < ref.size(); ++i) EXPECT_NEAR(pts[i].x[0], ref[i], 1e-12);
  // frozen from the oracle
  EXPECT_EQ(ref.size(), 16u);
}

TEST(ModelSet, RadiusZero) {
  auto pts = enumerate_model_set(fibonacci_cps(), interval_window(-1, kTau - 1), 0.0);
  ASSERT_EQ(pts.size(), 1u);
  EXPECT_EQ(pts[0].x[0], 0.0);
}

TEST(ModelSet, MonotoneInRadiusAndWindow) {
  auto cps = fibonacci_cps();
  auto a = enumerate_model_set(cps, interval_window(-0.5, 0.5), 20.0);
  auto b = enumerate_model_set(cps, interval_window(-0.5, 0.5), 30.0);
  auto c = enumerate_model_set(cps, interval_window(-0.7, 0.6), 30.0);
  EXPECT_TRUE(std::includes(b.begin(), b.end(), a.begin(), a.end()));
  EXPECT_TRUE(std::includes(c.begin(), c.end(), b.begin(), b.end()));
}

TEST(ModelSet, StarAdditivity) {
  auto cps = fibonacci_cps();
  auto pts = enumerate_model_set(cps, interval_window(-1, kTau - 1), 15.0);
  for (const auto& p : pts)
    for (const auto& q : pts) {
      const double x = p.x[0] + q.x[0];
      for (const auto& r : pts)
        if (std::abs(r.x[0] - x) < 1e-9) {
          EXPECT_NEAR(r.star[0], p.star[0] + q.star[0], 1e-12);
        }
    }
}

TEST(ModelSet, DiscreteFactor) {
  // n=1, m=0, z=1 with generators (1,0) and (0.5,1)
  Eigen::MatrixXd b(2, 2);
  b << 1.0, 0.5, 0.0, 1.0;
  auto cps = make_cps(1, 0, 1, b);
  Window w;
  w.discrete = {{0}};
  auto pts = enumerate_model_set(cps, w, 2.0);
  ASSERT_EQ(pts.size(), 5u);
  for (const auto& p : pts) EXPECT_EQ(p.star[0], 0.0);
  w.discrete = {{0}, {1}};
  EXPECT_EQ(enumerate_model_set(cps, w, 2.0).size(), 9u);
}

TEST(ModelSet, BudgetExceeded) {
  try {
    enumerate_model_set(fibonacci_cps(), interval_window(-1, 1), 1e6, 1000);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EnumerationBudgetExceeded);
  }
}

TEST(DualPoints, IntegerSquare) {
  auto pts = enumerate_dual_points(dual_cps(integer_square_cps()), 1.5);
  std::vector<double> xs;
  for (const auto& p : pts) xs.push_back(p.x[0]);
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  EXPECT_EQ(xs, (std::vector<double>{-1, 0, 1}));
  for (const auto& p : pts) EXPECT_EQ(p.star[0], std::round(p.star[0]));
}

TEST(DualPoints, FibonacciPositions) {
  auto d = dual_cps(fibonacci_cps());
  auto pts = enumerate_dual_points(d, 3.0);
  const double s5 = std::sqrt(5.0);
  // brute force over the inverse-transpose integer combinations
  std::size_t count = 0;
  for (long long a = -40; a <= 40; ++a)
    for (long long b = -40; b <= 40; ++b) {
      const double k = (a + b * kTau) / s5;
      const double ks = -(a + b * (1 - kTau)) / s5;
      if (std::abs(k) <= 3.0 && std::abs(ks) <= 3.0) ++count;
    }
  EXPECT_EQ(pts.size(), count);
  for (const auto& p : pts) {
    // k sqrt5 = a + b tau for integers a, b
    const double b = (p.x[0] * s5 + p.star[0] * s5) / (2 * kTau - 1);
    const double a = p.x[0] * s5 - b * kTau;
    EXPECT_NEAR(a, std::round(a), 1e-9);
    EXPECT_NEAR(b, std::round(b), 1e-9);
  }
}

TEST(DualPoints, OnlyOrigin) {
  auto pts = enumerate_dual_points(dual_cps(integer_square_cps()), 0.5);
  ASSERT_EQ(pts.size(), 1u);
  EXPECT_EQ(pts[0].x[0], 0.0);
}

TEST(DualPoints, PairingWithModelSet) {
  auto cps = fibonacci_cps();
  auto d = dual_cps(cps);
  auto xs = enumerate_model_set(cps, interval_window(-1, kTau - 1), 8.0);
  auto ks = enumerate_dual_points(d, 2.0);
  for (const auto& k : ks)
    for (const auto& x : xs) {
      const double s = k.x[0] * x.x[0] + k.star[0] * x.star[0];
      EXPECT_NEAR(s, std::round(s), 1e-9);
    }
}

TEST(DualPoints, TorusCoordinatesReduced) {
  Eigen::MatrixXd b(2, 2);
  b << 1.0, 0.5, 0.0, 1.0;
  auto d = dual_cps(make_cps(1, 0, 1, b));
  auto pts = enumerate_dual_points(d, 4.0);
  EXPECT_FALSE(pts.empty());
  for (const auto& p : pts) {
    EXPECT_GE(p.star[0], 0.0);
    EXPECT_LT(p.star[0], 1.0);
  }
  // positions are the multiples of 1, and theta = -k/2 mod 1
  for (const auto& p : pts) EXPECT_NEAR(reduce_mod1(p.star[0] + 0.5 * p.x[0]), 0.0, 1e-9);
}

TEST(Lattice, ThreeDimensionalScheme) {
  // n=2, m=1 scheme: Z^3 sheared by irrational internal rows
  Eigen::MatrixXd b(3, 3);
  b << 1, 0, kTau, 0, 1, std::sqrt(2.0), std::sqrt(3.0), std::sqrt(5.0), 1;
  auto cps = make_cps(2, 1, 0, b);
  auto rep = validate_cps(cps, 8.0);
  EXPECT_TRUE(rep.injective);
  Window w{{Box{{-0.5}, {0.5}}}, {}, 0};
  auto pts = enumerate_model_set(cps, w, 6.0);
  std::size_t count = 0;
  for (int i = -30; i <= 30; ++i)
    for (int j = -30; j <= 30; ++j)
      for (int k = -30; k <= 30; ++k) {
        Vector v = cps.lattice.point({i, j, k});
        if (std::hypot(v[0], v[1]) <= 6.0 && std::abs(v[2]) <= 0.5) ++count;
      }
  EXPECT_EQ(pts.size(), count);
}
