#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "phasecert/phase.hpp"

using namespace phasecert;

namespace {

constexpr double kPi = std::numbers::pi;

CMat random_unitary(std::mt19937_64& rng, int n) {
  CMat z(n, n);
  std::normal_distribution<double> g;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) z(i, j) = cd(g(rng), g(rng));
  Eigen::HouseholderQR<CMat> qr(z);
  return qr.householderQ() * CMat::Identity(n, n);
}

// T* diag(e^{j theta_k}) T has phases theta_k, whatever invertible T is.
CMat congruence(std::mt19937_64& rng, const std::vector<double>& theta) {
  const int n = static_cast<int>(theta.size());
  CMat d = CMat::Zero(n, n);
  for (int k = 0; k < n; ++k) d(k, k) = std::polar(1.0, theta[k]);
  const CMat t = oracle::random_matrix(rng, n, n).cast<cd>() + 3.0 * CMat::Identity(n, n);
  return t.adjoint() * d * t;
}

TEST(Phase, PositiveDefiniteIsStrictWithZeroPhase) {
  std::mt19937_64 rng(11);
  const CMat u = random_unitary(rng, 3);
  const CMat a = u.adjoint() * Eigen::Vector3d(1.0, 2.0, 5.0).cast<cd>().asDiagonal() * u;
  const MatrixPhase p = analyze(a);
  EXPECT_EQ(p.cls, Sectoriality::Strict);
  EXPECT_NEAR(p.lo, 0.0, 1e-9);
  EXPECT_NEAR(p.hi, 0.0, 1e-9);
}

TEST(Phase, RotatedPositiveDefinite) {
  std::mt19937_64 rng(12);
  for (double th : {0.4, -1.1, 1.5}) {
    const CMat u = random_unitary(rng, 2);
    const CMat a = std::polar(1.0, th) * (u.adjoint() * Eigen::Vector2d(1.0, 3.0).cast<cd>().asDiagonal() * u);
    const MatrixPhase p = analyze(a);
    EXPECT_EQ(p.cls, Sectoriality::Strict);
    EXPECT_NEAR(p.lo, th, 1e-9);
    EXPECT_NEAR(p.hi, th, 1e-9);
  }
}

TEST(Phase, CongruencePhasesMatchDiagonal) {
  std::mt19937_64 rng(13);
  const std::vector<double> theta{-1.2, -0.3, 0.5, 1.1};
  const MatrixPhase p = analyze(congruence(rng, theta));
  EXPECT_EQ(p.cls, Sectoriality::Strict);
  ASSERT_EQ(p.phases.size(), 4u);
  for (int k = 0; k < 4; ++k) EXPECT_NEAR(p.phases[k], theta[k], 1e-8);
  EXPECT_NEAR(p.lo, -1.2, 1e-8);
  EXPECT_NEAR(p.hi, 1.1, 1e-8);
}

TEST(Phase, DiagonalWithZeroIsQuasi) {
  CMat a = CMat::Zero(2, 2);
  a(1, 1) = 0.7;
  EXPECT_EQ(classify(a), Sectoriality::Quasi);
}

TEST(Phase, ZeroIsNon) { EXPECT_EQ(classify(CMat::Zero(2, 2)), Sectoriality::Non); }

TEST(Phase, SkewIsSemi) {
  // J = [[0, -1], [1, 0]] has numerical range on the imaginary axis through 0
  EXPECT_EQ(classify(rot90().cast<cd>()), Sectoriality::Semi);
}

TEST(Phase, IndefiniteHermitianIsSemi) {
  // the numerical range is a segment of the real axis, so it still sits in a closed half plane
  CMat a = CMat::Zero(2, 2);
  a(0, 0) = 1.0;
  a(1, 1) = -1.0;
  EXPECT_EQ(classify(a), Sectoriality::Semi);
}

TEST(Phase, ZeroInsideNumericalRangeIsNon) {
  CMat a = CMat::Zero(3, 3);
  for (int k = 0; k < 3; ++k) a(k, k) = std::polar(1.0, 2.0 * kPi * k / 3.0);
  const MatrixPhase p = analyze(a);
  EXPECT_EQ(p.cls, Sectoriality::Non);
  EXPECT_EQ(p.lo, kNonSectorialLo);
  EXPECT_EQ(p.hi, kNonSectorialHi);
  EXPECT_THROW(phases(a), NotSectorial);
}

TEST(Phase, EigenvaluePhasesInsideInterval) {
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> u(-1.4, 1.4);
  for (int k = 0; k < 50; ++k) {
    const CMat a = congruence(rng, {u(rng), u(rng), u(rng)});
    const MatrixPhase p = analyze(a);
    ASSERT_TRUE(p.sectorial());
    const Eigen::ComplexEigenSolver<CMat> es(a, false);
    for (int i = 0; i < 3; ++i) {
      const double arg = std::arg(es.eigenvalues()(i));
      EXPECT_GE(arg, p.lo - 1e-9);
      EXPECT_LE(arg, p.hi + 1e-9);
    }
  }
}

TEST(Phase, SupportOfIdentity) {
  const CMat eye = CMat::Identity(2, 2);
  EXPECT_NEAR(numerical_range_support(eye, 0.0), 1.0, 1e-12);
  EXPECT_NEAR(numerical_range_support(eye, kPi), -1.0, 1e-12);
  EXPECT_NEAR(rotated_hermitian_min(eye, kPi / 2), 0.0, 1e-12);
}

TEST(Gain, MatchesSingularValues) {
  std::mt19937_64 rng(15);
  for (int k = 0; k < 20; ++k) {
    const CMat a = oracle::random_matrix(rng, 4, 4).cast<cd>() + cd(0, 1) * oracle::random_matrix(rng, 4, 4).cast<cd>();
    const Eigen::JacobiSVD<CMat> svd(a);
    const GainExtrema g = gain_extrema(a);
    EXPECT_NEAR(g.hi, svd.singularValues()(0), 1e-12);
    EXPECT_NEAR(g.lo, svd.singularValues()(3), 1e-12);
  }
}

TEST(Phase, ClassNames) {
  EXPECT_EQ(to_string(Sectoriality::Strict), "strict");
  EXPECT_EQ(to_string(Sectoriality::Non), "non");
}

}  // namespace
