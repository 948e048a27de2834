#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "oracles.hpp"
#include "phasecert/lti.hpp"

using namespace phasecert;

namespace {

const std::vector<cd> kPoints{cd(0.0, 0.3), cd(0.5, 2.0), cd(-0.2, 17.0), cd(1.0, -4.0), cd(0.0, 300.0)};

TEST(TransferFunction, MatchesPolynomialRatio) {
  const std::vector<double> num{2.0, 3.0, 1.0}, den{1.0, 4.0, 8.0, 3.0};
  const StateSpace g = transfer_function(num, den);
  EXPECT_EQ(g.states(), 3);
  for (cd s : kPoints) EXPECT_NEAR(std::abs(evaluate(g, s)(0, 0) - oracle::polyval(num, s) / oracle::polyval(den, s)), 0.0, 1e-12);
}

TEST(TransferFunction, BiproperKeepsFeedthrough) {
  const std::vector<double> num{3.0, 1.0}, den{2.0, 5.0};
  const StateSpace g = transfer_function(num, den);
  EXPECT_DOUBLE_EQ(g.D(0, 0), 1.5);
  for (cd s : kPoints) EXPECT_NEAR(std::abs(evaluate(g, s)(0, 0) - oracle::polyval(num, s) / oracle::polyval(den, s)), 0.0, 1e-12);
}

TEST(TransferFunction, RejectsImproper) {
  EXPECT_THROW(transfer_function({1.0, 0.0, 0.0}, {1.0, 1.0}), std::invalid_argument);
  EXPECT_THROW(transfer_function({1.0}, {0.0, 1.0}), std::invalid_argument);
}

TEST(TransferFunction, RowSharesDenominator) {
  const std::vector<double> den{1.0, 3.0, 2.0, 7.0};
  const std::vector<std::vector<double>> nums{{1.0, 0.0, 2.0, 1.0}, {4.0, -1.0}, {0.5}};
  const StateSpace g = transfer_function_row(nums, den);
  ASSERT_EQ(g.outputs(), 1);
  ASSERT_EQ(g.inputs(), 3);
  EXPECT_EQ(g.states(), 3);
  for (cd s : kPoints) {
    const CMat v = evaluate(g, s);
    for (int j = 0; j < 3; ++j) EXPECT_NEAR(std::abs(v(0, j) - oracle::polyval(nums[j], s) / oracle::polyval(den, s)), 0.0, 1e-11);
  }
}

TEST(Interconnection, SeriesParallelAgainstPointwise) {
  std::mt19937_64 rng(1);
  const StateSpace g1 = oracle::random_stable(rng, 3, 2, 3), g2 = oracle::random_stable(rng, 4, 3, 2);
  const StateSpace g3 = oracle::random_stable(rng, 2, 2, 3);
  for (cd s : kPoints) {
    const CMat a = evaluate(g1, s), b = evaluate(g2, s), c = evaluate(g3, s);
    EXPECT_LT(oracle::rel_err(evaluate(series(g1, g2), s), b * a), 1e-12);
    EXPECT_LT(oracle::rel_err(evaluate(multiply(g2, g1), s), b * a), 1e-12);
    EXPECT_LT(oracle::rel_err(evaluate(parallel(g1, g3), s), a + c), 1e-12);
    EXPECT_LT(oracle::rel_err(evaluate(scale(-2.5, g1), s), -2.5 * a), 1e-12);
  }
}

TEST(Interconnection, FeedbackAgainstPointwise) {
  std::mt19937_64 rng(2);
  const StateSpace g = oracle::random_stable(rng, 4, 2, 2), k = oracle::random_stable(rng, 3, 2, 2);
  for (cd s : kPoints) {
    const CMat a = evaluate(g, s), b = evaluate(k, s);
    const CMat eye = CMat::Identity(2, 2);
    EXPECT_LT(oracle::rel_err(evaluate(feedback(g, k, -1), s), (eye + a * b).inverse() * a), 1e-10);
    EXPECT_LT(oracle::rel_err(evaluate(feedback(g, k, +1), s), (eye - a * b).inverse() * a), 1e-10);
  }
}

TEST(Interconnection, LftAgainstPointwise) {
  std::mt19937_64 rng(3);
  // plant with 2 exogenous inputs, 1 control input, 2 performance outputs, 1 measurement
  const StateSpace p = oracle::random_stable(rng, 4, 3, 3), k = oracle::random_stable(rng, 2, 1, 1);
  const StateSpace cl = lft(p, k, 2, 2, +1);
  for (cd s : kPoints) {
    const CMat pv = evaluate(p, s), kv = evaluate(k, s);
    const CMat p11 = pv.topLeftCorner(2, 2), p12 = pv.topRightCorner(2, 1);
    const CMat p21 = pv.bottomLeftCorner(1, 2), p22 = pv.bottomRightCorner(1, 1);
    const CMat expect = p11 + p12 * kv * (CMat::Identity(1, 1) - p22 * kv).inverse() * p21;
    EXPECT_LT(oracle::rel_err(evaluate(cl, s), expect), 1e-10);
  }
}

TEST(Interconnection, IllPosedLoopThrows) {
  const StateSpace one = StateSpace::gain(Mat::Identity(1, 1));
  EXPECT_THROW(feedback(one, one, +1), IllPosedLoop);
}

TEST(Interconnection, InverseOfBiproper) {
  std::mt19937_64 rng(4);
  StateSpace g = oracle::random_stable(rng, 3, 2, 2);
  g.D += 2.0 * Mat::Identity(2, 2);
  const StateSpace gi = inverse(g);
  for (cd s : kPoints) EXPECT_LT((evaluate(g, s) * evaluate(gi, s) - CMat::Identity(2, 2)).norm(), 1e-10);
  EXPECT_THROW(inverse(StateSpace::zero(2, 2)), IllPosedLoop);
}

TEST(Interconnection, BlockDiagonal) {
  std::mt19937_64 rng(5);
  const StateSpace a = oracle::random_stable(rng, 2, 2, 2), b = oracle::random_stable(rng, 3, 1, 2);
  const StateSpace bd = block_diagonal({a, b});
  ASSERT_EQ(bd.outputs(), 3);
  ASSERT_EQ(bd.inputs(), 4);
  const cd s(0.1, 3.0);
  const CMat v = evaluate(bd, s);
  EXPECT_LT(oracle::rel_err(v.topLeftCorner(2, 2), evaluate(a, s)), 1e-12);
  EXPECT_LT(oracle::rel_err(v.bottomRightCorner(1, 2), evaluate(b, s)), 1e-12);
  EXPECT_LT(v.topRightCorner(2, 2).norm(), 1e-15);
}

TEST(Realization, DimensionChecks) {
  EXPECT_THROW(StateSpace(Mat::Zero(2, 2), Mat::Zero(3, 1), Mat::Zero(1, 2), Mat::Zero(1, 1)), std::invalid_argument);
  EXPECT_THROW(series(StateSpace::zero(2, 1), StateSpace::zero(1, 3)), std::invalid_argument);
}

TEST(Realization, EvaluateAtPoleThrows) {
  EXPECT_THROW(evaluate(StateSpace::integrator(1), 0.0), SingularResolvent);
}

TEST(FrequencyShift, MatchesRotatingFrameImage) {
  const double w0 = 2.0 * std::numbers::pi * 50.0;
  const std::vector<double> num{1.0, 30.0}, den{1.0, 10.0, w0 * w0};
  const StateSpace g = frequency_shift(transfer_function(num, den), w0);
  ASSERT_EQ(g.outputs(), 2);
  ASSERT_EQ(g.inputs(), 2);
  auto scalar = [&](cd s) { return oracle::polyval(num, s) / oracle::polyval(den, s); };
  for (cd s : kPoints) EXPECT_LT(oracle::rel_err(evaluate(g, s), oracle::dq_of_scalar(scalar, w0, s)), 1e-9);
}

TEST(FrequencyShift, InductorGivesDqImpedanceInverse) {
  // 1 / (L s + R) in alpha-beta is the inverse of [[R + sL, -w0 L], [w0 L, R + sL]] in dq
  const double w0 = 100.0, r = 0.3, l = 0.02;
  const StateSpace g = frequency_shift(transfer_function({1.0}, {l, r}), w0);
  for (cd s : kPoints) {
    CMat z(2, 2);
    z << r + s * l, -w0 * l, w0 * l, r + s * l;
    EXPECT_LT(oracle::rel_err(evaluate(g, s), z.inverse()), 1e-12);
  }
}

TEST(Balance, KeepsResponseAndEvensOutScaling) {
  const std::vector<double> den = poly::multiply(poly::multiply({1.0, 2e3}, {1.0, 5e3}), {1.0, 3.0, 1e6});
  StateSpace g = transfer_function({1e6}, den);
  StateSpace raw(g.A, g.B, g.C, g.D);
  const StateSpace b = balance(raw);
  for (cd s : kPoints) EXPECT_LT(oracle::rel_err(evaluate(b, s), evaluate(raw, s)), 1e-10);
  auto spread = [](const Mat& a) {
    double lo = 1e300, hi = 0.0;
    for (int i = 0; i < a.rows(); ++i) {
      const double n = a.row(i).norm() + a.col(i).norm();
      lo = std::min(lo, n);
      hi = std::max(hi, n);
    }
    return hi / lo;
  };
  EXPECT_LE(spread(b.A), spread(raw.A) + 1e-9);
}

TEST(Poles, MatchKnownRoots) {
  const std::vector<double> den = poly::multiply(poly::multiply({1.0, 1.0}, {1.0, 2.0}), {1.0, 2.0, 5.0});
  auto p = poles(transfer_function({1.0}, den));
  ASSERT_EQ(p.size(), 4u);
  std::vector<cd> want{{-1.0, 0.0}, {-2.0, 0.0}, {-1.0, 2.0}, {-1.0, -2.0}};
  for (cd w : want) {
    double best = 1e9;
    for (cd x : p) best = std::min(best, std::abs(x - w));
    EXPECT_LT(best, 1e-9);
  }
  EXPECT_TRUE(is_stable(transfer_function({1.0}, den)).stable);
}

TEST(Poles, IntegratorIsNotStable) {
  EXPECT_FALSE(is_stable(StateSpace::integrator(1)).stable);
  EXPECT_FALSE(spectrum_stability({cd(-1.0, 0.0), cd(1e-12, 3.0)}).stable);
  EXPECT_TRUE(spectrum_stability({cd(-1e-3, 5.0)}).stable);
}

TEST(Grid, StandardGrid) {
  const FrequencyGrid g = FrequencyGrid::standard();
  ASSERT_EQ(g.size(), 401u);
  EXPECT_EQ(g[0], 0.0);
  EXPECT_NEAR(g[1], 0.01, 1e-15);
  EXPECT_NEAR(g[400], 1e4, 1e-8);
  for (std::size_t k = 1; k < g.size(); ++k) EXPECT_GT(g[k], g[k - 1]);
}

TEST(Grid, RejectsBadInput) {
  EXPECT_THROW(FrequencyGrid({1.0, -2.0}), std::invalid_argument);
  EXPECT_THROW(FrequencyGrid::logspace(0.0, 1.0, 10, false), std::invalid_argument);
  EXPECT_THROW(FrequencyGrid::logspace(1.0, 10.0, 1, false), std::invalid_argument);
  EXPECT_EQ(FrequencyGrid({3.0, 1.0, 3.0}).size(), 2u);
}

TEST(Helpers, ComplexBlockAndRotation) {
  const Mat m = complex_block(cd(2.0, 3.0));
  EXPECT_EQ(m(0, 0), 2.0);
  EXPECT_EQ(m(0, 1), -3.0);
  EXPECT_EQ(m(1, 0), 3.0);
  EXPECT_EQ((rot90() * rot90() + Mat::Identity(2, 2)).norm(), 0.0);
}

}  // namespace
