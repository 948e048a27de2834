#include <gtest/gtest.h>

#include "phasecert/verify.hpp"

using namespace phasecert;

namespace {

TEST(Verify, SmallSuitesPass) {
  VerifyOptions o;
  o.trials = 20;
  const auto res = run_verify(o);
  ASSERT_EQ(res.size(), 4u);
  for (const auto& s : res) {
    EXPECT_TRUE(s.passed()) << s.name << ": " << s.detail;
    EXPECT_GE(s.trials, 20);
  }
}

TEST(Verify, SeedReproducible) {
  Rng a(7), b(7);
  const auto x = verify_bounds(a, 50), y = verify_bounds(b, 50);
  EXPECT_EQ(x.worst, y.worst);
  Rng c(9), d(9);
  EXPECT_EQ(random_gfm_parameters(c).D, random_gfm_parameters(d).D);
}

TEST(Verify, RandomSystemIsWellFormed) {
  Rng rng(3);
  for (int k = 0; k < 5; ++k) {
    const System sys = random_system(rng);
    EXPECT_EQ(sys.converters(), 2);
    EXPECT_EQ(sys.z_ports.outputs(), 4);
  }
}

TEST(Verify, SectorialDrawsHaveRequestedSpread) {
  Rng rng(4);
  for (int k = 0; k < 20; ++k) {
    const MatrixPhase p = analyze(random_sectorial(rng, 3, 0.4, 0.5));
    ASSERT_TRUE(p.sectorial());
    EXPECT_GE(p.lo, 0.4 - 0.5 - 1e-9);
    EXPECT_LE(p.hi, 0.4 + 0.5 + 1e-9);
  }
}

}  // namespace
