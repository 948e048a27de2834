#include <gtest/gtest.h>

#include <numbers>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "phasecert/criteria.hpp"
#include "phasecert/verify.hpp"

using namespace phasecert;

namespace {

constexpr double kPi = std::numbers::pi;

MatrixPhase strict(double lo, double hi) {
  MatrixPhase p;
  p.cls = Sectoriality::Strict;
  p.lo = lo;
  p.hi = hi;
  p.phases = {lo, hi};
  return p;
}

TEST(Gain, HalfAgainstIdentity) {
  const CMat eye = CMat::Identity(2, 2);
  const GainCheck g = gain_condition({0.5 * eye, 0.25 * eye}, eye);
  EXPECT_TRUE(g.ok);
  EXPECT_NEAR(g.converter_max, 0.5, 1e-15);
  EXPECT_NEAR(g.margin, 1.0, 1e-14);
  EXPECT_FALSE(gain_condition({eye}, eye).ok);  // equality is not enough
  EXPECT_FALSE(gain_condition({2.0 * eye}, eye).ok);
}

TEST(Gain, MonotoneInConverterSize) {
  Rng rng(51);
  const CMat net = random_complex(rng, 2) + 5.0 * CMat::Identity(2, 2);
  const CMat c = random_complex(rng, 2);
  double last = 1e300;
  for (double k : {0.1, 0.5, 1.0, 2.0, 8.0}) {
    const double m = gain_condition({k * c}, net).margin;
    EXPECT_LT(m, last);
    last = m;
  }
}

TEST(Phase, SumInsidePi) {
  const PhaseCheck p = phase_condition({strict(-1.0, 1.0), strict(-0.5, 0.2)}, strict(-1.0, 1.0));
  EXPECT_TRUE(p.ok);
  EXPECT_NEAR(p.upper, 1.0, 1e-15);
  EXPECT_NEAR(p.lower, -1.0, 1e-15);
  EXPECT_NEAR(p.margin, kPi - 2.0, 1e-14);
  EXPECT_FALSE(phase_condition({strict(0.0, 2.0)}, strict(0.0, 1.2)).ok);
  // the lower side only
  EXPECT_FALSE(phase_condition({strict(-2.0, 0.0)}, strict(-1.2, 0.0)).ok);
}

TEST(Phase, QuasiConverterAllowed) {
  MatrixPhase q = strict(0.0, 0.5);
  q.cls = Sectoriality::Quasi;
  EXPECT_TRUE(phase_condition({q}, strict(-0.2, 0.2)).ok);
}

TEST(Phase, NonAndSemiDecline) {
  MatrixPhase non;
  const PhaseCheck a = phase_condition({non}, strict(0.0, 0.1));
  EXPECT_FALSE(a.ok);
  EXPECT_TRUE(a.applicable);
  EXPECT_NE(a.note.find("NonSectorial"), std::string::npos);

  MatrixPhase semi = strict(-kPi / 2, kPi / 2);
  semi.cls = Sectoriality::Semi;
  const PhaseCheck b = phase_condition({strict(0.0, 0.1)}, semi);
  EXPECT_FALSE(b.ok);
  EXPECT_FALSE(b.applicable);
  EXPECT_NE(b.note.find("NonApplicable"), std::string::npos);

  MatrixPhase quasi = strict(0.0, 0.3);
  quasi.cls = Sectoriality::Quasi;
  EXPECT_FALSE(phase_condition({strict(0.0, 0.1)}, quasi).ok);
}

TEST(Phase, SectorialPairsObeyEigenvalueBound) {
  Rng rng(52);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int k = 0; k < 200; ++k) {
    const CMat a = random_sectorial(rng, 3, u(rng), 0.6), b = random_sectorial(rng, 3, u(rng), 0.6);
    const MatrixPhase pa = analyze(a), pb = analyze(b);
    ASSERT_TRUE(pa.sectorial() && pb.sectorial());
    const Eigen::ComplexEigenSolver<CMat> es(a * b, false);
    for (int i = 0; i < 3; ++i) {
      const double arg = std::arg(es.eigenvalues()(i));
      EXPECT_GE(arg, pa.lo + pb.lo - 1e-9);
      EXPECT_LE(arg, pa.hi + pb.hi + 1e-9);
    }
  }
}

TEST(Certify, InfiniteBusStable) {
  const Scenario sc = fixture::scenario("infbus_stable");
  const System sys = assemble(sc);
  const CertificateReport rep = certify(sys, fixture::options(sc));
  EXPECT_TRUE(rep.applicable);
  EXPECT_TRUE(rep.certified) << rep.reason;
  EXPECT_EQ(rep.conclusion(), "certified stable");
  EXPECT_TRUE(rep.failing_hz.empty());
  EXPECT_EQ(rep.limiting_converter, -1);
  EXPECT_TRUE(ground_truth(sys).stable);
  for (std::size_t k = 1; k < rep.verdicts.size(); ++k) EXPECT_GT(rep.verdicts[k].hz, rep.verdicts[k - 1].hz);
}

TEST(Certify, InfiniteBusUnstableIsInconclusive) {
  const Scenario sc = fixture::scenario("infbus_unstable");
  const System sys = assemble(sc);
  const CertificateReport rep = certify(sys, fixture::options(sc));
  EXPECT_TRUE(rep.applicable);
  EXPECT_FALSE(rep.certified);
  EXPECT_EQ(rep.conclusion(), "inconclusive w.r.t. instability");
  EXPECT_EQ(rep.limiting_converter, 2);
  EXPECT_FALSE(rep.failing_hz.empty());
}

TEST(Certify, PolarFrameIsInapplicable) {
  Scenario sc = fixture::scenario("infbus_stable");
  sc.frame.kind = FrameKind::PowerPolar;
  const CertificateReport rep = certify(assemble(sc), fixture::options(sc));
  EXPECT_FALSE(rep.applicable);
  EXPECT_FALSE(rep.certified);
  EXPECT_FALSE(rep.openloop.network_inverse_stable);
  EXPECT_EQ(rep.conclusion().rfind("inapplicable:", 0), 0u);
}

TEST(Certify, RefinementOnlyAddsPoints) {
  Scenario sc = fixture::scenario("infbus_unstable");
  const System sys = assemble(sc);
  CertifyOptions o = fixture::options(sc);
  o.refine = false;
  const auto coarse = certify(sys, o);
  o.refine = true;
  const auto fine = certify(sys, o);
  EXPECT_EQ(coarse.verdicts.size(), o.grid.size());
  EXPECT_GT(fine.verdicts.size(), coarse.verdicts.size());
  EXPECT_LE(fine.verdicts.size(), o.grid.size() + static_cast<std::size_t>(o.refine_budget));
}

TEST(Certify, ThreadCountDoesNotChangeResult) {
  const Scenario sc = fixture::scenario("infbus_unstable");
  const System sys = assemble(sc);
  CertifyOptions o = fixture::options(sc);
  o.threads = 1;
  const auto a = certify(sys, o);
  o.threads = 3;
  const auto b = certify(sys, o);
  ASSERT_EQ(a.verdicts.size(), b.verdicts.size());
  for (std::size_t k = 0; k < a.verdicts.size(); ++k) {
    EXPECT_EQ(a.verdicts[k].hz, b.verdicts[k].hz);
    EXPECT_EQ(a.verdicts[k].margin(), b.verdicts[k].margin());
  }
}

TEST(Certify, DecentralizedImpliesCentralized) {
  for (const char* name : {"infbus_stable", "ieee14_stable"}) {
    const Scenario sc = fixture::scenario(name);
    const System sys = assemble(sc);
    CertifyOptions o = fixture::options(sc);
    o.refine = false;
    const auto dec = certify(sys, o);
    ASSERT_TRUE(dec.certified) << name;
    o.centralized = true;
    EXPECT_TRUE(certify(sys, o).certified) << name;
  }
}

TEST(Certify, NeedsConverters) {
  Scenario sc = fixture::scenario("infbus_stable");
  sc.converters.clear();
  const System sys = assemble(sc);
  EXPECT_THROW(certify(sys, fixture::options(sc)), std::invalid_argument);
}

}  // namespace
