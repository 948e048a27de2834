#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "phasecert/converter.hpp"
#include "phasecert/system.hpp"
#include "phasecert/transforms.hpp"

namespace phasecert {

struct SuiteResult {
  std::string name;
  int trials = 0;
  int failures = 0;
  double worst = 0.0;      // worst observed slack or residual, see tolerance
  double tolerance = 0.0;
  double seconds = 0.0;
  std::string detail;      // first failure, if any

  bool passed() const { return failures == 0; }
};

using Rng = std::mt19937_64;

inline constexpr std::uint64_t kDefaultSeed = 20231017;

// Random draws used by the suites and the tests.
// q_integral allows the constant-Q loop; its integrator pins Q at DC, which
// makes J_C(0) vanish and Y_DQ(0) semi-sectorial.
GfmParameters random_gfm_parameters(Rng& rng, bool q_integral = true);
OperatingPoint random_local_operating_point(Rng& rng);
CMat random_sectorial(Rng& rng, int n, double center, double half_width);
CMat random_complex(Rng& rng, int n);
// Slack plus two converter buses on a meshed triangle.
System random_system(Rng& rng);

// Eigenvalues of AB against the gain product bound; also the phase sum bound
// for sectorial pairs. worst = most negative slack.
SuiteResult verify_bounds(Rng& rng, int pairs);
// Y_DQ(0) template, identity and classification.
SuiteResult verify_dc_template(Rng& rng, int draws);
// PowerPolar J_C(0) = diag(0, gamma), classified Quasi.
SuiteResult verify_polar_dc(Rng& rng, int draws);
// det(J_C + J_net) = det(E) det(Y_C + Y_net) det(F), per frame kind.
SuiteResult verify_det_equivalence(Rng& rng, int points_per_kind);

struct VerifyOptions {
  std::uint64_t seed = kDefaultSeed;
  int trials = 0;  // 0 keeps each suite's default size
};

std::vector<SuiteResult> run_verify(const VerifyOptions& opt);

}  // namespace phasecert
