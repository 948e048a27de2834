#pragma once

#include <string>
#include <vector>

#include "phasecert/lti.hpp"

namespace phasecert {

enum class Sectoriality { Strict, Quasi, Semi, Non };

std::string to_string(Sectoriality c);

struct NotSectorial : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Sentinel interval for matrices without a sectorial decomposition.
inline constexpr double kNonSectorialLo = -2.0 * 3.14159265358979323846;
inline constexpr double kNonSectorialHi = 2.0 * 3.14159265358979323846;

struct MatrixPhase {
  Sectoriality cls = Sectoriality::Non;
  double theta = 0.0;    // witness rotation, Herm(e^{j theta} A) >= 0
  double support = 0.0;  // max_theta lambda_min(Herm(e^{j theta} A)) / sigma_max(A)
  double lo = kNonSectorialLo;
  double hi = kNonSectorialHi;
  std::vector<double> phases;  // ascending; empty for Non

  bool sectorial() const { return cls != Sectoriality::Non; }
  double spread() const { return hi - lo; }
};

struct GainExtrema {
  double lo = 0.0;
  double hi = 0.0;
};

inline constexpr double kDefaultPhaseTolerance = 1e-8;

// max over unit x of Re(e^{j theta} x*Ax)
double numerical_range_support(const CMat& a, double theta);

// lambda_min(Herm(e^{j theta} A))
double rotated_hermitian_min(const CMat& a, double theta);

// Classification and phases in one pass. rel_tol scales with sigma_max(A).
MatrixPhase analyze(const CMat& a, double rel_tol = kDefaultPhaseTolerance);

Sectoriality classify(const CMat& a, double rel_tol = kDefaultPhaseTolerance);

// Throws NotSectorial for class Non.
MatrixPhase phases(const CMat& a, double rel_tol = kDefaultPhaseTolerance);

GainExtrema gain_extrema(const CMat& a);

}  // namespace phasecert
