#pragma once

#include <string>
#include <vector>

#include "phasecert/phase.hpp"
#include "phasecert/system.hpp"
#include "phasecert/transforms.hpp"

namespace phasecert {

struct GainCheck {
  bool ok = false;
  double converter_max = 0.0;  // max_i sigma_max(J_C,i)
  double network_min = 0.0;    // sigma_min(J_net)
  double margin = 0.0;         // network_min / converter_max - 1
};

struct PhaseCheck {
  bool ok = false;
  bool applicable = true;
  double upper = 0.0;  // max_i phi_max(J_C,i), radians
  double lower = 0.0;
  double margin = 0.0;  // min of the two slacks against +-pi
  std::string note;
};

// Small gain on the transformed pair.
GainCheck gain_condition(const std::vector<CMat>& jc, const CMat& jnet);
// Small phase on the transformed pair, against the phases of J_net^{-1}.
PhaseCheck phase_condition(const std::vector<MatrixPhase>& jc, const MatrixPhase& jnet_inv);

struct FrequencyVerdict {
  double hz = 0.0;
  bool refined = false;  // added by grid refinement
  std::vector<MatrixPhase> converter_phase;
  std::vector<GainExtrema> converter_gain;
  std::vector<double> converter_margin;  // individual phase margin, very negative when Non
  MatrixPhase network_inverse_phase;
  GainExtrema network_gain;
  GainCheck gain;
  PhaseCheck phase;
  bool satisfied = false;
  int limiting_converter = -1;  // bus id

  double margin() const;  // combined relative margin, > 0 when satisfied
};

struct OpenLoopCheck {
  bool converters_stable = true;
  bool network_inverse_stable = true;
  double converter_max_real = 0.0;
  double network_inverse_max_real = 0.0;
  std::vector<int> unstable_converters;  // bus ids
  std::string detail;

  bool ok() const { return converters_stable && network_inverse_stable; }
};

struct CertifyOptions {
  FrameConfig frame;
  FrequencyGrid grid = FrequencyGrid::standard();
  bool refine = true;
  int refine_depth = 3;
  int refine_budget = 200;  // added points at most
  double refine_band = 0.05;
  bool centralized = false;  // phases of the whole block diagonal instead of per converter
  int threads = 0;           // 0 = hardware concurrency; results do not depend on it
};

struct CertificateReport {
  FrameConfig frame;
  std::vector<FrequencyVerdict> verdicts;  // ascending frequency
  OpenLoopCheck openloop;
  double infinity_product = 0.0;
  bool infinity_ok = true;
  bool certified = false;
  bool applicable = true;
  std::string reason;
  int limiting_converter = -1;
  double limiting_hz = 0.0;
  std::vector<int> failing_converters;
  std::vector<double> failing_hz;

  std::string conclusion() const;
};

FrequencyVerdict evaluate_frequency(const System& sys, const TransformSet& t, double hz, bool centralized = false);
OpenLoopCheck check_transformed_openloop(const System& sys, const TransformSet& t);
CertificateReport certify(const System& sys, const CertifyOptions& opt);

}  // namespace phasecert
