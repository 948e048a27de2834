#pragma once

#include <string>
#include <vector>

#include "phasecert/converter.hpp"
#include "phasecert/lti.hpp"

namespace phasecert {

enum class FrameKind { Rectangular, PowerPolar, Blended, NaiveBlended };
enum class WeightKind { Identity, VirtualAdmittance };

FrameKind parse_frame(const std::string& s);
std::string to_string(FrameKind k);
WeightKind parse_weight(const std::string& s);
std::string to_string(WeightKind k);

// Constant linearization of (phase, magnitude) -> (P, Q) about op.
struct PolarMatrices {
  Mat E;     // [[vd, vq], [vq, -vd]]
  Mat C;     // [[id, iq], [-iq, id]]
  Mat F;     // (d(phi, |V|) / d(vd, vq))^{-1}
  Mat Finv;  // [[-vq/|V|^2, vd/|V|^2], [vd/|V|, vq/|V|]]
};

PolarMatrices polar_matrices(const OperatingPoint& op);

struct FrameConfig {
  FrameKind kind = FrameKind::Blended;
  double wc = 2.0 * 3.14159265358979323846 * 2.0;  // rad/s
  WeightKind weight = WeightKind::VirtualAdmittance;
  double weight_r = 0.05;  // reference virtual admittance shared by all converters
  double weight_x = 0.15;
  double omega0 = 2.0 * 3.14159265358979323846 * 50.0;
};

struct Triple {
  CMat E, C, F;
};

inline cd lowpass(double wc, cd s) { return wc / (s + wc); }
inline cd highpass(double wc, cd s) { return 1.0 - lowpass(wc, s); }

class TransformSet {
 public:
  TransformSet(FrameConfig cfg, std::vector<OperatingPoint> ops);

  const FrameConfig& config() const { return cfg_; }
  FrameKind kind() const { return cfg_.kind; }
  int size() const { return static_cast<int>(polar_.size()); }
  const PolarMatrices& polar(int i) const { return polar_[i]; }

  CMat weight(cd s) const;  // W(s), improper for the virtual admittance choice
  Triple at(int i, cd s) const;
  Triple aggregate(cd s) const;

  CMat converter(const CMat& yc, int i, cd s) const;  // (E Y + C) F
  CMat network(const CMat& ynet, cd s) const;         // (E Y - C) F

  // Realization of the inverse transformed network from the port impedance.
  StateSpace network_inverse(const StateSpace& z) const;
  // Poles the transformation adds to each converter.
  std::vector<cd> converter_extra_poles() const;

 private:
  FrameConfig cfg_;
  std::vector<PolarMatrices> polar_;
};

// Y Y_v^{-1} for the RL virtual admittance (R + sL + X J)^{-1}; needs D = 0.
StateSpace va_compensation(const StateSpace& y, double r, double x, double omega0);

}  // namespace phasecert
