#pragma once

#include <vector>

#include "phasecert/converter.hpp"
#include "phasecert/network.hpp"

namespace phasecert {

struct ConverterSpec {
  int bus = 0;
  GfmParameters params;
};

// Network plus converters linearized at the power flow solution. Converter
// models are kept in their local frame and per-unit base; the global versions
// are rotated and scaled to the system base.
struct System {
  Network network;
  PowerFlowResult flow;
  std::vector<ConverterSpec> specs;
  std::vector<int> ports;  // converter bus ids
  std::vector<ConverterAdmittance> local;
  std::vector<double> angles;
  std::vector<OperatingPoint> global_ops;  // system base, global frame
  std::vector<StateSpace> yc;              // system base, global frame
  StateSpace z_ports;                      // network impedance at the ports

  int converters() const { return static_cast<int>(ports.size()); }
  StateSpace yc_block() const { return block_diagonal(yc); }
  CMat yc_at(int i, cd s) const { return evaluate(yc[i], s); }
};

System build_system(const NetworkData& data, const std::vector<ConverterSpec>& specs);

struct GroundTruth {
  bool stable = true;
  double max_real = 0.0;
  cd dominant;  // rightmost eigenvalue, upper half plane
  double dominant_hz = 0.0;
  std::vector<cd> eigenvalues;
};

GroundTruth ground_truth(const System& sys);

}  // namespace phasecert
