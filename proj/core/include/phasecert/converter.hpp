#pragma once

#include <numbers>

#include "phasecert/lti.hpp"
#include "phasecert/phase.hpp"

namespace phasecert {

struct AssumptionViolated : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Steady-state voltage and current (load convention, current into the device).
struct OperatingPoint {
  double vd = 1.0, vq = 0.0, id = 0.0, iq = 0.0;

  double vmag() const;
  Mat v0() const;   // [vd, vq]
  Mat i0() const;   // [id, iq]
  Mat v0e() const;  // [-vq; vd]
  Mat i0e() const;  // [-iq; id]
  double p() const { return vd * id + vq * iq; }
  double q() const { return vq * id - vd * iq; }
  // Same point expressed in a frame rotated by +angle.
  OperatingPoint rotated(double angle) const;
  // Rotated so that vq = 0 and vd > 0; returns the angle removed.
  OperatingPoint local(double* angle = nullptr) const;
};

struct GfmParameters {
  double omega0 = 2.0 * std::numbers::pi * 50.0;
  double J = 0.02;  // inertia, H_P = 1 / (J s + D)
  double D = 0.5;
  double Rv = 0.05;  // virtual admittance, reactances in pu at omega0
  double Xv = 0.15;
  double kp = 1.0;  // PR current controller
  double kr = 100.0;
  double resonant_bandwidth = 5.0;  // rad/s
  double Rf = 0.005;  // output filter
  double Xf = 0.1;
  bool q_control = false;
  double kpq = 0.1;
  double kiq = 10.0;
  double q_filter_hz = 2.0;
  double delay = 0.0;  // first order Pade on the modulation, seconds
  double rating = 1.0;  // converter base over system base

  void validate() const;
};

struct ConverterAdmittance {
  StateSpace Ydq;  // swing-frame inner loops
  StateSpace Kv;   // voltage to angle, 1x2
  StateSpace YDQ;  // local steady frame
  OperatingPoint op;
};

// Resonant controller k_p + k_r 2 w_r s / (s^2 + 2 w_r s + w0^2) as polynomials.
std::pair<std::vector<double>, std::vector<double>> resonant_controller(const GfmParameters& p);

// Current into the converter from terminal voltage and from the voltage
// reference, i = Y_in v - Y_e e, both 2x2 in the swing frame.
StateSpace terminal_and_reference_admittance(const GfmParameters& p);

StateSpace build_inner_admittance(const GfmParameters& p, const OperatingPoint& op = {});
StateSpace swing_filter(const GfmParameters& p);
StateSpace power_gain(const StateSpace& ydq, const OperatingPoint& op);
StateSpace synchronization_gain(const StateSpace& hp, const StateSpace& gp);

// (Y_dq + I0e K_v)(I + V0e K_v)^{-1} for an arbitrary K_v.
StateSpace frame_embed(const StateSpace& ydq, const StateSpace& kv, const OperatingPoint& op);

// Y_dq - (Y_dq V0e - I0e) K_v / (1 + K_v V0e), evaluated pointwise.
CMat embed_scalar_form(const CMat& ydq, const CMat& kv, const OperatingPoint& op);

// Full converter with a minimal realization of the synchronization loop.
ConverterAdmittance build_converter(const GfmParameters& p, const OperatingPoint& op);

struct DcTemplateReport {
  CMat y0;
  double beta = 0.0;
  double trace = 0.0;
  double template_residual = 0.0;  // max deviation from the structural entries
  double identity_residual = 0.0;  // |Y(0) V0e - I0e|
  MatrixPhase phase;
};

DcTemplateReport check_dc_template(const ConverterAdmittance& conv);

// Virtual admittance (R + s L + X J)^{-1} with L = X / w0.
StateSpace virtual_admittance(double r, double x, double omega0);

}  // namespace phasecert
