#include "phasecert/converter.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace phasecert {

double OperatingPoint::vmag() const { return std::hypot(vd, vq); }

Mat OperatingPoint::v0() const { return (Mat(1, 2) << vd, vq).finished(); }
Mat OperatingPoint::i0() const { return (Mat(1, 2) << id, iq).finished(); }
Mat OperatingPoint::v0e() const { return (Mat(2, 1) << -vq, vd).finished(); }
Mat OperatingPoint::i0e() const { return (Mat(2, 1) << -iq, id).finished(); }

OperatingPoint OperatingPoint::rotated(double angle) const {
  const double c = std::cos(angle), s = std::sin(angle);
  return {c * vd - s * vq, s * vd + c * vq, c * id - s * iq, s * id + c * iq};
}

OperatingPoint OperatingPoint::local(double* angle) const {
  const double a = std::atan2(vq, vd);
  if (angle) *angle = a;
  OperatingPoint out = rotated(-a);
  out.vq = 0.0;
  return out;
}

void GfmParameters::validate() const {
  std::ostringstream os;
  if (!(omega0 > 0)) os << "omega0 must be > 0; ";
  if (!(J > 0)) os << "J must be > 0; ";
  if (!(D > 0)) os << "D must be > 0; ";
  if (!(Rv >= 0)) os << "Rv must be >= 0; ";
  if (!(Xv > 0)) os << "Xv must be > 0; ";
  if (!(Xf > 0)) os << "Xf must be > 0; ";
  if (!(Rf >= 0)) os << "Rf must be >= 0; ";
  if (!(resonant_bandwidth > 0)) os << "resonant_bandwidth must be > 0; ";
  if (!(q_filter_hz > 0)) os << "q_filter_hz must be > 0; ";
  if (!(delay >= 0)) os << "delay must be >= 0; ";
  if (!(rating > 0)) os << "rating must be > 0; ";
  if (!os.str().empty()) throw std::invalid_argument("invalid converter parameters: " + os.str());
}

std::pair<std::vector<double>, std::vector<double>> resonant_controller(const GfmParameters& p) {
  const double wr = p.resonant_bandwidth, w0 = p.omega0;
  const std::vector<double> den{1.0, 2.0 * wr, w0 * w0};
  const std::vector<double> num = poly::add(poly::scale(p.kp, den), {2.0 * p.kr * wr, 0.0});
  return {num, den};
}

StateSpace terminal_and_reference_admittance(const GfmParameters& p) {
  p.validate();
  auto [pr_num, pr_den] = resonant_controller(p);
  if (p.delay > 0.0) {
    pr_num = poly::multiply(pr_num, {-0.5 * p.delay, 1.0});
    pr_den = poly::multiply(pr_den, {0.5 * p.delay, 1.0});
  }
  const std::vector<double> zf{p.Xf / p.omega0, p.Rf};
  const std::vector<double> zv{p.Xv / p.omega0, p.Rv};
  // Y_in = (Zf + PR)^{-1} (1 + PR / Zv), Y_e = (Zf + PR)^{-1} PR / Zv
  const std::vector<double> den = poly::multiply(zv, poly::add(poly::multiply(zf, pr_den), pr_num));
  const std::vector<double> y_in = poly::add(poly::multiply(pr_den, zv), pr_num);
  const StateSpace row = transfer_function_row({y_in, poly::scale(-1.0, pr_num)}, den);
  return balance(frequency_shift(row, p.omega0));
}

StateSpace build_inner_admittance(const GfmParameters& p, const OperatingPoint& op) {
  const StateSpace g = terminal_and_reference_admittance(p);
  if (!p.q_control) return StateSpace(g.A, g.B.leftCols(2), g.C, g.D.leftCols(2));

  // The reactive power loop acts on the d component of the voltage reference:
  // e_d = PI(s) LPF(s) Q with Q absorbed, linearized about op.
  Mat pick = Mat::Zero(4, 3);
  pick.topLeftCorner(2, 2).setIdentity();
  pick(2, 2) = 1.0;
  const StateSpace gi = right_multiply(g, pick);  // inputs [v; e_d]
  const Mat eq = (Mat(1, 2) << op.vq, -op.vd).finished();
  const Mat cq = (Mat(1, 2) << -op.iq, op.id).finished();
  Mat out = Mat::Zero(3, 2);
  out.topRows(2).setIdentity();
  out.row(2) = eq;
  Mat dq = Mat::Zero(3, 3);
  dq.block(2, 0, 1, 2) = cq;
  const StateSpace plant = parallel(left_multiply(out, gi), StateSpace::gain(dq));

  const double wq = 2.0 * std::numbers::pi * p.q_filter_hz;
  const StateSpace pi = transfer_function({p.kpq, p.kiq}, {1.0, 0.0});
  const StateSpace lpf = transfer_function({wq}, {1.0, wq});
  return balance(lft(plant, series(lpf, pi), 2, 2, +1));
}

StateSpace swing_filter(const GfmParameters& p) { return transfer_function({1.0}, {p.J, p.D}); }

StateSpace power_gain(const StateSpace& ydq, const OperatingPoint& op) {
  return parallel(left_multiply(op.v0(), ydq), StateSpace::gain(op.i0()));
}

StateSpace synchronization_gain(const StateSpace& hp, const StateSpace& gp) {
  if (hp.inputs() != 1 || hp.outputs() != 1) throw std::invalid_argument("H_P must be scalar");
  return series(gp, series(hp, StateSpace::integrator(1)));
}

StateSpace frame_embed(const StateSpace& ydq, const StateSpace& kv, const OperatingPoint& op) {
  // v_dq = v_DQ - V0e eps, i_DQ = i_dq + I0e eps, eps = K_v v_dq
  Mat in = Mat::Zero(2, 3);
  in.leftCols(2).setIdentity();
  in.col(2) = -op.v0e();
  Mat stack = Mat::Zero(4, 2);
  stack.topRows(2).setIdentity();
  Mat extra = Mat::Zero(4, 3);
  extra.block(0, 2, 2, 1) = op.i0e();
  extra.bottomRows(2) = in;
  const StateSpace plant = parallel(left_multiply(stack, right_multiply(ydq, in)), StateSpace::gain(extra));
  return balance(lft(plant, kv, 2, 2, +1));
}

CMat embed_scalar_form(const CMat& ydq, const CMat& kv, const OperatingPoint& op) {
  const CMat v0e = op.v0e().cast<cd>(), i0e = op.i0e().cast<cd>();
  const cd den = 1.0 + (kv * v0e)(0, 0);
  return ydq - (ydq * v0e - i0e) * kv / den;
}

ConverterAdmittance build_converter(const GfmParameters& p, const OperatingPoint& op) {
  if (!(op.vmag() > 0.0)) throw AssumptionViolated("operating point has zero voltage");
  ConverterAdmittance c;
  c.op = op;
  c.Ydq = build_inner_admittance(p, op);
  const StateSpace hp = swing_filter(p);
  c.Kv = synchronization_gain(hp, power_gain(c.Ydq, op));

  // Plant from [v_DQ; eps] to [i_DQ; P]; the loop eps = H_P / s P is closed
  // around it so the inner states appear once.
  Mat in = Mat::Zero(2, 3);
  in.leftCols(2).setIdentity();
  in.col(2) = -op.v0e();
  Mat stack(3, 2);
  stack << 1, 0, 0, 1, op.vd, op.vq;
  Mat n = Mat::Zero(3, 3);
  n.block(0, 2, 2, 1) = op.i0e();
  n.block(2, 0, 1, 2) = op.i0();
  n(2, 2) = -(op.i0() * op.v0e())(0, 0);
  const StateSpace plant = parallel(left_multiply(stack, right_multiply(c.Ydq, in)), StateSpace::gain(n));
  const StateSpace loop = series(hp, StateSpace::integrator(1));
  c.YDQ = balance(lft(plant, loop, 2, 2, +1));
  return c;
}

DcTemplateReport check_dc_template(const ConverterAdmittance& conv) {
  const OperatingPoint& op = conv.op;
  const double v = op.vmag();
  if (std::abs(op.vq) > 1e-12 * v || !(op.vd > 0.0))
    throw AssumptionViolated("operating point must be in its local frame (vq = 0, vd > 0)");
  const CMat kv0_dir = evaluate(conv.Kv, cd(1e-3, 0.0)) * op.v0e().cast<cd>();
  if (std::abs(kv0_dir(0, 0)) == 0.0) throw AssumptionViolated("K_v V0e vanishes identically");

  DcTemplateReport r;
  r.y0 = evaluate(conv.YDQ, 0.0);
  const double vd = op.vd;
  r.beta = r.y0(1, 0).real();
  r.trace = std::abs(r.y0.trace());
  r.template_residual = std::max({std::abs(r.y0(0, 0) - cd(-op.id / vd)), std::abs(r.y0(0, 1) - cd(-op.iq / vd)),
                                  std::abs(r.y0(1, 1) - cd(op.id / vd)), std::abs(r.y0(1, 0).imag()),
                                  r.y0.imag().cwiseAbs().maxCoeff()});
  r.identity_residual = (r.y0 * op.v0e().cast<cd>() - op.i0e().cast<cd>()).norm();
  r.phase = analyze(r.y0);
  return r;
}

StateSpace virtual_admittance(double r, double x, double omega0) {
  return frequency_shift(transfer_function({1.0}, {x / omega0, r}), omega0);
}

}  // namespace phasecert
