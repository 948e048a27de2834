#include "phasecert/transforms.hpp"

#include <cmath>

namespace phasecert {

FrameKind parse_frame(const std::string& s) {
  if (s == "rectangular" || s == "rect") return FrameKind::Rectangular;
  if (s == "power-polar" || s == "polar") return FrameKind::PowerPolar;
  if (s == "blended" || s == "blend") return FrameKind::Blended;
  if (s == "naive-blended" || s == "naive") return FrameKind::NaiveBlended;
  throw std::invalid_argument("unknown frame '" + s + "' (rectangular, power-polar, blended, naive-blended)");
}

std::string to_string(FrameKind k) {
  switch (k) {
    case FrameKind::Rectangular:
      return "rectangular";
    case FrameKind::PowerPolar:
      return "power-polar";
    case FrameKind::Blended:
      return "blended";
    case FrameKind::NaiveBlended:
      return "naive-blended";
  }
  return "rectangular";
}

WeightKind parse_weight(const std::string& s) {
  if (s == "identity") return WeightKind::Identity;
  if (s == "va_ref" || s == "virtual-admittance") return WeightKind::VirtualAdmittance;
  throw std::invalid_argument("unknown weight '" + s + "' (identity, va_ref)");
}

std::string to_string(WeightKind k) { return k == WeightKind::Identity ? "identity" : "va_ref"; }

PolarMatrices polar_matrices(const OperatingPoint& op) {
  const double v2 = op.vd * op.vd + op.vq * op.vq, v = std::sqrt(v2);
  if (!(v > 0.0)) throw std::invalid_argument("power-polar frame needs a nonzero voltage");
  PolarMatrices m;
  m.E = (Mat(2, 2) << op.vd, op.vq, op.vq, -op.vd).finished();
  m.C = (Mat(2, 2) << op.id, op.iq, -op.iq, op.id).finished();
  m.Finv = (Mat(2, 2) << -op.vq / v2, op.vd / v2, op.vd / v, op.vq / v).finished();
  m.F = m.Finv.inverse();
  return m;
}

TransformSet::TransformSet(FrameConfig cfg, std::vector<OperatingPoint> ops) : cfg_(cfg) {
  if ((cfg_.kind == FrameKind::Blended || cfg_.kind == FrameKind::NaiveBlended) && !(cfg_.wc > 0.0))
    throw std::invalid_argument("blend cutoff must be positive");
  for (const auto& op : ops) polar_.push_back(polar_matrices(op));
}

CMat TransformSet::weight(cd s) const {
  if (cfg_.weight == WeightKind::Identity) return CMat::Identity(2, 2);
  CMat w(2, 2);
  const cd d = cfg_.weight_r + s * cfg_.weight_x / cfg_.omega0;
  w << d, -cfg_.weight_x, cfg_.weight_x, d;
  return w;
}

Triple TransformSet::at(int i, cd s) const {
  const auto& m = polar_[i];
  const CMat eye = CMat::Identity(2, 2);
  switch (cfg_.kind) {
    case FrameKind::Rectangular:
      return {eye, CMat::Zero(2, 2), eye};
    case FrameKind::PowerPolar:
      return {m.E.cast<cd>(), m.C.cast<cd>(), m.F.cast<cd>()};
    case FrameKind::Blended: {
      const cd hl = lowpass(cfg_.wc, s), hh = highpass(cfg_.wc, s);
      return {m.E.cast<cd>(), hl * m.C.cast<cd>(), hl * m.F.cast<cd>() + hh * weight(s) * m.E.inverse().cast<cd>()};
    }
    case FrameKind::NaiveBlended: {
      const cd hl = lowpass(cfg_.wc, s), hh = highpass(cfg_.wc, s);
      return {hl * m.E.cast<cd>() + hh * eye, hl * m.C.cast<cd>(), hl * m.F.cast<cd>() + hh * eye};
    }
  }
  return {eye, CMat::Zero(2, 2), eye};
}

Triple TransformSet::aggregate(cd s) const {
  const int n = size();
  Triple t{CMat::Zero(2 * n, 2 * n), CMat::Zero(2 * n, 2 * n), CMat::Zero(2 * n, 2 * n)};
  for (int i = 0; i < n; ++i) {
    const Triple ti = at(i, s);
    t.E.block(2 * i, 2 * i, 2, 2) = ti.E;
    t.C.block(2 * i, 2 * i, 2, 2) = ti.C;
    t.F.block(2 * i, 2 * i, 2, 2) = ti.F;
  }
  return t;
}

CMat TransformSet::converter(const CMat& yc, int i, cd s) const {
  const Triple t = at(i, s);
  return (t.E * yc + t.C) * t.F;
}

CMat TransformSet::network(const CMat& ynet, cd s) const {
  const Triple t = aggregate(s);
  return (t.E * ynet - t.C) * t.F;
}

namespace {

Mat blkdiag(const std::vector<Mat>& parts) {
  int n = 0;
  for (const auto& p : parts) n += static_cast<int>(p.rows());
  Mat out = Mat::Zero(n, n);
  int k = 0;
  for (const auto& p : parts) {
    out.block(k, k, p.rows(), p.cols()) = p;
    k += static_cast<int>(p.rows());
  }
  return out;
}

// wc / (s + wc) times a constant matrix, one filter state per channel.
StateSpace lowpass_times(double wc, const Mat& m) {
  const int n = static_cast<int>(m.rows());
  return {-wc * Mat::Identity(n, n), wc * m, Mat::Identity(n, n), Mat::Zero(n, n)};
}

// I + (wc / (s + wc)) (m - I), biproper.
StateSpace blend_with_identity(double wc, const Mat& m) {
  const int n = static_cast<int>(m.rows());
  return {-wc * Mat::Identity(n, n), wc * Mat::Identity(n, n), m - Mat::Identity(n, n), Mat::Identity(n, n)};
}

}  // namespace

StateSpace TransformSet::network_inverse(const StateSpace& z) const {
  const int n = size();
  if (z.inputs() != 2 * n) throw std::invalid_argument("network impedance size does not match the transform");
  std::vector<Mat> es, cs, fs, finvs, einvs;
  for (const auto& m : polar_) {
    es.push_back(m.E);
    cs.push_back(m.C);
    fs.push_back(m.F);
    finvs.push_back(m.Finv);
    einvs.push_back(m.E.inverse());
  }
  const Mat e = blkdiag(es), c = blkdiag(cs), f = blkdiag(fs), finv = blkdiag(finvs), einv = blkdiag(einvs);
  const double wc = cfg_.wc;

  switch (cfg_.kind) {
    case FrameKind::Rectangular:
      return z;
    case FrameKind::PowerPolar: {
      // (E Y - C)^{-1} = Z (I - E^{-1} C Z)^{-1} E^{-1}
      const StateSpace zp = feedback(z, StateSpace::gain(einv * c), +1);
      return left_multiply(finv, right_multiply(zp, einv));
    }
    case FrameKind::Blended: {
      const StateSpace zp = feedback(z, lowpass_times(wc, einv * c), +1);
      StateSpace finv_ss;
      if (cfg_.weight == WeightKind::Identity) {
        // F = E^{-1} + H (F_J - E^{-1})
        const StateSpace fss(-wc * Mat::Identity(2 * n, 2 * n), wc * Mat::Identity(2 * n, 2 * n), f - einv, einv);
        finv_ss = inverse(fss);
      } else {
        // F E = Y_ref^{-1} (s I + wc G) / (s + wc) with G = Y_ref F_J E, hence
        // F^{-1} = E (I + wc (I - G) (s I + wc G)^{-1}) Y_ref.
        std::vector<StateSpace> parts;
        for (int i = 0; i < n; ++i) {
          const StateSpace yref = virtual_admittance(cfg_.weight_r, cfg_.weight_x, cfg_.omega0);
          const StateSpace g = right_multiply(yref, polar_[i].F * polar_[i].E);
          const StateSpace x = feedback(StateSpace::integrator(2), scale(wc, g), -1);
          const StateSpace igx = multiply(parallel(StateSpace::gain(Mat::Identity(2, 2)), scale(-1.0, g)), x);
          const StateSpace mid = parallel(StateSpace::gain(Mat::Identity(2, 2)), scale(wc, igx));
          parts.push_back(left_multiply(polar_[i].E, multiply(mid, yref)));
        }
        finv_ss = block_diagonal(parts);
      }
      return multiply(finv_ss, right_multiply(zp, einv));
    }
    case FrameKind::NaiveBlended: {
      // (E Y - C)^{-1} = Z (E - C Z)^{-1}
      const StateSpace ess = blend_with_identity(wc, e);
      const StateSpace cz = multiply(lowpass_times(wc, c), z);
      const StateSpace m = parallel(ess, scale(-1.0, cz));
      const StateSpace core = multiply(z, inverse(m));
      return multiply(inverse(blend_with_identity(wc, f)), core);
    }
  }
  return z;
}

std::vector<cd> TransformSet::converter_extra_poles() const {
  if (cfg_.kind == FrameKind::Blended || cfg_.kind == FrameKind::NaiveBlended) return {cd(-cfg_.wc, 0.0)};
  return {};
}

StateSpace va_compensation(const StateSpace& y, double r, double x, double omega0) {
  if (!(x > 0.0) || r < 0.0) throw std::invalid_argument("virtual admittance must have X > 0 and R >= 0");
  if (y.inputs() != 2) throw std::invalid_argument("compensation expects a 2-input model");
  if (y.D.cwiseAbs().maxCoeff() > 0.0)
    throw std::invalid_argument("compensated model would be improper: Y needs zero feedthrough");
  // Y (R + X J) + L s Y with s Y = C A (sI - A)^{-1} B + C B
  const double l = x / omega0;
  const Mat rx = r * Mat::Identity(2, 2) + x * rot90();
  const int n = y.states();
  Mat a = Mat::Zero(2 * n, 2 * n);
  a.topLeftCorner(n, n) = y.A;
  a.bottomRightCorner(n, n) = y.A;
  Mat b(2 * n, 2);
  b << y.B * rx, y.B;
  Mat c(y.outputs(), 2 * n);
  c << y.C, l * y.C * y.A;
  return {a, b, c, l * y.C * y.B};
}

}  // namespace phasecert
