#include "phasecert/lti.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace phasecert {

namespace {

void check_dims(const StateSpace& g) {
  const auto n = g.A.rows();
  if (g.A.cols() != n || g.B.rows() != n || g.C.cols() != n || g.C.rows() != g.D.rows() ||
      g.B.cols() != g.D.cols()) {
    std::ostringstream os;
    os << "inconsistent state-space dimensions: A " << g.A.rows() << "x" << g.A.cols() << ", B "
       << g.B.rows() << "x" << g.B.cols() << ", C " << g.C.rows() << "x" << g.C.cols() << ", D "
       << g.D.rows() << "x" << g.D.cols();
    throw std::invalid_argument(os.str());
  }
}

Mat block2(const Mat& a, const Mat& b) {
  Mat out = Mat::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  out.topLeftCorner(a.rows(), a.cols()) = a;
  out.bottomRightCorner(b.rows(), b.cols()) = b;
  return out;
}

}  // namespace

StateSpace::StateSpace(Mat a, Mat b, Mat c, Mat d)
    : A(std::move(a)), B(std::move(b)), C(std::move(c)), D(std::move(d)) {
  check_dims(*this);
}

StateSpace StateSpace::gain(const Mat& d) {
  return {Mat(0, 0), Mat(0, d.cols()), Mat(d.rows(), 0), d};
}

StateSpace StateSpace::zero(int outputs, int inputs) { return gain(Mat::Zero(outputs, inputs)); }

StateSpace StateSpace::integrator(int width) {
  return {Mat::Zero(width, width), Mat::Identity(width, width), Mat::Identity(width, width),
          Mat::Zero(width, width)};
}

CMat evaluate(const StateSpace& g, cd s) {
  CMat d = g.D.cast<cd>();
  if (g.states() == 0) return d;
  const int n = g.states();
  CMat m = -g.A.cast<cd>();
  m.diagonal().array() += s;
  Eigen::PartialPivLU<CMat> lu(m);
  if (!(lu.rcond() > 1e-14)) {
    std::ostringstream os;
    os << "resolvent singular at s = " << s.real() << (s.imag() < 0 ? "-" : "+") << std::abs(s.imag())
       << "j (n = " << n << ")";
    throw SingularResolvent(os.str());
  }
  return g.C.cast<cd>() * lu.solve(g.B.cast<cd>()) + d;
}

StateSpace series(const StateSpace& g1, const StateSpace& g2) {
  if (g1.outputs() != g2.inputs()) throw std::invalid_argument("series: dimension mismatch");
  const int n1 = g1.states(), n2 = g2.states();
  Mat a = Mat::Zero(n1 + n2, n1 + n2);
  a.topLeftCorner(n1, n1) = g1.A;
  a.bottomLeftCorner(n2, n1) = g2.B * g1.C;
  a.bottomRightCorner(n2, n2) = g2.A;
  Mat b(n1 + n2, g1.inputs());
  b << g1.B, g2.B * g1.D;
  Mat c(g2.outputs(), n1 + n2);
  c << g2.D * g1.C, g2.C;
  return {a, b, c, g2.D * g1.D};
}

StateSpace multiply(const StateSpace& g1, const StateSpace& g2) { return series(g2, g1); }

StateSpace parallel(const StateSpace& g1, const StateSpace& g2) {
  if (g1.inputs() != g2.inputs() || g1.outputs() != g2.outputs())
    throw std::invalid_argument("parallel: dimension mismatch");
  Mat b(g1.states() + g2.states(), g1.inputs());
  b << g1.B, g2.B;
  Mat c(g1.outputs(), g1.states() + g2.states());
  c << g1.C, g2.C;
  return {block2(g1.A, g2.A), b, c, g1.D + g2.D};
}

StateSpace scale(double k, const StateSpace& g) { return {g.A, g.B, k * g.C, k * g.D}; }

StateSpace left_multiply(const Mat& m, const StateSpace& g) { return {g.A, g.B, m * g.C, m * g.D}; }

StateSpace right_multiply(const StateSpace& g, const Mat& m) { return {g.A, g.B * m, g.C, g.D * m}; }

StateSpace block_diagonal(const std::vector<StateSpace>& parts) {
  StateSpace out = StateSpace::zero(0, 0);
  for (const auto& p : parts) {
    out = StateSpace(block2(out.A, p.A), block2(out.B, p.B), block2(out.C, p.C), block2(out.D, p.D));
  }
  return out;
}

StateSpace lft(const StateSpace& p, const StateSpace& k, int nw, int nz, int sign) {
  const int nu = k.outputs(), ny = k.inputs();
  if (p.inputs() != nw + nu || p.outputs() != nz + ny)
    throw std::invalid_argument("lft: channel sizes do not match the plant");
  const int n1 = p.states(), n2 = k.states();
  const double sg = sign >= 0 ? 1.0 : -1.0;

  const Mat bw = p.B.leftCols(nw), bu = p.B.rightCols(nu);
  const Mat cz = p.C.topRows(nz), cy = p.C.bottomRows(ny);
  const Mat dzw = p.D.topLeftCorner(nz, nw), dzu = p.D.topRightCorner(nz, nu);
  const Mat dyw = p.D.bottomLeftCorner(ny, nw), dyu = p.D.bottomRightCorner(ny, nu);

  const Mat loop = Mat::Identity(nu, nu) - sg * k.D * dyu;
  Eigen::FullPivLU<Mat> lu(loop);
  if (!lu.isInvertible() || lu.rcond() < 1e-13) throw IllPosedLoop("feedthrough loop is singular");
  const Mat q = lu.inverse();

  // u = ux x + uk xk + uw w
  const Mat ux = sg * q * k.D * cy;
  const Mat uk = sg * q * k.C;
  const Mat uw = sg * q * k.D * dyw;
  // y = yx x + yk xk + yw w
  const Mat yx = cy + dyu * ux;
  const Mat yk = dyu * uk;
  const Mat yw = dyw + dyu * uw;

  Mat a(n1 + n2, n1 + n2);
  a << p.A + bu * ux, bu * uk, k.B * yx, k.A + k.B * yk;
  Mat b(n1 + n2, nw);
  b << bw + bu * uw, k.B * yw;
  Mat c(nz, n1 + n2);
  c << cz + dzu * ux, dzu * uk;
  return {a, b, c, dzw + dzu * uw};
}

StateSpace feedback(const StateSpace& g1, const StateSpace& g2, int sign) {
  const int m = g1.inputs(), p = g1.outputs();
  if (g2.inputs() != p || g2.outputs() != m) throw std::invalid_argument("feedback: dimension mismatch");
  Mat b(g1.states(), 2 * m);
  b << g1.B, g1.B;
  Mat c(2 * p, g1.states());
  c << g1.C, g1.C;
  Mat d(2 * p, 2 * m);
  d << g1.D, g1.D, g1.D, g1.D;
  return lft(StateSpace(g1.A, b, c, d), g2, m, p, sign);
}

StateSpace inverse(const StateSpace& g) {
  if (g.inputs() != g.outputs()) throw std::invalid_argument("inverse: system is not square");
  Eigen::FullPivLU<Mat> lu(g.D);
  if (!lu.isInvertible() || lu.rcond() < 1e-13) throw IllPosedLoop("inverse: feedthrough is singular");
  const Mat di = lu.inverse();
  return {g.A - g.B * di * g.C, g.B * di, -di * g.C, di};
}

StateSpace transfer_function(const std::vector<double>& num_in, const std::vector<double>& den_in) {
  if (den_in.empty() || den_in.front() == 0.0) throw std::invalid_argument("leading denominator coefficient is zero");
  if (num_in.size() > den_in.size()) throw std::invalid_argument("improper transfer function");
  const int n = static_cast<int>(den_in.size()) - 1;
  const double a0 = den_in.front();
  std::vector<double> den(den_in.size()), num(den_in.size(), 0.0);
  for (std::size_t i = 0; i < den.size(); ++i) den[i] = den_in[i] / a0;
  const std::size_t pad = den_in.size() - num_in.size();
  for (std::size_t i = 0; i < num_in.size(); ++i) num[pad + i] = num_in[i] / a0;

  if (n == 0) return StateSpace::gain(Mat::Constant(1, 1, num[0]));
  Mat a = Mat::Zero(n, n), b = Mat::Zero(n, 1), c(1, n), d(1, 1);
  for (int j = 0; j < n; ++j) a(0, j) = -den[j + 1];
  for (int i = 1; i < n; ++i) a(i, i - 1) = 1.0;
  b(0, 0) = 1.0;
  for (int j = 0; j < n; ++j) c(0, j) = num[j + 1] - num[0] * den[j + 1];
  d(0, 0) = num[0];
  return balance({a, b, c, d});
}

StateSpace transfer_function_row(const std::vector<std::vector<double>>& nums, const std::vector<double>& den_in) {
  if (den_in.empty() || den_in.front() == 0.0) throw std::invalid_argument("leading denominator coefficient is zero");
  const int n = static_cast<int>(den_in.size()) - 1;
  const int m = static_cast<int>(nums.size());
  const double a0 = den_in.front();
  std::vector<double> den(den_in.size());
  for (std::size_t i = 0; i < den.size(); ++i) den[i] = den_in[i] / a0;

  Mat a = Mat::Zero(n, n), b = Mat::Zero(n, m), c = Mat::Zero(1, n), d = Mat::Zero(1, m);
  for (int i = 0; i < n; ++i) {
    a(i, 0) = -den[i + 1];
    if (i + 1 < n) a(i, i + 1) = 1.0;
  }
  if (n > 0) c(0, 0) = 1.0;
  for (int j = 0; j < m; ++j) {
    if (nums[j].size() > den_in.size()) throw std::invalid_argument("improper transfer function");
    std::vector<double> num(den_in.size(), 0.0);
    const std::size_t pad = den_in.size() - nums[j].size();
    for (std::size_t i = 0; i < nums[j].size(); ++i) num[pad + i] = nums[j][i] / a0;
    d(0, j) = num[0];
    for (int i = 0; i < n; ++i) b(i, j) = num[i + 1] - num[0] * den[i + 1];
  }
  return balance({a, b, c, d});
}

StateSpace balance(const StateSpace& g) {
  const int n = g.states();
  if (n == 0) return g;
  Mat a = g.A, b = g.B, c = g.C;
  bool done = false;
  for (int sweep = 0; sweep < 100 && !done; ++sweep) {
    done = true;
    for (int i = 0; i < n; ++i) {
      const double col = a.col(i).cwiseAbs().sum() - std::abs(a(i, i));
      const double row = a.row(i).cwiseAbs().sum() - std::abs(a(i, i));
      if (col == 0.0 || row == 0.0) continue;
      double f = 1.0;
      const double s = col + row;
      double cc = col, rr = row;
      while (cc < rr / 2.0) {
        cc *= 2.0;
        rr /= 2.0;
        f *= 2.0;
      }
      while (cc >= rr * 2.0) {
        cc /= 2.0;
        rr *= 2.0;
        f /= 2.0;
      }
      if ((cc + rr) < 0.95 * s) {
        done = false;
        a.col(i) *= f;
        a.row(i) /= f;
        c.col(i) *= f;
        b.row(i) /= f;
      }
    }
  }
  return {a, b, c, g.D};
}

StateSpace frequency_shift(const StateSpace& g, double w0) {
  const int n = g.states(), m = g.inputs(), p = g.outputs();
  Mat a(2 * n, 2 * n);
  a << g.A, w0 * Mat::Identity(n, n), -w0 * Mat::Identity(n, n), g.A;
  Mat b = Mat::Zero(2 * n, 2 * m), c = Mat::Zero(2 * p, 2 * n), d = Mat::Zero(2 * p, 2 * m);
  for (int j = 0; j < m; ++j) {
    b.block(0, 2 * j, n, 1) = g.B.col(j);
    b.block(n, 2 * j + 1, n, 1) = g.B.col(j);
  }
  for (int k = 0; k < p; ++k) {
    c.block(2 * k, 0, 1, n) = g.C.row(k);
    c.block(2 * k + 1, n, 1, n) = g.C.row(k);
    for (int j = 0; j < m; ++j) {
      d(2 * k, 2 * j) = g.D(k, j);
      d(2 * k + 1, 2 * j + 1) = g.D(k, j);
    }
  }
  return {a, b, c, d};
}

std::vector<cd> poles(const StateSpace& g) {
  std::vector<cd> out;
  if (g.states() == 0) return out;
  Eigen::EigenSolver<Mat> es(g.A, false);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigenvalue computation failed");
  const CVec ev = es.eigenvalues();
  out.assign(ev.data(), ev.data() + ev.size());
  std::sort(out.begin(), out.end(), [](cd x, cd y) {
    if (x.real() != y.real()) return x.real() > y.real();
    return x.imag() > y.imag();
  });
  return out;
}

StabilityResult spectrum_stability(std::vector<cd> spectrum, double margin) {
  StabilityResult r;
  for (const cd& p : spectrum) {
    r.max_real = std::max(r.max_real, p.real());
    if (p.real() >= -margin - kRealTolerance) r.stable = false;
  }
  r.spectrum = std::move(spectrum);
  return r;
}

StabilityResult is_stable(const StateSpace& g, double margin) { return spectrum_stability(poles(g), margin); }

Mat rot90() {
  Mat j(2, 2);
  j << 0.0, -1.0, 1.0, 0.0;
  return j;
}

Mat complex_block(cd g) {
  Mat m(2, 2);
  m << g.real(), -g.imag(), g.imag(), g.real();
  return m;
}

FrequencyGrid::FrequencyGrid(std::vector<double> hz) : hz_(std::move(hz)) {
  for (double f : hz_)
    if (!(f >= 0.0) || !std::isfinite(f)) throw std::invalid_argument("grid frequencies must be finite and >= 0");
  std::sort(hz_.begin(), hz_.end());
  hz_.erase(std::unique(hz_.begin(), hz_.end()), hz_.end());
}

FrequencyGrid FrequencyGrid::logspace(double fmin_hz, double fmax_hz, int points, bool include_zero) {
  if (!(fmin_hz > 0.0) || !(fmax_hz > fmin_hz) || points < 2)
    throw std::invalid_argument("logspace grid needs 0 < fmin < fmax and at least 2 points");
  std::vector<double> hz;
  if (include_zero) hz.push_back(0.0);
  const double l0 = std::log10(fmin_hz), l1 = std::log10(fmax_hz);
  for (int i = 0; i < points; ++i) hz.push_back(std::pow(10.0, l0 + (l1 - l0) * i / (points - 1)));
  return FrequencyGrid(std::move(hz));
}

namespace poly {

std::vector<double> multiply(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.empty() || b.empty()) return {};
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

std::vector<double> add(const std::vector<double>& a, const std::vector<double>& b) {
  const std::size_t n = std::max(a.size(), b.size());
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) out[n - a.size() + i] += a[i];
  for (std::size_t i = 0; i < b.size(); ++i) out[n - b.size() + i] += b[i];
  return out;
}

std::vector<double> scale(double k, const std::vector<double>& a) {
  std::vector<double> out(a);
  for (double& x : out) x *= k;
  return out;
}

cd evaluate(const std::vector<double>& a, cd s) {
  cd acc = 0.0;
  for (double c : a) acc = acc * s + c;
  return acc;
}

}  // namespace poly

}  // namespace phasecert
