#include "phasecert/phase.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

namespace phasecert {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kScan = 720;

struct Parts {
  CMat h;  // Hermitian part
  CMat s;  // skew part divided by j, so A = h + j s
};

Parts split(const CMat& a) {
  const CMat ah = a.adjoint();
  return {(a + ah) / 2.0, (a - ah) / cd(0.0, 2.0)};
}

double min_eig(const CMat& m) {
  if (m.rows() == 1) return m(0, 0).real();
  if (m.rows() == 2) {
    const double p = m(0, 0).real(), q = m(1, 1).real();
    return 0.5 * (p + q) - std::hypot(0.5 * (p - q), std::abs(m(0, 1)));
  }
  Eigen::SelfAdjointEigenSolver<CMat> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

// Herm(e^{j t} A) = cos t H - sin t S
double lmin(const Parts& p, double t) { return min_eig(std::cos(t) * p.h - std::sin(t) * p.s); }

double golden_max(const Parts& p, double a, double b) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = lmin(p, c), fd = lmin(p, d);
  for (int it = 0; it < 80 && b - a > 1e-15; ++it) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = lmin(p, c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = lmin(p, d);
    }
  }
  return 0.5 * (a + b);
}

double sigma_max(const CMat& a) {
  Eigen::JacobiSVD<CMat> svd(a);
  return svd.singularValues()(0);
}

// Centre the phase set on (-pi, pi].
void normalize(std::vector<double>& ph) {
  std::sort(ph.begin(), ph.end());
  if (ph.empty()) return;
  const double c = 0.5 * (ph.front() + ph.back());
  double k = std::round(c / (2.0 * kPi));
  if (c - 2.0 * kPi * k <= -kPi) k -= 1.0;
  for (double& x : ph) x -= 2.0 * kPi * k;
}

std::vector<double> congruence_phases(const CMat& h, const CMat& s) {
  Eigen::SelfAdjointEigenSolver<CMat> eh(h);
  const Vec w = eh.eigenvalues();
  const CMat& u = eh.eigenvectors();
  CMat hm = u * w.cwiseMax(1e-300).cwiseSqrt().cwiseInverse().cast<cd>().asDiagonal() * u.adjoint();
  CMat m = hm * s * hm;
  m = (m + m.adjoint()).eval() / 2.0;
  Eigen::SelfAdjointEigenSolver<CMat> em(m, Eigen::EigenvaluesOnly);
  std::vector<double> out;
  for (int i = 0; i < em.eigenvalues().size(); ++i) out.push_back(std::atan(em.eigenvalues()(i)));
  return out;
}

MatrixPhase finish(MatrixPhase r, std::vector<double> ph) {
  for (double& x : ph) x -= r.theta;
  normalize(ph);
  r.phases = std::move(ph);
  if (!r.phases.empty()) {
    r.lo = r.phases.front();
    r.hi = r.phases.back();
  } else {
    r.lo = r.hi = -r.theta;
  }
  return r;
}

// 0 lies on the boundary of W(A); work on the regular part of Herm(e^{j theta} A).
MatrixPhase boundary_phases(MatrixPhase r, const Parts& p, double tol) {
  const double c = std::cos(r.theta), sn = std::sin(r.theta);
  const CMat h = c * p.h - sn * p.s;
  const CMat s = sn * p.h + c * p.s;
  Eigen::SelfAdjointEigenSolver<CMat> eh(h);
  const Vec w = eh.eigenvalues();
  const CMat& u = eh.eigenvectors();
  std::vector<int> ker, reg;
  for (int i = 0; i < w.size(); ++i) (w(i) <= tol ? ker : reg).push_back(i);

  CMat uk(u.rows(), ker.size()), ur(u.rows(), reg.size());
  for (std::size_t i = 0; i < ker.size(); ++i) uk.col(i) = u.col(ker[i]);
  for (std::size_t i = 0; i < reg.size(); ++i) ur.col(i) = u.col(reg[i]);
  const CMat skk = uk.adjoint() * s * uk;
  const CMat srk = ur.adjoint() * s * uk;
  const CMat srr = ur.adjoint() * s * ur;
  CMat hr = CMat::Zero(reg.size(), reg.size());
  for (std::size_t i = 0; i < reg.size(); ++i) hr(i, i) = w(reg[i]);

  const double skk_norm = skk.size() ? skk.cwiseAbs().maxCoeff() : 0.0;
  const double srk_norm = srk.size() ? srk.cwiseAbs().maxCoeff() : 0.0;

  if (skk_norm <= tol && srk_norm <= tol) {
    r.cls = Sectoriality::Quasi;
    return finish(r, reg.empty() ? std::vector<double>{} : congruence_phases(hr, srr));
  }

  Eigen::SelfAdjointEigenSolver<CMat> ek(skk);
  const Vec kv = ek.eigenvalues();
  const bool skk_regular = kv.size() > 0 && kv.cwiseAbs().minCoeff() > tol;
  if (!skk_regular) {
    r.cls = Sectoriality::Semi;
    return finish(r, {-kPi / 2.0, kPi / 2.0});
  }

  std::vector<double> ph;
  if (!reg.empty()) {
    const CMat skk_inv = ek.eigenvectors() * kv.cwiseInverse().cast<cd>().asDiagonal() * ek.eigenvectors().adjoint();
    const CMat schur = srr - srk * skk_inv * srk.adjoint();
    ph = congruence_phases(hr, (schur + schur.adjoint()) / 2.0);
  }
  bool pos = false, neg = false;
  for (int i = 0; i < kv.size(); ++i) {
    if (kv(i) > 0) {
      ph.push_back(kPi / 2.0);
      pos = true;
    } else {
      ph.push_back(-kPi / 2.0);
      neg = true;
    }
  }
  r.cls = (pos && neg) ? Sectoriality::Semi : Sectoriality::Quasi;
  return finish(r, ph);
}

}  // namespace

std::string to_string(Sectoriality c) {
  switch (c) {
    case Sectoriality::Strict:
      return "strict";
    case Sectoriality::Quasi:
      return "quasi";
    case Sectoriality::Semi:
      return "semi";
    case Sectoriality::Non:
      return "non";
  }
  return "non";
}

double numerical_range_support(const CMat& a, double theta) {
  const Parts p = split(a);
  return -min_eig(-(std::cos(theta) * p.h - std::sin(theta) * p.s));
}

double rotated_hermitian_min(const CMat& a, double theta) { return lmin(split(a), theta); }

MatrixPhase analyze(const CMat& a, double rel_tol) {
  if (a.rows() != a.cols() || a.rows() == 0) throw std::invalid_argument("phase analysis needs a square matrix");
  MatrixPhase r;
  const double smax = sigma_max(a);
  if (!(smax > 0.0) || !std::isfinite(smax)) return r;
  const double tol = rel_tol * smax;
  const Parts p = split(a);

  std::vector<double> f(kScan);
  int best = 0;
  for (int k = 0; k < kScan; ++k) {
    f[k] = lmin(p, 2.0 * kPi * k / kScan);
    if (f[k] > f[best]) best = k;
  }
  const double step = 2.0 * kPi / kScan;
  double theta = golden_max(p, (best - 1) * step, (best + 1) * step);
  double fmax = lmin(p, theta);
  if (f[best] > fmax) {
    theta = best * step;
    fmax = f[best];
  }
  r.support = fmax / smax;

  if (fmax > tol) {
    r.cls = Sectoriality::Strict;
    r.theta = theta;
    return finish(r, congruence_phases(std::cos(theta) * p.h - std::sin(theta) * p.s,
                                       std::sin(theta) * p.h + std::cos(theta) * p.s));
  }
  if (fmax < -tol) return r;

  // Flat maximum: take the middle of the longest run of scan angles on the
  // plateau so the witness sits well inside it.
  int run_start = -1, run_len = 0;
  for (int k = 0; k < kScan; ++k) {
    if (f[k] < -tol) continue;
    if (k > 0 && f[k - 1] >= -tol) continue;
    int len = 0;
    while (len < kScan && f[(k + len) % kScan] >= -tol) ++len;
    if (len > run_len) {
      run_len = len;
      run_start = k;
    }
  }
  if (run_len == kScan) run_start = 0;
  if (run_len >= 3) theta = (run_start + 0.5 * (run_len - 1)) * step;
  r.theta = std::remainder(theta, 2.0 * kPi);
  return boundary_phases(r, p, tol);
}

Sectoriality classify(const CMat& a, double rel_tol) { return analyze(a, rel_tol).cls; }

MatrixPhase phases(const CMat& a, double rel_tol) {
  MatrixPhase r = analyze(a, rel_tol);
  if (r.cls == Sectoriality::Non) throw NotSectorial("matrix is not sectorial");
  return r;
}

GainExtrema gain_extrema(const CMat& a) {
  Eigen::JacobiSVD<CMat> svd(a);
  const Vec& sv = svd.singularValues();
  return {sv(sv.size() - 1), sv(0)};
}

}  // namespace phasecert
