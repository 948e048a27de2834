#include "phasecert/verify.hpp"

#include <chrono>
#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "phasecert/phase.hpp"

namespace phasecert {

namespace {

constexpr double kPi = std::numbers::pi;

double uniform(Rng& rng, double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); }

// Argument of z on the branch closest to ref.
double arg_near(cd z, double ref) {
  double a = std::arg(z);
  while (a - ref > kPi) a -= 2.0 * kPi;
  while (ref - a > kPi) a += 2.0 * kPi;
  return a;
}

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void note_failure(SuiteResult& r, const std::string& what) {
  if (r.failures++ == 0) r.detail = what;
}

}  // namespace

GfmParameters random_gfm_parameters(Rng& rng, bool q_integral) {
  GfmParameters p;
  p.J = uniform(rng, 0.005, 0.1);
  p.D = uniform(rng, 0.05, 2.0);
  p.Rv = uniform(rng, 0.01, 0.1);
  p.Xv = uniform(rng, 0.05, 0.3);
  p.kp = uniform(rng, 0.5, 2.0);
  p.kr = uniform(rng, 20.0, 200.0);
  p.resonant_bandwidth = uniform(rng, 2.0, 10.0);
  p.Rf = uniform(rng, 0.001, 0.01);
  p.Xf = uniform(rng, 0.05, 0.2);
  p.q_control = uniform(rng, 0.0, 1.0) < 0.5 && q_integral;
  p.kpq = uniform(rng, 0.05, 0.5);
  p.kiq = uniform(rng, 1.0, 20.0);
  p.q_filter_hz = uniform(rng, 1.0, 10.0);
  p.delay = uniform(rng, 0.0, 1.0) < 0.3 ? uniform(rng, 0.0, 2e-4) : 0.0;
  return p;
}

OperatingPoint random_local_operating_point(Rng& rng) {
  return {uniform(rng, 0.9, 1.1), 0.0, uniform(rng, -1.0, 1.0), uniform(rng, -0.5, 0.5)};
}

CMat random_complex(Rng& rng, int n) {
  CMat a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = cd(uniform(rng, -1.0, 1.0), uniform(rng, -1.0, 1.0));
  return a;
}

CMat random_sectorial(Rng& rng, int n, double center, double half_width) {
  // T* D T with unimodular diagonal D; T is well conditioned most of the time
  CMat t = random_complex(rng, n) + 1.5 * CMat::Identity(n, n);
  CMat d = CMat::Zero(n, n);
  for (int k = 0; k < n; ++k) d(k, k) = uniform(rng, 0.5, 2.0) * std::polar(1.0, center + uniform(rng, -half_width, half_width));
  return t.adjoint() * d * t;
}

System random_system(Rng& rng) {
  NetworkData nd;
  nd.buses = {{1, BusType::Slack, 0, 0, 0, 0, 0, 1.0},
              {2, BusType::PV, uniform(rng, 0.0, 0.3), 0, 0, 0, uniform(rng, 0.1, 0.6), uniform(rng, 0.97, 1.05)},
              {3, BusType::PV, uniform(rng, 0.0, 0.3), 0, 0, 0, uniform(rng, 0.1, 0.6), uniform(rng, 0.97, 1.05)}};
  nd.resistive_loads = true;
  for (auto [f, t] : {std::pair{1, 2}, {2, 3}, {1, 3}})
    nd.branches.push_back({f, t, uniform(rng, 0.01, 0.05), uniform(rng, 0.1, 0.5), uniform(rng, 0.0, 0.05), 0.0});
  return build_system(nd, {{2, random_gfm_parameters(rng)}, {3, random_gfm_parameters(rng)}});
}

SuiteResult verify_bounds(Rng& rng, int pairs) {
  Timer timer;
  SuiteResult r;
  r.name = "bounds";
  r.tolerance = -1e-9;
  r.worst = std::numeric_limits<double>::infinity();
  for (int k = 0; k < pairs; ++k) {
    const int n = 2 + static_cast<int>(rng() % 5);
    const bool sectorial = k % 2 == 1;
    CMat a, b;
    if (sectorial) {
      a = random_sectorial(rng, n, uniform(rng, -1.5, 1.5), uniform(rng, 0.05, 1.4));
      b = random_sectorial(rng, n, uniform(rng, -1.5, 1.5), uniform(rng, 0.05, 1.4));
    } else {
      a = random_complex(rng, n);
      b = random_complex(rng, n);
    }
    const GainExtrema ga = gain_extrema(a), gb = gain_extrema(b);
    const Eigen::ComplexEigenSolver<CMat> es(a * b, false);
    const double scale = ga.hi * gb.hi;
    for (int i = 0; i < n; ++i) {
      const double m = std::abs(es.eigenvalues()(i));
      const double slack = std::min(m - ga.lo * gb.lo, scale - m) / scale;
      r.worst = std::min(r.worst, slack);
      if (slack < r.tolerance) {
        std::ostringstream os;
        os << "gain bound violated on pair " << k << " (slack " << slack << ")";
        note_failure(r, os.str());
      }
    }
    if (sectorial) {
      const MatrixPhase pa = analyze(a), pb = analyze(b);
      if (pa.cls != Sectoriality::Strict || pb.cls != Sectoriality::Strict) {
        note_failure(r, "sectorial draw not classified Strict on pair " + std::to_string(k));
        continue;
      }
      const double lo = pa.lo + pb.lo, hi = pa.hi + pb.hi;
      for (int i = 0; i < n; ++i) {
        const double ang = arg_near(es.eigenvalues()(i), 0.5 * (lo + hi));
        const double slack = std::min(ang - lo, hi - ang);
        r.worst = std::min(r.worst, slack);
        if (slack < r.tolerance) {
          std::ostringstream os;
          os << "phase bound violated on pair " << k << " (slack " << slack << ")";
          note_failure(r, os.str());
        }
      }
    }
    ++r.trials;
  }
  r.seconds = timer.seconds();
  return r;
}

SuiteResult verify_dc_template(Rng& rng, int draws) {
  Timer timer;
  SuiteResult r;
  r.name = "dc_template";
  r.tolerance = 1e-8;
  for (int k = 0; k < draws; ++k) {
    const GfmParameters p = random_gfm_parameters(rng, false);
    const OperatingPoint op = random_local_operating_point(rng);
    const DcTemplateReport rep = check_dc_template(build_converter(p, op));
    const double res = std::max({rep.template_residual, rep.trace, rep.identity_residual});
    r.worst = std::max(r.worst, res);
    if (res > r.tolerance || rep.phase.cls != Sectoriality::Non) {
      std::ostringstream os;
      os << "draw " << k << ": residual " << res << ", class " << to_string(rep.phase.cls);
      note_failure(r, os.str());
    }
    ++r.trials;
  }
  r.seconds = timer.seconds();
  return r;
}

SuiteResult verify_polar_dc(Rng& rng, int draws) {
  Timer timer;
  SuiteResult r;
  r.name = "polar_dc";
  r.tolerance = 1e-8;
  for (int k = 0; k < draws; ++k) {
    const GfmParameters p = random_gfm_parameters(rng, false);
    const OperatingPoint op = random_local_operating_point(rng);
    const ConverterAdmittance c = build_converter(p, op);
    const TransformSet t({FrameKind::PowerPolar}, {op});
    const CMat j0 = t.converter(evaluate(c.YDQ, 0.0), 0, 0.0);
    const double res = std::max({std::abs(j0(0, 0)), std::abs(j0(0, 1)), std::abs(j0(1, 0)), std::abs(j0(1, 1).imag())});
    r.worst = std::max(r.worst, res);
    const Sectoriality cls = classify(j0);
    if (res > r.tolerance || cls != Sectoriality::Quasi) {
      std::ostringstream os;
      os << "draw " << k << ": off-structure " << res << ", class " << to_string(cls) << ", gamma " << j0(1, 1).real();
      note_failure(r, os.str());
    }
    ++r.trials;
  }
  r.seconds = timer.seconds();
  return r;
}

SuiteResult verify_det_equivalence(Rng& rng, int points_per_kind) {
  Timer timer;
  SuiteResult r;
  r.name = "det_equivalence";
  r.tolerance = 1e-8;
  const System sys = random_system(rng);
  for (FrameKind kind : {FrameKind::Rectangular, FrameKind::PowerPolar, FrameKind::Blended, FrameKind::NaiveBlended}) {
    FrameConfig cfg;
    cfg.kind = kind;
    const TransformSet t(cfg, sys.global_ops);
    for (int k = 0; k < points_per_kind; ++k) {
      const cd s(uniform(rng, -5.0, 5.0), 2.0 * kPi * std::pow(10.0, uniform(rng, -2.0, 3.0)));
      const CMat ynet = sys.network.reduced(s, sys.ports);
      const int n = sys.converters();
      CMat yc = CMat::Zero(2 * n, 2 * n), jc = CMat::Zero(2 * n, 2 * n);
      for (int i = 0; i < n; ++i) {
        const CMat y = sys.yc_at(i, s);
        yc.block(2 * i, 2 * i, 2, 2) = y;
        jc.block(2 * i, 2 * i, 2, 2) = t.converter(y, i, s);
      }
      const Triple tr = t.aggregate(s);
      const cd lhs = (jc + t.network(ynet, s)).determinant();
      const cd rhs = tr.E.determinant() * (yc + ynet).determinant() * tr.F.determinant();
      const double rel = std::abs(lhs - rhs) / std::abs(rhs);
      r.worst = std::max(r.worst, rel);
      if (!(rel < r.tolerance)) {
        std::ostringstream os;
        os << to_string(kind) << " at s = " << s << ": relative error " << rel;
        note_failure(r, os.str());
      }
      ++r.trials;
    }
  }
  r.seconds = timer.seconds();
  return r;
}

std::vector<SuiteResult> run_verify(const VerifyOptions& opt) {
  Rng rng(opt.seed);
  const int t = opt.trials;
  std::vector<SuiteResult> out;
  out.push_back(verify_bounds(rng, t > 0 ? t : 1000));
  out.push_back(verify_dc_template(rng, t > 0 ? t : 100));
  out.push_back(verify_polar_dc(rng, t > 0 ? t : 100));
  out.push_back(verify_det_equivalence(rng, t > 0 ? t : 50));
  return out;
}

}  // namespace phasecert
