#include "phasecert/criteria.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>
#include <thread>

namespace phasecert {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kStrict = 1e-9;  // strict inequalities need this much room

double largest_singular(const Mat& m) {
  if (m.size() == 0) return 0.0;
  return Eigen::JacobiSVD<Mat>(m).singularValues()(0);
}

}  // namespace

GainCheck gain_condition(const std::vector<CMat>& jc, const CMat& jnet) {
  GainCheck g;
  for (const auto& m : jc) g.converter_max = std::max(g.converter_max, gain_extrema(m).hi);
  g.network_min = gain_extrema(jnet).lo;
  g.margin = g.converter_max > 0.0 ? g.network_min / g.converter_max - 1.0 : std::numeric_limits<double>::infinity();
  g.ok = g.network_min > g.converter_max * (1.0 + kStrict);
  return g;
}

PhaseCheck phase_condition(const std::vector<MatrixPhase>& jc, const MatrixPhase& inv) {
  PhaseCheck p;
  p.upper = -std::numeric_limits<double>::infinity();
  p.lower = std::numeric_limits<double>::infinity();
  for (const auto& m : jc) {
    p.upper = std::max(p.upper, m.hi);
    p.lower = std::min(p.lower, m.lo);
  }
  if (inv.cls == Sectoriality::Semi) {
    // lossless resonance and the like; left undecided
    p.applicable = false;
    p.margin = -kPi;
    p.note = "NonApplicable: network inverse is semi-sectorial";
    return p;
  }
  if (inv.cls != Sectoriality::Strict) {
    p.margin = -kPi;
    p.note = "NonSectorial: network inverse is " + to_string(inv.cls);
    return p;
  }
  for (const auto& m : jc) {
    if (m.cls == Sectoriality::Non || m.cls == Sectoriality::Semi) {
      p.margin = -kPi;
      p.note = "NonSectorial: converter is " + to_string(m.cls);
      return p;
    }
  }
  p.margin = std::min(kPi - p.upper - inv.hi, p.lower + kPi + inv.lo);
  p.ok = p.margin > kStrict;
  return p;
}

double FrequencyVerdict::margin() const { return std::max(gain.margin, phase.margin / kPi); }

FrequencyVerdict evaluate_frequency(const System& sys, const TransformSet& t, double hz, bool centralized) {
  const cd s(0.0, 2.0 * kPi * hz);
  const int n = sys.converters();
  FrequencyVerdict v;
  v.hz = hz;

  std::vector<CMat> jc;
  for (int i = 0; i < n; ++i) {
    jc.push_back(t.converter(sys.yc_at(i, s), i, s));
    v.converter_phase.push_back(analyze(jc.back()));
    v.converter_gain.push_back(gain_extrema(jc.back()));
  }
  const CMat jnet = t.network(sys.network.reduced(s, sys.ports), s);
  v.network_gain = gain_extrema(jnet);
  Eigen::PartialPivLU<CMat> lu(jnet);
  if (lu.rcond() > 1e-14) v.network_inverse_phase = analyze(lu.inverse());

  v.gain = gain_condition(jc, jnet);
  if (centralized) {
    CMat agg = CMat::Zero(2 * n, 2 * n);
    for (int i = 0; i < n; ++i) agg.block(2 * i, 2 * i, 2, 2) = jc[i];
    v.phase = phase_condition({analyze(agg)}, v.network_inverse_phase);
  } else {
    v.phase = phase_condition(v.converter_phase, v.network_inverse_phase);
  }
  v.satisfied = v.gain.ok || v.phase.ok;

  const bool net_ok = v.network_inverse_phase.cls == Sectoriality::Strict;
  const double nhi = net_ok ? v.network_inverse_phase.hi : 0.0;
  const double nlo = net_ok ? v.network_inverse_phase.lo : 0.0;
  double worst = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    const auto& m = v.converter_phase[i];
    double mi;
    if (m.cls == Sectoriality::Non)
      mi = -10.0 + m.support;
    else if (m.cls == Sectoriality::Semi)
      mi = -5.0;
    else
      mi = std::min(kPi - m.hi - nhi, m.lo + kPi + nlo);
    v.converter_margin.push_back(mi);
    if (mi < worst) {
      worst = mi;
      v.limiting_converter = sys.ports[i];
    }
  }
  return v;
}

OpenLoopCheck check_transformed_openloop(const System& sys, const TransformSet& t) {
  OpenLoopCheck r;
  std::ostringstream os;
  const auto extra = t.converter_extra_poles();
  r.converter_max_real = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < sys.converters(); ++i) {
    std::vector<cd> sp = poles(sys.yc[i]);
    sp.insert(sp.end(), extra.begin(), extra.end());
    const StabilityResult st = spectrum_stability(sp);
    r.converter_max_real = std::max(r.converter_max_real, st.max_real);
    if (!st.stable) {
      r.converters_stable = false;
      r.unstable_converters.push_back(sys.ports[i]);
      os << "J_C at bus " << sys.ports[i] << " has a pole at Re = " << st.max_real << "; ";
    }
  }
  try {
    const StabilityResult st = is_stable(t.network_inverse(sys.z_ports));
    r.network_inverse_stable = st.stable;
    r.network_inverse_max_real = st.max_real;
    if (!st.stable) os << "J_net^{-1} has a pole at Re = " << st.max_real << "; ";
  } catch (const std::exception& e) {
    r.network_inverse_stable = false;
    r.network_inverse_max_real = std::numeric_limits<double>::infinity();
    os << "J_net^{-1} has no proper realization (" << e.what() << "); ";
  }
  r.detail = os.str();
  return r;
}

std::string CertificateReport::conclusion() const {
  if (!applicable) return "inapplicable: " + reason;
  if (certified) return "certified stable";
  return "inconclusive w.r.t. instability";
}

CertificateReport certify(const System& sys, const CertifyOptions& opt) {
  if (sys.converters() == 0) throw std::invalid_argument("nothing to certify: the scenario has no converters");
  const TransformSet t(opt.frame, sys.global_ops);
  CertificateReport rep;
  rep.frame = opt.frame;
  rep.openloop = check_transformed_openloop(sys, t);
  if (!rep.openloop.ok()) {
    rep.applicable = false;
    rep.reason = "transformed open loop is not stable: " + rep.openloop.detail;
  }

  // Behaviour at infinity: Y_C(inf) Z(inf) must be a contraction.
  double yinf = 0.0;
  for (const auto& y : sys.yc) yinf = std::max(yinf, largest_singular(y.D));
  rep.infinity_product = yinf * largest_singular(sys.z_ports.D);
  rep.infinity_ok = rep.infinity_product < 1.0;

  const auto& hz = opt.grid.hz();
  std::vector<FrequencyVerdict> vs(hz.size());
  int workers = opt.threads > 0 ? opt.threads : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::clamp(workers, 1, std::max(1, static_cast<int>(hz.size()) / 16));
  if (workers == 1) {
    for (std::size_t k = 0; k < hz.size(); ++k) vs[k] = evaluate_frequency(sys, t, hz[k], opt.centralized);
  } else {
    // strided split; every point lands in its own slot so order never changes
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t k = w; k < hz.size(); k += workers)
            vs[k] = evaluate_frequency(sys, t, hz[k], opt.centralized);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  if (opt.refine) {
    int added = 0;
    for (int depth = 0; depth < opt.refine_depth && added < opt.refine_budget; ++depth) {
      std::vector<FrequencyVerdict> next;
      bool any = false;
      for (std::size_t k = 0; k < vs.size(); ++k) {
        next.push_back(vs[k]);
        if (k + 1 == vs.size() || vs[k].hz <= 0.0 || added >= opt.refine_budget) continue;
        const double m1 = vs[k].margin(), m2 = vs[k + 1].margin();
        const bool flip = vs[k].satisfied != vs[k + 1].satisfied;
        if (flip || std::min(std::abs(m1), std::abs(m2)) < opt.refine_band) {
          FrequencyVerdict mid = evaluate_frequency(sys, t, std::sqrt(vs[k].hz * vs[k + 1].hz), opt.centralized);
          mid.refined = true;
          next.push_back(std::move(mid));
          ++added;
          any = true;
        }
      }
      vs = std::move(next);
      if (!any) break;
    }
  }
  rep.verdicts = std::move(vs);

  bool all = true;
  double worst = std::numeric_limits<double>::infinity();
  std::set<int> failing;
  for (const auto& v : rep.verdicts) {
    if (v.satisfied) continue;
    all = false;
    rep.failing_hz.push_back(v.hz);
    for (std::size_t i = 0; i < v.converter_margin.size(); ++i)
      if (v.converter_margin[i] < 0.0) failing.insert(sys.ports[i]);
    const double m = *std::min_element(v.converter_margin.begin(), v.converter_margin.end());
    if (m < worst) {
      worst = m;
      rep.limiting_converter = v.limiting_converter;
      rep.limiting_hz = v.hz;
    }
  }
  rep.failing_converters.assign(failing.begin(), failing.end());
  rep.certified = rep.applicable && all && rep.infinity_ok;
  if (rep.applicable && !rep.infinity_ok) rep.reason = "converter and network are not a contraction at infinity";
  return rep;
}

}  // namespace phasecert
