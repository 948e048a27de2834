#include "phasecert/report.hpp"

#include <cmath>
#include <iomanip>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "json.hpp"

namespace phasecert {

namespace {

using nlohmann::ordered_json;

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// CSV number; infinities are spelled out so readers do not choke on "inf"
std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os << std::setprecision(12) << v;
  return os.str();
}

// JSON has no infinity; use null
ordered_json jnum(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

std::string header_line(const char* schema, const Scenario& sc, const std::string& extra) {
  std::string s = std::string("# schema: ") + schema + "; scenario: " + sc.name;
  if (!extra.empty()) s += "; " + extra;
  return s + "\n";
}

}  // namespace

std::string report_json(const Scenario& sc, const System& sys, const CertifyOptions& opt, const CertificateReport& rep) {
  ordered_json j;
  j["schema"] = kReportSchema;
  j["scenario"] = sc.name;
  j["description"] = sc.description;
  j["frame"] = {{"kind", to_string(rep.frame.kind)},
                {"wc_hz", rep.frame.wc / kTwoPi},
                {"weight", to_string(rep.frame.weight)},
                {"weight_r", rep.frame.weight_r},
                {"weight_x", rep.frame.weight_x},
                {"centralized", opt.centralized}};
  const auto& hz = opt.grid.hz();
  j["grid"] = {{"base_points", hz.size()},
               {"evaluated_points", rep.verdicts.size()},
               {"fmin_hz", hz.empty() ? 0.0 : hz.front()},
               {"fmax_hz", hz.empty() ? 0.0 : hz.back()},
               {"refine", opt.refine},
               {"caveat", kGridCaveat}};

  ordered_json convs = ordered_json::array();
  for (int i = 0; i < sys.converters(); ++i) {
    const auto& op = sys.global_ops[i];
    const auto& p = sys.specs[i].params;
    convs.push_back({{"bus", sys.ports[i]},
                     {"angle_rad", sys.angles[i]},
                     {"operating_point", {{"vd", op.vd}, {"vq", op.vq}, {"id", op.id}, {"iq", op.iq}}},
                     {"p_absorbed", op.p()},
                     {"q_absorbed", op.q()},
                     {"states", sys.yc[i].states()},
                     {"params",
                      {{"J", p.J}, {"D", p.D}, {"Rv", p.Rv}, {"Xv", p.Xv}, {"kp", p.kp}, {"kr", p.kr},
                       {"resonant_bandwidth", p.resonant_bandwidth}, {"Rf", p.Rf}, {"Xf", p.Xf},
                       {"q_control", p.q_control}, {"kpq", p.kpq}, {"kiq", p.kiq}, {"q_filter_hz", p.q_filter_hz},
                       {"delay", p.delay}, {"rating", p.rating}}}});
  }
  j["converters"] = convs;

  j["openloop"] = {{"ok", rep.openloop.ok()},
                   {"converters_stable", rep.openloop.converters_stable},
                   {"network_inverse_stable", rep.openloop.network_inverse_stable},
                   {"converter_max_real", jnum(rep.openloop.converter_max_real)},
                   {"network_inverse_max_real", jnum(rep.openloop.network_inverse_max_real)},
                   {"unstable_converters", rep.openloop.unstable_converters},
                   {"detail", rep.openloop.detail}};
  j["infinity"] = {{"product", rep.infinity_product}, {"ok", rep.infinity_ok}};

  j["certified"] = rep.certified;
  j["applicable"] = rep.applicable;
  j["conclusion"] = rep.conclusion();
  j["reason"] = rep.reason;
  j["limiting_converter"] = rep.limiting_converter < 0 ? ordered_json(nullptr) : ordered_json(rep.limiting_converter);
  j["limiting_hz"] = rep.limiting_converter < 0 ? ordered_json(nullptr) : ordered_json(rep.limiting_hz);
  j["failing_converters"] = rep.failing_converters;
  j["failing_points"] = rep.failing_hz.size();
  j["failing_hz_range"] = rep.failing_hz.empty() ? ordered_json(nullptr)
                                                 : ordered_json::array({rep.failing_hz.front(), rep.failing_hz.back()});

  ordered_json vs = ordered_json::array();
  for (const auto& v : rep.verdicts) {
    ordered_json conv = ordered_json::array();
    for (std::size_t i = 0; i < v.converter_phase.size(); ++i) {
      const auto& ph = v.converter_phase[i];
      conv.push_back({{"bus", sys.ports[i]},
                      {"class", to_string(ph.cls)},
                      {"phi_lo", ph.lo},
                      {"phi_hi", ph.hi},
                      {"sigma_max", v.converter_gain[i].hi},
                      {"margin", v.converter_margin[i]}});
    }
    const auto& ni = v.network_inverse_phase;
    vs.push_back({{"hz", v.hz},
                  {"refined", v.refined},
                  {"satisfied", v.satisfied},
                  {"gain_ok", v.gain.ok},
                  {"sigma_c_max", v.gain.converter_max},
                  {"sigma_net_min", v.gain.network_min},
                  {"gain_margin", jnum(v.gain.margin)},
                  {"phase_ok", v.phase.ok},
                  {"phase_applicable", v.phase.applicable},
                  {"phase_margin", v.phase.margin},
                  {"phase_note", v.phase.note},
                  {"network_inverse", {{"class", to_string(ni.cls)}, {"phi_lo", ni.lo}, {"phi_hi", ni.hi}}},
                  {"limiting_converter", v.limiting_converter},
                  {"converters", conv}});
  }
  j["verdicts"] = vs;
  return j.dump(2) + "\n";
}

void write_sweep_csv(std::ostream& os, const Scenario& sc, const System& sys, const CertificateReport& rep) {
  os << header_line(kSweepSchema, sc, "frame: " + to_string(rep.frame.kind));
  os << "hz,omega_rad_s,refined,sigma_c_max,sigma_net_min,gain_ok,gain_margin,phase_ok,phase_applicable,"
        "phase_margin,satisfied,netinv_class,netinv_phi_lo,netinv_phi_hi,limiting_converter";
  for (int bus : sys.ports) {
    const std::string c = "c" + std::to_string(bus) + "_";
    os << "," << c << "class," << c << "phi_lo," << c << "phi_hi," << c << "sigma_max," << c << "sigma_min," << c
       << "margin";
  }
  os << "\n";
  for (const auto& v : rep.verdicts) {
    const auto& ni = v.network_inverse_phase;
    os << num(v.hz) << "," << num(kTwoPi * v.hz) << "," << int(v.refined) << "," << num(v.gain.converter_max) << ","
       << num(v.gain.network_min) << "," << int(v.gain.ok) << "," << num(v.gain.margin) << "," << int(v.phase.ok)
       << "," << int(v.phase.applicable) << "," << num(v.phase.margin) << "," << int(v.satisfied) << ","
       << to_string(ni.cls) << "," << num(ni.lo) << "," << num(ni.hi) << "," << v.limiting_converter;
    for (std::size_t i = 0; i < v.converter_phase.size(); ++i) {
      const auto& ph = v.converter_phase[i];
      os << "," << to_string(ph.cls) << "," << num(ph.lo) << "," << num(ph.hi) << "," << num(v.converter_gain[i].hi)
         << "," << num(v.converter_gain[i].lo) << "," << num(v.converter_margin[i]);
    }
    os << "\n";
  }
}

void write_eig_csv(std::ostream& os, const Scenario& sc, const GroundTruth& gt) {
  os << header_line(kEigSchema, sc, std::string("stable: ") + (gt.stable ? "true" : "false"));
  os << "index,real,imag,freq_hz,damping_ratio\n";
  for (std::size_t k = 0; k < gt.eigenvalues.size(); ++k) {
    const cd e = gt.eigenvalues[k];
    const double m = std::abs(e);
    os << k << "," << num(e.real()) << "," << num(e.imag()) << "," << num(e.imag() / kTwoPi) << ","
       << num(m > 0.0 ? -e.real() / m : 1.0) << "\n";
  }
}

void write_loop_eig_csv(std::ostream& os, const Scenario& sc, const System& sys, const CertifyOptions& opt,
                        const CertificateReport& rep) {
  const TransformSet t(opt.frame, sys.global_ops);
  os << header_line(kLoopEigSchema, sc, "frame: " + to_string(opt.frame.kind));
  os << "hz,index,eig_phase,eig_abs,bound_lo,bound_hi\n";
  const int n = sys.converters();
  for (const auto& v : rep.verdicts) {
    const cd s(0.0, kTwoPi * v.hz);
    CMat jc = CMat::Zero(2 * n, 2 * n);
    for (int i = 0; i < n; ++i) jc.block(2 * i, 2 * i, 2, 2) = t.converter(sys.yc_at(i, s), i, s);
    Eigen::PartialPivLU<CMat> lu(t.network(sys.network.reduced(s, sys.ports), s));
    if (!(lu.rcond() > 1e-14)) continue;
    const CMat loop = lu.inverse() * jc;
    const Eigen::ComplexEigenSolver<CMat> es(loop, false);
    const MatrixPhase agg = analyze(jc);
    const auto& ni = v.network_inverse_phase;
    const bool bounded = agg.sectorial() && ni.sectorial();
    const double lo = bounded ? agg.lo + ni.lo : std::nan("");
    const double hi = bounded ? agg.hi + ni.hi : std::nan("");
    for (int k = 0; k < es.eigenvalues().size(); ++k) {
      const cd e = es.eigenvalues()(k);
      double a = std::arg(e);
      if (bounded) {
        const double mid = 0.5 * (lo + hi);
        while (a - mid > std::numbers::pi) a -= kTwoPi;
        while (mid - a > std::numbers::pi) a += kTwoPi;
      }
      os << num(v.hz) << "," << k << "," << num(a) << "," << num(std::abs(e)) << "," << num(lo) << "," << num(hi)
         << "\n";
    }
  }
}

}  // namespace phasecert
