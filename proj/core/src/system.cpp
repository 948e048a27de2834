#include "phasecert/system.hpp"

#include <cmath>
#include <numbers>
#include <set>

namespace phasecert {

System build_system(const NetworkData& data, const std::vector<ConverterSpec>& specs) {
  System sys{Network(data), {}, specs, {}, {}, {}, {}, {}, {}};
  std::set<int> seen;
  for (const auto& c : specs) {
    const auto& bus = data.bus(c.bus);
    if (bus.type == BusType::Slack) throw std::invalid_argument("converter at slack bus " + std::to_string(c.bus));
    if (!seen.insert(c.bus).second) throw std::invalid_argument("two converters at bus " + std::to_string(c.bus));
    c.params.validate();
    if (std::abs(c.params.omega0 - data.omega0) > 1e-9 * data.omega0)
      throw std::invalid_argument("converter and network nominal frequencies differ");
  }

  sys.flow = sys.network.power_flow();
  for (const auto& c : specs) {
    const cd v = sys.flow.voltage.at(c.bus);
    // injection is what the device pushes into the network; the converter
    // model uses current into the device
    const cd i = -sys.flow.injection.at(c.bus);
    const OperatingPoint global{v.real(), v.imag(), i.real(), i.imag()};
    double angle = 0.0;
    OperatingPoint loc = global.local(&angle);
    loc.id /= c.params.rating;
    loc.iq /= c.params.rating;
    ConverterAdmittance conv = build_converter(c.params, loc);
    const Mat r = rotation(angle);
    sys.yc.push_back(scale(c.params.rating, left_multiply(r, right_multiply(conv.YDQ, r.transpose()))));
    sys.ports.push_back(c.bus);
    sys.local.push_back(std::move(conv));
    sys.angles.push_back(angle);
    sys.global_ops.push_back(global);
  }
  sys.z_ports = sys.network.impedance(sys.ports);
  return sys;
}

GroundTruth ground_truth(const System& sys) {
  const StateSpace cl = feedback(sys.z_ports, sys.yc_block(), -1);
  const StabilityResult st = is_stable(cl);
  GroundTruth g;
  g.stable = st.stable;
  g.max_real = st.max_real;
  g.eigenvalues = st.spectrum;
  bool first = true;
  for (const cd& p : st.spectrum) {
    if (p.imag() < 0.0) continue;
    if (first || p.real() > g.dominant.real()) {
      g.dominant = p;
      first = false;
    }
  }
  g.dominant_hz = g.dominant.imag() / (2.0 * std::numbers::pi);
  return g;
}

}  // namespace phasecert
