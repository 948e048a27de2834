#pragma once

#include <map>
#include <string>
#include <vector>

#include "phasecert/lti.hpp"

namespace phasecert {

struct DisconnectedNetwork : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SingularInterior : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class BusType { Slack, PV, PQ };

BusType parse_bus_type(const std::string& s);
std::string to_string(BusType t);

// Powers in pu on the system base, loads as consumed, generation as injected.
struct BusData {
  int id = 0;
  BusType type = BusType::PQ;
  double load_p = 0.0, load_q = 0.0;
  double shunt_g = 0.0, shunt_b = 0.0;
  double gen_p = 0.0, gen_v = 1.0;
};

// tap = 0 means nominal ratio; the ratio sits on the from side.
struct BranchData {
  int from = 0, to = 0;
  double r = 0.0, x = 0.0, b = 0.0, tap = 0.0;
};

struct NetworkData {
  std::vector<BusData> buses;
  std::vector<BranchData> branches;
  double omega0 = 2.0 * 3.14159265358979323846 * 50.0;
  double stray_b = 1e-5;         // small capacitance at every bus
  double min_branch_r = 0.0;     // floor applied to series resistances
  bool resistive_loads = false;  // drop load Q

  const BusData& bus(int id) const;
  BusData& bus(int id);
};

// Inverse of [[R + sL, -w0 L], [w0 L, R + sL]] as a model.
StateSpace branch_dq(double r, double l, double omega0);
// Same thing at one frequency.
CMat branch_dq(double r, double l, double omega0, cd s);

CMat kron_reduce(const CMat& y, const std::vector<int>& retained_nodes);

// Block rotation R(delta_k) Y R(delta_l)^T on 2x2 blocks.
CMat to_global_frame(const CMat& y, const std::vector<double>& angles);
StateSpace to_global_frame(const StateSpace& y, const std::vector<double>& angles);
Mat rotation(double angle);

struct PowerFlowResult {
  std::map<int, cd> voltage;    // per bus id, global phasor frame
  std::map<int, cd> injection;  // current injected by the device at the bus
  int iterations = 0;
  double mismatch = 0.0;
};

class Network {
 public:
  explicit Network(NetworkData data);

  const NetworkData& data() const { return data_; }
  // Non-slack buses in table order; slack buses are ideal sources (ground in
  // small signal).
  const std::vector<int>& nodes() const { return nodes_; }
  int node_index(int bus_id) const;
  int size() const { return static_cast<int>(nodes_.size()); }

  // Phasor bus admittance over all buses (table order) at nominal frequency.
  CMat phasor_ybus() const;

  PowerFlowResult power_flow(double tol = 1e-10, int max_iter = 50) const;

  // dq nodal admittance over nodes() at complex frequency s.
  CMat nodal(cd s) const;
  // Kron-reduced onto the given bus ids.
  CMat reduced(cd s, const std::vector<int>& ports) const;

  // Impedance from current injections at the port buses to their voltages;
  // all other buses stay inside the realization.
  StateSpace impedance(const std::vector<int>& ports) const;

  int states() const;

 private:
  struct Series {
    int from, to;  // node index, -1 for slack or ground
    double r, x, tap;
  };

  NetworkData data_;
  std::vector<int> nodes_;
  std::map<int, int> index_;
  std::vector<Series> series_;
  std::vector<double> g_, bcap_;  // per node
  std::vector<int> bus_pos_;      // bus table index -> position in phasor vectors

  void check_connected() const;
};

}  // namespace phasecert
