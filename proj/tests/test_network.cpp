#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "phasecert/network.hpp"
#include "phasecert/scenario.hpp"

using namespace phasecert;

namespace {

const std::vector<cd> kPoints{cd(0.0, 0.0), cd(0.0, 3.0), cd(0.1, 60.0), cd(0.0, 314.0), cd(0.0, 5000.0)};

NetworkData triangle() {
  NetworkData d;
  d.buses = {{1, BusType::Slack, 0, 0, 0, 0, 0, 1.02},
             {2, BusType::PV, 0.2, 0.05, 0, 0, 0.6, 1.0},
             {3, BusType::PQ, 0.5, 0.1, 0.01, 0.02, 0, 1.0},
             {4, BusType::PQ, 0.1, 0.0, 0, 0, 0, 1.0}};
  d.branches = {{1, 2, 0.01, 0.2, 0.02, 0}, {2, 3, 0.02, 0.3, 0.0, 0.98}, {1, 3, 0.015, 0.25, 0.01, 0},
                {3, 4, 0.01, 0.1, 0.0, 0}};
  return d;
}

TEST(Branch, MatchesPhasorAtDc) {
  const double r = 0.02, x = 0.3, w0 = 100.0;
  const CMat y = branch_dq(r, x / w0, w0, 0.0);
  EXPECT_LT(oracle::rel_err(y, complex_block(1.0 / cd(r, x)).cast<cd>()), 1e-14);
  const StateSpace g = branch_dq(r, x / w0, w0);
  for (cd s : kPoints) EXPECT_LT(oracle::rel_err(evaluate(g, s), branch_dq(r, x / w0, w0, s)), 1e-12);
}

TEST(Kron, MatchesFullSolve) {
  const Network net(triangle());
  for (cd s : kPoints) {
    const CMat y = net.nodal(s);
    const CMat yr = net.reduced(s, {2, 4});
    // inject at ports 2 and 4 only, solve everything, read the port voltages
    CMat inj = CMat::Zero(y.rows(), 4);
    const int k2 = net.node_index(2), k4 = net.node_index(4);
    inj.block(2 * k2, 0, 2, 2).setIdentity();
    inj.block(2 * k4, 2, 2, 2).setIdentity();
    const CMat v = y.fullPivLu().solve(inj);
    CMat zp(4, 4);
    zp << v.block(2 * k2, 0, 2, 4), v.block(2 * k4, 0, 2, 4);
    EXPECT_LT(oracle::rel_err(yr, zp.inverse()), 1e-10);
  }
}

TEST(Kron, RetainAllIsIdentity) {
  std::mt19937_64 rng(31);
  const CMat y = oracle::random_matrix(rng, 4, 4).cast<cd>() + 4.0 * CMat::Identity(4, 4);
  EXPECT_LT(oracle::rel_err(kron_reduce(y, {0, 1, 2, 3}), y), 1e-15);
}

TEST(Network, ImpedanceRealizationInvertsReducedAdmittance) {
  const Network net(triangle());
  const std::vector<int> ports{2, 4};
  const StateSpace z = net.impedance(ports);
  for (cd s : kPoints) EXPECT_LT(oracle::rel_err(evaluate(z, s), net.reduced(s, ports).inverse()), 1e-9) << s;
  EXPECT_TRUE(is_stable(z).stable);
}

TEST(Network, DcNodalIsPhasorYbus) {
  const Network net(triangle());
  const CMat yb = net.phasor_ybus();
  const CMat y0 = net.nodal(0.0);
  // drop the slack row and column (bus 1 sits at table position 0)
  for (int i = 0; i < net.size(); ++i)
    for (int j = 0; j < net.size(); ++j)
      EXPECT_LT((y0.block(2 * i, 2 * j, 2, 2) - complex_block(yb(i + 1, j + 1)).cast<cd>()).norm(), 1e-12);
}

TEST(PowerFlow, TwoBusAnalytic) {
  NetworkData d;
  d.stray_b = 1e-9;
  d.buses = {{1, BusType::Slack, 0, 0, 0, 0, 0, 1.0}, {2, BusType::PV, 0, 0, 0, 0, 0.5, 1.05}};
  d.branches = {{1, 2, 0.0, 0.4, 0.0, 0}};
  const auto pf = Network(d).power_flow();
  const cd v2 = pf.voltage.at(2);
  EXPECT_NEAR(std::abs(v2), 1.05, 1e-10);
  EXPECT_NEAR(std::arg(v2), std::asin(0.5 * 0.4 / 1.05), 1e-8);
  EXPECT_NEAR((v2 * std::conj(pf.injection.at(2))).real(), 0.5, 1e-9);
}

TEST(PowerFlow, Ieee14Converges) {
  NetworkData d;
  load_buses_csv(std::filesystem::path(PHASECERT_SOURCE_DIR) / "data/ieee14/buses.csv", d);
  load_branches_csv(std::filesystem::path(PHASECERT_SOURCE_DIR) / "data/ieee14/branches.csv", d);
  ASSERT_EQ(d.buses.size(), 14u);
  ASSERT_EQ(d.branches.size(), 20u);
  const auto pf = Network(d).power_flow();
  EXPECT_LT(pf.iterations, 10);
  for (const auto& [id, v] : pf.voltage) {
    EXPECT_GT(std::abs(v), 0.9) << id;
    EXPECT_LT(std::abs(v), 1.12) << id;
  }
}

TEST(Network, Errors) {
  NetworkData d = triangle();
  d.buses.push_back({5, BusType::PQ, 0, 0, 0, 0, 0, 1.0});
  EXPECT_THROW(Network{d}, DisconnectedNetwork);
  NetworkData no_slack = triangle();
  no_slack.buses[0].type = BusType::PV;
  EXPECT_THROW(Network{no_slack}, std::invalid_argument);
  NetworkData bad = triangle();
  bad.branches.push_back({1, 9, 0.0, 0.1, 0.0, 0});
  EXPECT_THROW(Network{bad}, std::invalid_argument);
  EXPECT_THROW(Network(triangle()).node_index(1), std::out_of_range);
  EXPECT_THROW(parse_bus_type("swing?"), std::invalid_argument);
}

TEST(Network, GlobalFrameRotation) {
  const CMat y = CMat::Identity(4, 4) + rot90().replicate(2, 2).cast<cd>();
  const std::vector<double> a{0.3, -0.7};
  const CMat g = to_global_frame(y, a);
  EXPECT_LT((g.block(0, 2, 2, 2) - (rotation(0.3) * rot90() * rotation(-0.7).transpose()).cast<cd>()).norm(), 1e-14);
  EXPECT_LT((rotation(0.4) * rotation(0.4).transpose() - Mat::Identity(2, 2)).norm(), 1e-15);
}

}  // namespace
