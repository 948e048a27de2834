#include "phasecert/network.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace phasecert {

BusType parse_bus_type(const std::string& s) {
  if (s == "slack" || s == "infinite" || s == "3") return BusType::Slack;
  if (s == "pv" || s == "PV" || s == "2") return BusType::PV;
  if (s == "pq" || s == "PQ" || s == "1") return BusType::PQ;
  throw std::invalid_argument("unknown bus type '" + s + "'");
}

std::string to_string(BusType t) {
  switch (t) {
    case BusType::Slack:
      return "slack";
    case BusType::PV:
      return "pv";
    case BusType::PQ:
      return "pq";
  }
  return "pq";
}

const BusData& NetworkData::bus(int id) const {
  for (const auto& b : buses)
    if (b.id == id) return b;
  throw std::out_of_range("no bus with id " + std::to_string(id));
}

BusData& NetworkData::bus(int id) {
  for (auto& b : buses)
    if (b.id == id) return b;
  throw std::out_of_range("no bus with id " + std::to_string(id));
}

StateSpace branch_dq(double r, double l, double omega0) {
  if (l > 0.0) return frequency_shift(transfer_function({1.0}, {l, r}), omega0);
  if (r > 0.0) return StateSpace::gain(Mat::Identity(2, 2) / r);
  throw std::invalid_argument("degenerate branch: R = L = 0");
}

CMat branch_dq(double r, double l, double omega0, cd s) {
  if (!(l > 0.0) && !(r > 0.0)) throw std::invalid_argument("degenerate branch: R = L = 0");
  CMat z(2, 2);
  z << r + s * l, -omega0 * l, omega0 * l, r + s * l;
  return z.inverse();
}

CMat kron_reduce(const CMat& y, const std::vector<int>& keep) {
  const int n = static_cast<int>(y.rows());
  std::vector<int> drop;
  for (int i = 0; i < n; ++i)
    if (std::find(keep.begin(), keep.end(), i) == keep.end()) drop.push_back(i);
  const int ne = static_cast<int>(keep.size()), ni = static_cast<int>(drop.size());
  CMat yee(ne, ne), yei(ne, ni), yie(ni, ne), yii(ni, ni);
  for (int a = 0; a < ne; ++a) {
    for (int b = 0; b < ne; ++b) yee(a, b) = y(keep[a], keep[b]);
    for (int b = 0; b < ni; ++b) yei(a, b) = y(keep[a], drop[b]);
  }
  for (int a = 0; a < ni; ++a) {
    for (int b = 0; b < ne; ++b) yie(a, b) = y(drop[a], keep[b]);
    for (int b = 0; b < ni; ++b) yii(a, b) = y(drop[a], drop[b]);
  }
  if (ni == 0) return yee;
  Eigen::PartialPivLU<CMat> lu(yii);
  if (!(lu.rcond() > 1e-14)) throw SingularInterior("interior block of the nodal matrix is singular");
  return yee - yei * lu.solve(yie);
}

Mat rotation(double angle) {
  Mat r(2, 2);
  r << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
  return r;
}

namespace {

Mat block_rotation(const std::vector<double>& angles) {
  const int n = static_cast<int>(angles.size());
  Mat r = Mat::Zero(2 * n, 2 * n);
  for (int k = 0; k < n; ++k) r.block(2 * k, 2 * k, 2, 2) = rotation(angles[k]);
  return r;
}

}  // namespace

CMat to_global_frame(const CMat& y, const std::vector<double>& angles) {
  const Mat r = block_rotation(angles);
  return r.cast<cd>() * y * r.transpose().cast<cd>();
}

StateSpace to_global_frame(const StateSpace& y, const std::vector<double>& angles) {
  const Mat r = block_rotation(angles);
  return left_multiply(r, right_multiply(y, r.transpose()));
}

Network::Network(NetworkData data) : data_(std::move(data)) {
  const int nall = static_cast<int>(data_.buses.size());
  std::map<int, int> table;
  for (int k = 0; k < nall; ++k) {
    const auto& b = data_.buses[k];
    if (!table.emplace(b.id, k).second) throw std::invalid_argument("duplicate bus id " + std::to_string(b.id));
    if (b.type != BusType::Slack) {
      index_[b.id] = static_cast<int>(nodes_.size());
      nodes_.push_back(b.id);
    }
  }
  if (static_cast<int>(nodes_.size()) == nall) throw std::invalid_argument("network needs at least one slack bus");

  g_.assign(nodes_.size(), 0.0);
  bcap_.assign(nodes_.size(), data_.stray_b);
  auto node_of = [&](int id) {
    auto it = index_.find(id);
    return it == index_.end() ? -1 : it->second;
  };
  for (const auto& b : data_.branches) {
    if (!table.count(b.from) || !table.count(b.to))
      throw std::invalid_argument("branch " + std::to_string(b.from) + "-" + std::to_string(b.to) +
                                  " refers to an unknown bus");
    if (b.r < 0.0 || b.x < 0.0) throw std::invalid_argument("branch impedance must be non-negative");
    if (!(b.x > 0.0)) throw std::invalid_argument("branch " + std::to_string(b.from) + "-" + std::to_string(b.to) +
                                                  " needs X > 0 for the dynamic model");
    series_.push_back({node_of(b.from), node_of(b.to), std::max(b.r, data_.min_branch_r), b.x,
                       b.tap > 0.0 ? b.tap : 1.0});
    bus_pos_.push_back(table[b.from]);
    bus_pos_.push_back(table[b.to]);
    for (int id : {b.from, b.to}) {
      const int k = node_of(id);
      if (k >= 0) bcap_[k] += 0.5 * b.b;
    }
  }
  for (const auto& b : data_.buses) {
    const int k = node_of(b.id);
    if (k < 0) continue;
    g_[k] += b.shunt_g + b.load_p;
    auto add_shunt = [&](double susceptance) {
      if (susceptance > 0.0) {
        bcap_[k] += susceptance;
      } else if (susceptance < 0.0) {
        series_.push_back({k, -1, data_.min_branch_r, 1.0 / -susceptance, 1.0});
        bus_pos_.push_back(table[b.id]);
        bus_pos_.push_back(-1);
      }
    };
    add_shunt(b.shunt_b);
    if (!data_.resistive_loads) add_shunt(-b.load_q);
  }
  for (double c : bcap_)
    if (!(c > 0.0)) throw std::invalid_argument("every bus needs positive capacitance; set stray_b > 0");
  check_connected();
}

int Network::node_index(int bus_id) const {
  auto it = index_.find(bus_id);
  if (it == index_.end()) throw std::out_of_range("bus " + std::to_string(bus_id) + " is not a network node");
  return it->second;
}

void Network::check_connected() const {
  const int nall = static_cast<int>(data_.buses.size());
  std::vector<int> parent(nall);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t k = 0; k < series_.size(); ++k) {
    const int a = bus_pos_[2 * k], b = bus_pos_[2 * k + 1];
    if (a >= 0 && b >= 0) parent[find(a)] = find(b);
  }
  const int root = find(0);
  for (int k = 1; k < nall; ++k)
    if (find(k) != root)
      throw DisconnectedNetwork("bus " + std::to_string(data_.buses[k].id) + " is not connected to bus " +
                                std::to_string(data_.buses[0].id));
}

CMat Network::phasor_ybus() const {
  const int nall = static_cast<int>(data_.buses.size());
  CMat y = CMat::Zero(nall, nall);
  for (std::size_t k = 0; k < series_.size(); ++k) {
    const auto& e = series_[k];
    const int f = bus_pos_[2 * k], t = bus_pos_[2 * k + 1];
    const cd ys = 1.0 / cd(e.r, e.x);
    y(f, f) += ys / (e.tap * e.tap);
    if (t >= 0) {
      y(t, t) += ys;
      y(f, t) -= ys / e.tap;
      y(t, f) -= ys / e.tap;
    }
  }
  for (int k = 0; k < nall; ++k) {
    auto it = index_.find(data_.buses[k].id);
    if (it == index_.end()) continue;
    y(k, k) += cd(g_[it->second], bcap_[it->second]);
  }
  return y;
}

PowerFlowResult Network::power_flow(double tol, int max_iter) const {
  const int nall = static_cast<int>(data_.buses.size());
  const CMat y = phasor_ybus();
  std::vector<int> pvpq, pq;
  CVec v(nall);
  Vec p_spec = Vec::Zero(nall), q_spec = Vec::Zero(nall);
  for (int k = 0; k < nall; ++k) {
    const auto& b = data_.buses[k];
    v(k) = (b.type == BusType::PQ) ? cd(1.0, 0.0) : cd(b.gen_v, 0.0);
    if (b.type != BusType::Slack) pvpq.push_back(k);
    if (b.type == BusType::PQ) pq.push_back(k);
    p_spec(k) = b.gen_p;
  }
  const int na = static_cast<int>(pvpq.size()), nm = static_cast<int>(pq.size());

  auto mismatch = [&](const CVec& vv) {
    const CVec s = vv.array() * (y * vv).conjugate().array();
    Vec f(na + nm);
    for (int i = 0; i < na; ++i) f(i) = s(pvpq[i]).real() - p_spec(pvpq[i]);
    for (int i = 0; i < nm; ++i) f(na + i) = s(pq[i]).imag() - q_spec(pq[i]);
    return f;
  };

  PowerFlowResult res;
  Vec f = mismatch(v);
  int it = 0;
  while (f.size() > 0 && f.cwiseAbs().maxCoeff() > tol && it < max_iter) {
    const CVec ibus = y * v;
    const CVec vn = v.array() / v.array().abs();
    const CMat dva = cd(0, 1) * v.asDiagonal() * (ibus.asDiagonal().toDenseMatrix() - y * v.asDiagonal()).conjugate();
    const CMat dvm = v.asDiagonal() * (y * vn.asDiagonal()).conjugate() +
                     ibus.conjugate().asDiagonal().toDenseMatrix() * vn.asDiagonal();
    Mat jac(na + nm, na + nm);
    for (int i = 0; i < na; ++i) {
      for (int j = 0; j < na; ++j) jac(i, j) = dva(pvpq[i], pvpq[j]).real();
      for (int j = 0; j < nm; ++j) jac(i, na + j) = dvm(pvpq[i], pq[j]).real();
    }
    for (int i = 0; i < nm; ++i) {
      for (int j = 0; j < na; ++j) jac(na + i, j) = dva(pq[i], pvpq[j]).imag();
      for (int j = 0; j < nm; ++j) jac(na + i, na + j) = dvm(pq[i], pq[j]).imag();
    }
    const Vec dx = jac.fullPivLu().solve(-f);
    for (int i = 0; i < na; ++i) v(pvpq[i]) *= std::polar(1.0, dx(i));
    for (int i = 0; i < nm; ++i) v(pq[i]) *= (std::abs(v(pq[i])) + dx(na + i)) / std::abs(v(pq[i]));
    f = mismatch(v);
    ++it;
  }
  res.iterations = it;
  res.mismatch = f.size() ? f.cwiseAbs().maxCoeff() : 0.0;
  if (!(res.mismatch <= tol)) {
    std::ostringstream os;
    os << "power flow did not converge (mismatch " << res.mismatch << " after " << it << " iterations)";
    throw std::runtime_error(os.str());
  }
  const CVec ibus = y * v;
  for (int k = 0; k < nall; ++k) {
    res.voltage[data_.buses[k].id] = v(k);
    res.injection[data_.buses[k].id] = ibus(k);
  }
  return res;
}

CMat Network::nodal(cd s) const {
  const int n = size();
  CMat y = CMat::Zero(2 * n, 2 * n);
  const double w0 = data_.omega0;
  for (const auto& e : series_) {
    const CMat yb = branch_dq(e.r, e.x / w0, w0, s);
    if (e.from >= 0) y.block(2 * e.from, 2 * e.from, 2, 2) += yb / (e.tap * e.tap);
    if (e.to >= 0) y.block(2 * e.to, 2 * e.to, 2, 2) += yb;
    if (e.from >= 0 && e.to >= 0) {
      y.block(2 * e.from, 2 * e.to, 2, 2) -= yb / e.tap;
      y.block(2 * e.to, 2 * e.from, 2, 2) -= yb / e.tap;
    }
  }
  const CMat j = rot90().cast<cd>();
  for (int k = 0; k < n; ++k) {
    y.block(2 * k, 2 * k, 2, 2) += g_[k] * CMat::Identity(2, 2) + bcap_[k] * j + s * (bcap_[k] / w0) * CMat::Identity(2, 2);
  }
  return y;
}

CMat Network::reduced(cd s, const std::vector<int>& ports) const {
  std::vector<int> keep;
  for (int id : ports) {
    const int k = node_index(id);
    keep.push_back(2 * k);
    keep.push_back(2 * k + 1);
  }
  return kron_reduce(nodal(s), keep);
}

int Network::states() const { return 2 * static_cast<int>(series_.size()) + 2 * size(); }

StateSpace Network::impedance(const std::vector<int>& ports) const {
  const int nb = static_cast<int>(series_.size()), n = size();
  const int ns = 2 * nb + 2 * n;
  const int np = static_cast<int>(ports.size());
  const double w0 = data_.omega0;
  const Mat j = rot90();
  Mat a = Mat::Zero(ns, ns), b = Mat::Zero(ns, 2 * np), c = Mat::Zero(2 * np, ns);
  Vec e(ns);
  auto vi = [&](int k) { return 2 * nb + 2 * k; };
  for (int k = 0; k < nb; ++k) {
    const auto& s = series_[k];
    const int ii = 2 * k;
    e.segment(ii, 2).setConstant(s.x / w0);
    a.block(ii, ii, 2, 2) = -s.r * Mat::Identity(2, 2) - s.x * j;
    if (s.from >= 0) {
      a.block(ii, vi(s.from), 2, 2) += Mat::Identity(2, 2) / s.tap;
      a.block(vi(s.from), ii, 2, 2) -= Mat::Identity(2, 2) / s.tap;
    }
    if (s.to >= 0) {
      a.block(ii, vi(s.to), 2, 2) -= Mat::Identity(2, 2);
      a.block(vi(s.to), ii, 2, 2) += Mat::Identity(2, 2);
    }
  }
  for (int k = 0; k < n; ++k) {
    e.segment(vi(k), 2).setConstant(bcap_[k] / w0);
    a.block(vi(k), vi(k), 2, 2) -= g_[k] * Mat::Identity(2, 2) + bcap_[k] * j;
  }
  for (int p = 0; p < np; ++p) {
    const int k = node_index(ports[p]);
    b.block(vi(k), 2 * p, 2, 2).setIdentity();
    c.block(2 * p, vi(k), 2, 2).setIdentity();
  }
  const Vec einv = e.cwiseInverse();
  return {einv.asDiagonal() * a, einv.asDiagonal() * b, c, Mat::Zero(2 * np, 2 * np)};
}

}  // namespace phasecert
