#include "phasecert/scenario.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include "toml.hpp"

namespace phasecert {

namespace {

std::string format_error(const std::string& file, int line, const std::string& field, const std::string& what) {
  std::ostringstream os;
  os << file;
  if (line > 0) os << ":" << line;
  if (!field.empty()) os << ": " << field;
  os << ": " << what;
  return os.str();
}

}  // namespace

ConfigError::ConfigError(const std::string& f, int l, const std::string& fld, const std::string& what)
    : std::runtime_error(format_error(f, l, fld, what)), file(f), field(fld), line(l) {}

FrequencyGrid GridSpec::build() const {
  if (!(fmin_hz > 0.0) || !(fmax_hz > fmin_hz) || points < 2)
    throw std::invalid_argument("grid needs 0 < fmin < fmax and at least 2 points");
  return FrequencyGrid::logspace(fmin_hz, fmax_hz, points, include_zero);
}

GridSpec parse_grid_option(const std::string& s) {
  GridSpec g;
  std::vector<std::string> parts;
  std::stringstream ss(s);
  for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
  if (parts.size() < 3 || parts.size() > 4) throw std::invalid_argument("--grid expects fmin:fmax:points[:nozero]");
  try {
    g.fmin_hz = std::stod(parts[0]);
    g.fmax_hz = std::stod(parts[1]);
    g.points = std::stoi(parts[2]);
  } catch (const std::exception&) {
    throw std::invalid_argument("--grid: cannot parse '" + s + "'");
  }
  if (parts.size() == 4) {
    if (parts[3] != "nozero") throw std::invalid_argument("--grid: unknown suffix '" + parts[3] + "'");
    g.include_zero = false;
  }
  g.build();
  return g;
}

namespace {

// Thin wrapper that remembers where we are for diagnostics.
struct Reader {
  std::string file;

  [[noreturn]] void fail(const toml::node* n, const std::string& field, const std::string& what) const {
    const int line = n ? static_cast<int>(n->source().begin.line) : 0;
    throw ConfigError(file, line, field, what);
  }

  void only(const toml::table& t, const std::string& where, const std::set<std::string>& allowed) const {
    for (const auto& [k, v] : t) {
      const std::string key(k.str());
      if (!allowed.count(key)) fail(&v, where.empty() ? key : where + "." + key, "unknown key");
    }
  }

  double number(const toml::table& t, const std::string& key, const std::string& where, double fallback) const {
    const toml::node* n = t.get(key);
    if (!n) return fallback;
    if (auto v = n->value<double>()) {
      if (!std::isfinite(*v)) fail(n, where + "." + key, "must be finite");
      return *v;
    }
    fail(n, where + "." + key, "expected a number");
  }

  bool boolean(const toml::table& t, const std::string& key, const std::string& where, bool fallback) const {
    const toml::node* n = t.get(key);
    if (!n) return fallback;
    if (auto v = n->value<bool>()) return *v;
    fail(n, where + "." + key, "expected true or false");
  }

  std::string text(const toml::table& t, const std::string& key, const std::string& where,
                   const std::string& fallback) const {
    const toml::node* n = t.get(key);
    if (!n) return fallback;
    if (auto v = n->value<std::string>()) return *v;
    fail(n, where + "." + key, "expected a string");
  }

  int integer(const toml::table& t, const std::string& key, const std::string& where) const {
    const toml::node* n = t.get(key);
    if (!n) fail(&t, where + "." + key, "missing");
    if (auto v = n->value<int64_t>()) return static_cast<int>(*v);
    fail(n, where + "." + key, "expected an integer");
  }
};

const std::set<std::string> kParamKeys{"J",  "D",   "Rv",  "Xv",          "kp",    "kr",     "resonant_bandwidth",
                                       "Rf", "Xf",  "q_control", "kpq",  "kiq",   "q_filter_hz", "delay",
                                       "rating"};

void read_params(const Reader& r, const toml::table& t, const std::string& where, GfmParameters& p) {
  p.J = r.number(t, "J", where, p.J);
  p.D = r.number(t, "D", where, p.D);
  p.Rv = r.number(t, "Rv", where, p.Rv);
  p.Xv = r.number(t, "Xv", where, p.Xv);
  p.kp = r.number(t, "kp", where, p.kp);
  p.kr = r.number(t, "kr", where, p.kr);
  p.resonant_bandwidth = r.number(t, "resonant_bandwidth", where, p.resonant_bandwidth);
  p.Rf = r.number(t, "Rf", where, p.Rf);
  p.Xf = r.number(t, "Xf", where, p.Xf);
  p.q_control = r.boolean(t, "q_control", where, p.q_control);
  p.kpq = r.number(t, "kpq", where, p.kpq);
  p.kiq = r.number(t, "kiq", where, p.kiq);
  p.q_filter_hz = r.number(t, "q_filter_hz", where, p.q_filter_hz);
  p.delay = r.number(t, "delay", where, p.delay);
  p.rating = r.number(t, "rating", where, p.rating);
}

void read_bus(const Reader& r, const toml::table& t, const std::string& where, BusData& b, bool need_id) {
  if (need_id) b.id = r.integer(t, "id", where);
  if (t.get("type")) {
    try {
      b.type = parse_bus_type(r.text(t, "type", where, ""));
    } catch (const std::invalid_argument& e) {
      r.fail(t.get("type"), where + ".type", e.what());
    }
  }
  b.load_p = r.number(t, "load_p", where, b.load_p);
  b.load_q = r.number(t, "load_q", where, b.load_q);
  b.shunt_g = r.number(t, "shunt_g", where, b.shunt_g);
  b.shunt_b = r.number(t, "shunt_b", where, b.shunt_b);
  b.gen_p = r.number(t, "gen_p", where, b.gen_p);
  b.gen_v = r.number(t, "gen_v", where, b.gen_v);
}

void read_branch(const Reader& r, const toml::table& t, const std::string& where, BranchData& b) {
  b.r = r.number(t, "r", where, b.r);
  b.x = r.number(t, "x", where, b.x);
  b.b = r.number(t, "b", where, b.b);
  b.tap = r.number(t, "tap", where, b.tap);
}

const toml::array* array_of_tables(const Reader& r, const toml::table& t, const std::string& key,
                                   const std::string& where) {
  const toml::node* n = t.get(key);
  if (!n) return nullptr;
  const toml::array* a = n->as_array();
  if (!a || !a->is_array_of_tables()) r.fail(n, where + key, "expected an array of tables ([[" + where + key + "]])");
  return a;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  for (std::string cell; std::getline(ss, cell, ',');) {
    const auto a = cell.find_first_not_of(" \t\r");
    const auto b = cell.find_last_not_of(" \t\r");
    out.push_back(a == std::string::npos ? "" : cell.substr(a, b - a + 1));
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

// Rows of a CSV with a header; '#' lines are comments.
struct CsvTable {
  std::string file;
  std::map<std::string, int> columns;
  std::vector<std::pair<int, std::vector<std::string>>> rows;  // line number, cells

  const std::string& cell(const std::pair<int, std::vector<std::string>>& row, const std::string& col) const {
    return row.second[columns.at(col)];
  }

  double number(const std::pair<int, std::vector<std::string>>& row, const std::string& col) const {
    const std::string& s = cell(row, col);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != s.size() || s.empty() || !std::isfinite(v))
      throw ConfigError(file, row.first, col, "expected a number, got '" + s + "'");
    return v;
  }
};

CsvTable read_csv(const std::filesystem::path& path, const std::vector<std::string>& required) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string(), 0, "", "cannot open file");
  CsvTable t;
  t.file = path.string();
  std::string line;
  int lineno = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#') continue;
    auto cells = split_csv_line(line);
    if (!header) {
      for (std::size_t i = 0; i < cells.size(); ++i) t.columns[cells[i]] = static_cast<int>(i);
      for (const auto& c : required)
        if (!t.columns.count(c)) throw ConfigError(t.file, lineno, c, "missing column in header");
      header = true;
      continue;
    }
    if (cells.size() != t.columns.size())
      throw ConfigError(t.file, lineno, "", "expected " + std::to_string(t.columns.size()) + " cells, got " +
                                                std::to_string(cells.size()));
    t.rows.emplace_back(lineno, std::move(cells));
  }
  if (!header) throw ConfigError(t.file, 0, "", "empty table");
  return t;
}

int as_int(const CsvTable& t, const std::pair<int, std::vector<std::string>>& row, const std::string& col) {
  const double v = t.number(row, col);
  if (v != std::floor(v)) throw ConfigError(t.file, row.first, col, "expected an integer");
  return static_cast<int>(v);
}

}  // namespace

void load_buses_csv(const std::filesystem::path& path, NetworkData& net) {
  const CsvTable t = read_csv(path, {"bus_id", "type", "load_p", "load_q", "shunt_g", "shunt_b", "gen_p", "gen_v"});
  for (const auto& row : t.rows) {
    BusData b;
    b.id = as_int(t, row, "bus_id");
    try {
      b.type = parse_bus_type(t.cell(row, "type"));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(t.file, row.first, "type", e.what());
    }
    b.load_p = t.number(row, "load_p");
    b.load_q = t.number(row, "load_q");
    b.shunt_g = t.number(row, "shunt_g");
    b.shunt_b = t.number(row, "shunt_b");
    b.gen_p = t.number(row, "gen_p");
    b.gen_v = t.number(row, "gen_v");
    net.buses.push_back(b);
  }
}

void load_branches_csv(const std::filesystem::path& path, NetworkData& net) {
  const CsvTable t = read_csv(path, {"from", "to", "r", "x", "b", "tap"});
  for (const auto& row : t.rows) {
    BranchData b;
    b.from = as_int(t, row, "from");
    b.to = as_int(t, row, "to");
    b.r = t.number(row, "r");
    b.x = t.number(row, "x");
    b.b = t.number(row, "b");
    b.tap = t.number(row, "tap");
    net.branches.push_back(b);
  }
}

Scenario parse_scenario(const std::string& text, const std::filesystem::path& base, const std::string& origin) {
  toml::table root;
  try {
    root = toml::parse(text, origin);
  } catch (const toml::parse_error& e) {
    throw ConfigError(origin, static_cast<int>(e.source().begin.line), "", std::string(e.description()));
  }
  const Reader r{origin};
  r.only(root, "", {"name", "description", "network", "converter_defaults", "converters", "frame", "grid", "output"});

  Scenario sc;
  sc.name = r.text(root, "name", "", "");
  if (sc.name.empty()) r.fail(&root, "name", "missing");
  sc.description = r.text(root, "description", "", "");

  // network
  const toml::table* net = root["network"].as_table();
  if (!net) r.fail(&root, "network", "missing [network] table");
  r.only(*net, "network",
         {"frequency_hz", "buses_csv", "branches_csv", "buses", "branches", "bus_overrides", "branch_overrides",
          "min_branch_r", "stray_b", "resistive_loads"});
  NetworkData& nd = sc.network;
  nd.omega0 = 2.0 * std::numbers::pi * r.number(*net, "frequency_hz", "network", 50.0);
  nd.min_branch_r = r.number(*net, "min_branch_r", "network", nd.min_branch_r);
  nd.stray_b = r.number(*net, "stray_b", "network", nd.stray_b);
  nd.resistive_loads = r.boolean(*net, "resistive_loads", "network", nd.resistive_loads);

  const std::string buses_csv = r.text(*net, "buses_csv", "network", "");
  const std::string branches_csv = r.text(*net, "branches_csv", "network", "");
  if (!buses_csv.empty()) load_buses_csv(base / buses_csv, nd);
  if (!branches_csv.empty()) load_branches_csv(base / branches_csv, nd);
  if (auto a = array_of_tables(r, *net, "buses", "network.")) {
    for (std::size_t k = 0; k < a->size(); ++k) {
      const auto& t = *a->get(k)->as_table();
      const std::string w = "network.buses[" + std::to_string(k) + "]";
      r.only(t, w, {"id", "type", "load_p", "load_q", "shunt_g", "shunt_b", "gen_p", "gen_v"});
      BusData b;
      read_bus(r, t, w, b, true);
      nd.buses.push_back(b);
    }
  }
  if (auto a = array_of_tables(r, *net, "branches", "network.")) {
    for (std::size_t k = 0; k < a->size(); ++k) {
      const auto& t = *a->get(k)->as_table();
      const std::string w = "network.branches[" + std::to_string(k) + "]";
      r.only(t, w, {"from", "to", "r", "x", "b", "tap"});
      BranchData b;
      b.from = r.integer(t, "from", w);
      b.to = r.integer(t, "to", w);
      read_branch(r, t, w, b);
      nd.branches.push_back(b);
    }
  }
  if (nd.buses.empty()) r.fail(net, "network", "no buses (give buses_csv or [[network.buses]])");
  if (nd.branches.empty()) r.fail(net, "network", "no branches (give branches_csv or [[network.branches]])");

  if (auto a = array_of_tables(r, *net, "bus_overrides", "network.")) {
    for (std::size_t k = 0; k < a->size(); ++k) {
      const auto& t = *a->get(k)->as_table();
      const std::string w = "network.bus_overrides[" + std::to_string(k) + "]";
      r.only(t, w, {"id", "type", "load_p", "load_q", "shunt_g", "shunt_b", "gen_p", "gen_v"});
      const int id = r.integer(t, "id", w);
      BusData* target = nullptr;
      for (auto& b : nd.buses)
        if (b.id == id) target = &b;
      if (!target) r.fail(&t, w + ".id", "no bus " + std::to_string(id));
      read_bus(r, t, w, *target, false);
    }
  }
  if (auto a = array_of_tables(r, *net, "branch_overrides", "network.")) {
    for (std::size_t k = 0; k < a->size(); ++k) {
      const auto& t = *a->get(k)->as_table();
      const std::string w = "network.branch_overrides[" + std::to_string(k) + "]";
      r.only(t, w, {"from", "to", "r", "x", "b", "tap"});
      const int f = r.integer(t, "from", w), to = r.integer(t, "to", w);
      int hits = 0;
      for (auto& b : nd.branches) {
        if ((b.from == f && b.to == to) || (b.from == to && b.to == f)) {
          read_branch(r, t, w, b);
          ++hits;
        }
      }
      if (hits == 0) r.fail(&t, w, "no branch " + std::to_string(f) + "-" + std::to_string(to));
    }
  }

  // converters
  GfmParameters defaults;
  defaults.omega0 = nd.omega0;
  if (const toml::table* d = root["converter_defaults"].as_table()) {
    r.only(*d, "converter_defaults", kParamKeys);
    read_params(r, *d, "converter_defaults", defaults);
  }
  if (auto a = array_of_tables(r, root, "converters", "")) {
    for (std::size_t k = 0; k < a->size(); ++k) {
      const auto& t = *a->get(k)->as_table();
      const std::string w = "converters[" + std::to_string(k) + "]";
      std::set<std::string> allowed = kParamKeys;
      allowed.insert("bus");
      r.only(t, w, allowed);
      ConverterSpec c{r.integer(t, "bus", w), defaults};
      read_params(r, t, w, c.params);
      bool found = false;
      for (const auto& b : nd.buses) found = found || b.id == c.bus;
      if (!found) r.fail(t.get("bus"), w + ".bus", "no bus " + std::to_string(c.bus) + " in the network");
      try {
        c.params.validate();
      } catch (const std::invalid_argument& e) {
        r.fail(&t, w, e.what());
      }
      sc.converters.push_back(c);
    }
  }

  // frame
  sc.frame.omega0 = nd.omega0;
  if (const toml::table* f = root["frame"].as_table()) {
    r.only(*f, "frame", {"kind", "wc_hz", "weight", "weight_r", "weight_x", "centralized"});
    try {
      sc.frame.kind = parse_frame(r.text(*f, "kind", "frame", "blended"));
    } catch (const std::invalid_argument& e) {
      r.fail(f->get("kind"), "frame.kind", e.what());
    }
    try {
      sc.frame.weight = parse_weight(r.text(*f, "weight", "frame", "va_ref"));
    } catch (const std::invalid_argument& e) {
      r.fail(f->get("weight"), "frame.weight", e.what());
    }
    sc.frame.wc = 2.0 * std::numbers::pi * r.number(*f, "wc_hz", "frame", sc.frame.wc / (2.0 * std::numbers::pi));
    if (!(sc.frame.wc > 0.0)) r.fail(f->get("wc_hz"), "frame.wc_hz", "must be > 0");
    sc.frame.weight_r = r.number(*f, "weight_r", "frame", sc.frame.weight_r);
    sc.frame.weight_x = r.number(*f, "weight_x", "frame", sc.frame.weight_x);
    if (!(sc.frame.weight_x > 0.0) || sc.frame.weight_r < 0.0)
      r.fail(f, "frame.weight_x", "reference virtual admittance needs weight_x > 0 and weight_r >= 0");
    sc.centralized = r.boolean(*f, "centralized", "frame", false);
  }

  // grid
  if (const toml::table* g = root["grid"].as_table()) {
    r.only(*g, "grid", {"fmin_hz", "fmax_hz", "points", "include_zero", "refine"});
    sc.grid.fmin_hz = r.number(*g, "fmin_hz", "grid", sc.grid.fmin_hz);
    sc.grid.fmax_hz = r.number(*g, "fmax_hz", "grid", sc.grid.fmax_hz);
    if (g->get("points")) sc.grid.points = r.integer(*g, "points", "grid");
    sc.grid.include_zero = r.boolean(*g, "include_zero", "grid", sc.grid.include_zero);
    sc.refine = r.boolean(*g, "refine", "grid", sc.refine);
    try {
      sc.grid.build();
    } catch (const std::invalid_argument& e) {
      r.fail(g, "grid", e.what());
    }
  }

  if (const toml::table* o = root["output"].as_table()) {
    r.only(*o, "output", {"dir"});
    sc.out_dir = r.text(*o, "dir", "output", "");
  }
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string(), 0, "", "cannot open file");
  std::stringstream ss;
  ss << in.rdbuf();
  Scenario sc = parse_scenario(ss.str(), path.parent_path(), path.string());
  sc.source = path;
  return sc;
}

System assemble(const Scenario& sc) { return build_system(sc.network, sc.converters); }

}  // namespace phasecert
