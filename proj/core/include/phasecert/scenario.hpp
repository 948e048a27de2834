#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "phasecert/system.hpp"
#include "phasecert/transforms.hpp"

namespace phasecert {

// Bad input file: carries the file and, when known, line and field.
struct ConfigError : std::runtime_error {
  ConfigError(const std::string& file, int line, const std::string& field, const std::string& what);
  std::string file, field;
  int line = 0;
};

struct GridSpec {
  double fmin_hz = 0.01;
  double fmax_hz = 1e4;
  int points = 400;
  bool include_zero = true;

  FrequencyGrid build() const;
};

// "fmin:fmax:points" with an optional ":nozero" suffix.
GridSpec parse_grid_option(const std::string& s);

struct Scenario {
  std::string name;
  std::string description;
  std::filesystem::path source;
  NetworkData network;
  std::vector<ConverterSpec> converters;
  FrameConfig frame;
  GridSpec grid;
  bool refine = true;
  bool centralized = false;
  std::string out_dir;  // empty: caller decides
};

Scenario load_scenario(const std::filesystem::path& path);
// base resolves relative CSV paths; origin only shows up in diagnostics.
Scenario parse_scenario(const std::string& text, const std::filesystem::path& base, const std::string& origin);

void load_buses_csv(const std::filesystem::path& path, NetworkData& net);
void load_branches_csv(const std::filesystem::path& path, NetworkData& net);

System assemble(const Scenario& sc);

}  // namespace phasecert
