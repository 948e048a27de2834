#pragma once

#include <filesystem>
#include <string>

#include "phasecert/criteria.hpp"
#include "phasecert/scenario.hpp"

namespace fixture {

inline std::filesystem::path source_dir() { return PHASECERT_SOURCE_DIR; }

inline phasecert::Scenario scenario(const std::string& name) {
  return phasecert::load_scenario(source_dir() / "scenarios" / (name + ".toml"));
}

inline phasecert::CertifyOptions options(const phasecert::Scenario& sc) {
  phasecert::CertifyOptions o;
  o.frame = sc.frame;
  o.grid = sc.grid.build();
  o.refine = sc.refine;
  o.centralized = sc.centralized;
  return o;
}

}  // namespace fixture
