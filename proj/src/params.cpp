#include "sqflow/params.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <stdexcept>

namespace sqflow {

void SimParams::derive_grid() {
  grid_n = nozzle_n * cells_per_pitch;
  cell_size = nozzle_pitch / cells_per_pitch;
}

void SimParams::validate() const {
  auto require = [](bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(std::string("SimParams: ") + msg);
  };
  require(viscosity > 0, "viscosity must be positive");
  require(surface_tension > 0, "surface_tension must be positive");
  require(contact_angle_cos_sum > 0 && contact_angle_cos_sum <= 2.0,
          "contact_angle_cos_sum must lie in (0, 2]");
  require(droplet_volume > 0, "droplet_volume must be positive");
  require(initial_gap > 0, "initial_gap must be positive");
  require(h_ref > 0, "h_ref must be positive");
  require(external_force >= 0, "external_force must be non-negative");
  require(nozzle_n > 0, "nozzle_n must be positive");
  require(nozzle_pitch > 0, "nozzle_pitch must be positive");
  require(cells_per_pitch > 0, "cells_per_pitch must be positive");
  require(grid_n == nozzle_n * cells_per_pitch, "grid_n must equal nozzle_n * cells_per_pitch");
  require(cell_size > 0, "cell_size must be positive");
  require(std::abs(cell_size - nozzle_pitch / cells_per_pitch) <= 1e-12 * cell_size,
          "cell_size must equal nozzle_pitch / cells_per_pitch");
  require(term_coverage_max > 0 && term_coverage_max < 1, "term_coverage_max must lie in (0,1)");
  require(term_time_max > 0, "term_time_max must be positive");
  require(term_h_min > 0 && term_h_min < initial_gap,
          "term_h_min must lie in (0, initial_gap)");
  require(cfl_number > 0 && cfl_number <= 0.5, "cfl_number must lie in (0, 0.5]");
  require(gap_change_per_step_max > 0 && gap_change_per_step_max < 1,
          "gap_change_per_step_max must lie in (0,1)");
  require(wet_threshold > 0 && wet_threshold < 1, "wet_threshold must lie in (0,1)");
  require(solver_tol > 0, "solver_tol must be positive");
  require(solver_max_iter >= 0, "solver_max_iter must be non-negative (0 = auto)");
}

namespace {

double parse_double(const std::string& v, const std::string& key) {
  char* end = nullptr;
  double x = std::strtod(v.c_str(), &end);
  if (end == v.c_str() || *end != '\0')
    throw std::invalid_argument("bad numeric value for " + key + ": '" + v + "'");
  return x;
}

int parse_int(const std::string& v, const std::string& key) {
  double x = parse_double(v, key);
  int i = static_cast<int>(x);
  if (static_cast<double>(i) != x)
    throw std::invalid_argument("value for " + key + " must be an integer: '" + v + "'");
  return i;
}

std::string trimmed(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  size_t b = s.find_last_not_of(" \t\r");
  if (a == std::string::npos) return "";
  return s.substr(a, b - a + 1);
}

}  // namespace

void apply_param(SimParams& p, const std::string& key, const std::string& value) {
  if (key == "viscosity") p.viscosity = parse_double(value, key);
  else if (key == "surface_tension") p.surface_tension = parse_double(value, key);
  else if (key == "contact_angle_cos_sum") p.contact_angle_cos_sum = parse_double(value, key);
  else if (key == "droplet_volume") p.droplet_volume = parse_double(value, key);
  else if (key == "initial_gap") p.initial_gap = parse_double(value, key);
  else if (key == "h_ref") p.h_ref = parse_double(value, key);
  else if (key == "external_force") p.external_force = parse_double(value, key);
  else if (key == "ambient_pressure") p.ambient_pressure = parse_double(value, key);
  else if (key == "nozzle_n") p.nozzle_n = parse_int(value, key);
  else if (key == "nozzle_pitch") p.nozzle_pitch = parse_double(value, key);
  else if (key == "cells_per_pitch") p.cells_per_pitch = parse_int(value, key);
  else if (key == "term_coverage_max") p.term_coverage_max = parse_double(value, key);
  else if (key == "term_time_max") p.term_time_max = parse_double(value, key);
  else if (key == "term_h_min") p.term_h_min = parse_double(value, key);
  else if (key == "cfl_number") p.cfl_number = parse_double(value, key);
  else if (key == "gap_change_per_step_max") p.gap_change_per_step_max = parse_double(value, key);
  else if (key == "wet_threshold") p.wet_threshold = parse_double(value, key);
  else if (key == "solver_tol") p.solver_tol = parse_double(value, key);
  else if (key == "solver_max_iter") p.solver_max_iter = parse_int(value, key);
  else if (key == "grid_n" || key == "cell_size")
    throw std::invalid_argument(key + " is derived; set nozzle_n/nozzle_pitch/cells_per_pitch");
  else
    throw std::invalid_argument("unknown parameter key: '" + key + "'");
}

SimParams load_params_file(const std::filesystem::path& file, SimParams base) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open params file: " + file.string());
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trimmed(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument(file.string() + ":" + std::to_string(lineno) +
                                  ": expected key=value");
    apply_param(base, trimmed(line.substr(0, eq)), trimmed(line.substr(eq + 1)));
  }
  base.derive_grid();
  base.validate();
  return base;
}

}  // namespace sqflow
