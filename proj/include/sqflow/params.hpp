#pragma once

#include <filesystem>
#include <string>

namespace sqflow {

/// All physical and numerical constants of a run. SI units throughout.
struct SimParams {
  // Fluid and geometry.
  double viscosity = 0.001;             // Pa.s
  double surface_tension = 0.032;       // N/m
  double contact_angle_cos_sum = 1.76;  // cos(theta_top) + cos(theta_bottom)
  double droplet_volume = 6e-15;        // m^3 (6 pl)
  double initial_gap = 1e-6;            // m
  double h_ref = 1e-6;                  // m, reference gap for f*
  double external_force = 0.0;          // N, downward push on the superstrate
  double ambient_pressure = 101325.0;   // Pa, bookkeeping only

  // Discretization.
  int nozzle_n = 20;            // nozzles per side
  double nozzle_pitch = 84.5e-6;  // m
  int cells_per_pitch = 8;      // imprint cells per nozzle pitch
  int grid_n = 160;             // cells per side = nozzle_n * cells_per_pitch
  double cell_size = 84.5e-6 / 8.0;  // m

  // Termination thresholds.
  double term_coverage_max = 0.90;  // fraction of wet cells
  double term_time_max = 1.0;       // s
  double term_h_min = 5e-9;         // m

  // Numerics.
  double cfl_number = 0.25;
  double gap_change_per_step_max = 0.01;  // fraction of h per step
  double wet_threshold = 0.5;             // f at or above which a cell is wet
  double solver_tol = 1e-8;               // relative residual
  int solver_max_iter = 0;                // 0 = auto (20 * grid_n)

  double cell_area() const { return cell_size * cell_size; }
  double domain_side() const { return cell_size * grid_n; }
  int effective_max_iter() const { return solver_max_iter > 0 ? solver_max_iter : 20 * grid_n; }

  /// Recompute grid_n and cell_size from nozzle_n / pitch / cells_per_pitch.
  void derive_grid();

  /// Throws std::invalid_argument when any invariant is violated.
  void validate() const;
};

/// Applies `key=value` overrides from a flat text file on top of `base`.
/// Keys mirror the SimParams field names; '#' starts a comment.
SimParams load_params_file(const std::filesystem::path& file, SimParams base = SimParams{});

/// Single key=value override; throws on unknown key or bad value.
void apply_param(SimParams& p, const std::string& key, const std::string& value);

}  // namespace sqflow
