#pragma once

#include "sqflow/field.hpp"
#include "sqflow/params.hpp"
#include "sqflow/pattern.hpp"

namespace sqflow {

/// Top-down wet/dry map (the high-resolution image).
struct ImprintImage {
  BoolGrid wet;
  int n() const { return wet.n(); }
  std::vector<uint32_t> on_indices() const;
  static ImprintImage from_indices(const std::vector<uint32_t>& idx, int n = 160);
  bool operator==(const ImprintImage&) const = default;
};

/// Evolving liquid state: modified volume fraction f* = f*h/h_ref on the
/// cell grid, the (spatially uniform) gap h, elapsed time, and the liquid
/// volume lost across the open domain boundary so far.
struct SimState {
  double t = 0.0;          // s
  double h = 0.0;          // m
  Field2D f_star;          // dimensionless
  double outflow_volume = 0.0;  // m^3, cumulative

  /// Liquid volume currently inside the domain, m^3.
  double liquid_volume(const SimParams& p) const;
};

/// Deposits one cylindrical droplet of volume V per On nozzle, centered on
/// the nozzle's cell block. Partial cell coverage comes from 16x16 subcell
/// supersampling; each droplet's total f* is then scaled to match V exactly
/// and any overfilled cells (overlapping droplets) are redistributed.
/// Throws when the pattern is empty or the droplet radius exceeds half the
/// domain side.
SimState init_state(const DropPattern& dp, const SimParams& params);

/// Initial droplet radius sqrt(V / (pi h0)), m.
double droplet_radius(const SimParams& params);

/// Pixel On iff f = f* h_ref / h >= wet_threshold.
ImprintImage binarize_imprint(const Field2D& f_star, double h, const SimParams& params);

/// Number of cells with f >= wet_threshold.
int wet_cell_count(const Field2D& f_star, double h, const SimParams& params);

}  // namespace sqflow
