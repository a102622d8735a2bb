#pragma once

#include <stdexcept>
#include <vector>

#include "sqflow/core_grid.hpp"
#include "sqflow/field.hpp"
#include "sqflow/params.hpp"

namespace sqflow {

struct PressureSolution;  // pressure_solver.hpp

/// The flow has no dynamics left (zero velocities and gap rate, or a
/// timestep that underflows); a run ends with reason `stalled`.
struct StalledError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Depth-averaged face velocities of the lubrication flow, m/s.
/// u: n rows of n+1 x-faces (positive toward increasing column);
/// v: n+1 rows of n y-faces (positive toward increasing row).
/// Faces 0 and n of each line sit on the open domain boundary.
struct FaceVelocities {
  int n = 0;
  std::vector<double> u;  // size n*(n+1)
  std::vector<double> v;  // size (n+1)*n

  double* u_row(int r) { return u.data() + static_cast<size_t>(r) * (n + 1); }
  const double* u_row(int r) const { return u.data() + static_cast<size_t>(r) * (n + 1); }
  double* v_row(int fr) { return v.data() + static_cast<size_t>(fr) * n; }
  const double* v_row(int fr) const { return v.data() + static_cast<size_t>(fr) * n; }
};

/// V = -(h^2 / 12 mu) grad p_hat evaluated at cell faces; the gradient of
/// p_hat equals the gradient of p because the capillary shift is spatially
/// constant at fixed h. Pressure outside the domain is zero (open edge).
FaceVelocities face_velocities(const PressureSolution& p, double h, const SimParams& params);

/// dt = min(cfl * dx / max|velocity|, gap_change_per_step_max * h / |gap_rate|).
/// Throws std::runtime_error when both terms are unbounded (stalled flow).
double stable_timestep(const FaceVelocities& vel, double gap_rate, double h,
                       const SimParams& params);

struct AdvectResult {
  Field2D f_star;
  double outflow_volume = 0.0;  // m^3 lost across the boundary this step
};

/// First-order donor-cell upwind transport of f*. Domain boundary faces are
/// open: outward flux accumulates into outflow_volume, inward flux is zero.
/// Throws when dt violates the CFL bound for `vel`.
AdvectResult advect(const Field2D& f_star, const FaceVelocities& vel, double dt,
                    const SimParams& params);

struct RedistributeResult {
  int sweeps = 0;
  double outflow_volume = 0.0;  // m^3 vented across the open boundary
};

/// Conservative overfill redistribution: every cell with f > 1 pushes its
/// excess f* in equal shares to face-neighbors with f < 1, in simultaneous
/// (Jacobi) sweeps, until max f <= 1 + 1e-9 or 10*grid_n sweeps elapse.
/// The open domain boundary acts as an unlimited receiver for overfull
/// cells on the edge (the excess leaves as outflow), and excess trapped
/// behind fully saturated regions is deposited into front-cell headroom,
/// mirroring what the instantaneous lubrication pressure would do. The sum
/// of f* plus vented outflow is preserved. Throws when overfilled cells
/// remain with nowhere to drain.
RedistributeResult redistribute_overfill(Field2D& f_star, double h, const SimParams& params);

/// h <- h + gap_rate*dt, t <- t + dt, then overfill redistribution at the
/// new gap (vented volume accumulates into state.outflow_volume). Requires
/// h + gap_rate*dt >= term_h_min / 2.
RedistributeResult apply_gap_change_and_redistribute(SimState& state, double gap_rate,
                                                     double dt, const SimParams& params);

}  // namespace sqflow
