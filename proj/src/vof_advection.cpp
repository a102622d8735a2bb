#include "sqflow/vof_advection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "sqflow/kernels.hpp"
#include "sqflow/pressure_solver.hpp"

namespace sqflow {

using kernels::active_kernels;

FaceVelocities face_velocities(const PressureSolution& p, double h, const SimParams& params) {
  const kernels::Kernels& k = active_kernels();
  const int n = p.p_hat.n();
  FaceVelocities vel;
  vel.n = n;
  vel.u.assign(static_cast<size_t>(n) * (n + 1), 0.0);
  vel.v.assign(static_cast<size_t>(n + 1) * n, 0.0);
  // u_face = c * (p_right - p_left) with c = -h^2 / (12 mu dx); the
  // pressure outside the open domain boundary is zero.
  const double c = -(h * h) / (12.0 * params.viscosity * params.cell_size);

  for (int r = 0; r < n; ++r) {
    const double* pr = p.p_hat.row(r);
    double* ur = vel.u_row(r);
    ur[0] = c * (pr[0] - 0.0);
    if (n > 1) k.grad_scale(ur + 1, c, pr, pr + 1, n - 1);
    ur[n] = c * (0.0 - pr[n - 1]);
  }
  for (int fr = 0; fr <= n; ++fr) {
    double* vr = vel.v_row(fr);
    if (fr == 0) {
      const double* below = p.p_hat.row(0);
      for (int cidx = 0; cidx < n; ++cidx) vr[cidx] = c * (below[cidx] - 0.0);
    } else if (fr == n) {
      const double* above = p.p_hat.row(n - 1);
      for (int cidx = 0; cidx < n; ++cidx) vr[cidx] = c * (0.0 - above[cidx]);
    } else {
      k.grad_scale(vr, c, p.p_hat.row(fr - 1), p.p_hat.row(fr), n);
    }
  }
  return vel;
}

double stable_timestep(const FaceVelocities& vel, double gap_rate, double h,
                       const SimParams& params) {
  const kernels::Kernels& k = active_kernels();
  const double vmax =
      std::max(k.max_abs(vel.u.data(), static_cast<int>(vel.u.size())),
               k.max_abs(vel.v.data(), static_cast<int>(vel.v.size())));
  const double gmag = std::fabs(gap_rate);
  if (vmax == 0.0 && gmag == 0.0)
    throw StalledError("stable_timestep: zero dynamics (simulation stalled)");
  double dt = std::numeric_limits<double>::infinity();
  if (vmax > 0.0) dt = std::min(dt, params.cfl_number * params.cell_size / vmax);
  if (gmag > 0.0) dt = std::min(dt, params.gap_change_per_step_max * h / gmag);
  if (!(dt > 0.0) || !std::isfinite(dt))
    throw StalledError("stable_timestep: non-positive timestep");
  return dt;
}

AdvectResult advect(const Field2D& f_star, const FaceVelocities& vel, double dt,
                    const SimParams& params) {
  const kernels::Kernels& k = active_kernels();
  const int n = f_star.n();
  const double dx = params.cell_size;
  const double vmax = std::max(k.max_abs(vel.u.data(), static_cast<int>(vel.u.size())),
                               k.max_abs(vel.v.data(), static_cast<int>(vel.v.size())));
  if (vmax * dt / dx > params.cfl_number * (1.0 + 1e-12))
    throw std::runtime_error("advect: dt violates the CFL bound");

  const double scale = dt / dx;
  // Face fluxes in f* units: qx[r][j] crosses the x-face between columns
  // j-1 and j of row r (positive toward increasing column).
  std::vector<double> qx(static_cast<size_t>(n) * (n + 1));
  std::vector<double> qy(static_cast<size_t>(n + 1) * n);

  for (int r = 0; r < n; ++r) {
    const double* f = f_star.row(r);
    const double* u = vel.u_row(r);
    double* q = qx.data() + static_cast<size_t>(r) * (n + 1);
    // Open boundary: inward flux carries nothing (donor outside is empty).
    q[0] = (u[0] >= 0.0) ? 0.0 : (scale * u[0]) * f[0];
    if (n > 1) k.upwind_flux(q + 1, scale, u + 1, f, f + 1, n - 1);
    q[n] = (u[n] >= 0.0) ? (scale * u[n]) * f[n - 1] : 0.0;
  }
  for (int fr = 0; fr <= n; ++fr) {
    const double* v = vel.v_row(fr);
    double* q = qy.data() + static_cast<size_t>(fr) * n;
    if (fr == 0) {
      const double* fbelow = f_star.row(0);
      for (int c = 0; c < n; ++c) q[c] = (v[c] >= 0.0) ? 0.0 : (scale * v[c]) * fbelow[c];
    } else if (fr == n) {
      const double* fabove = f_star.row(n - 1);
      for (int c = 0; c < n; ++c) q[c] = (v[c] >= 0.0) ? (scale * v[c]) * fabove[c] : 0.0;
    } else {
      k.upwind_flux(q, scale, v, f_star.row(fr - 1), f_star.row(fr), n);
    }
  }

  AdvectResult out;
  out.f_star = Field2D(n);
  for (int r = 0; r < n; ++r) {
    const double* qxr = qx.data() + static_cast<size_t>(r) * (n + 1);
    const double* qyl = qy.data() + static_cast<size_t>(r) * n;
    const double* qyr = qy.data() + static_cast<size_t>(r + 1) * n;
    k.flux_update(out.f_star.row(r), f_star.row(r), qxr, qxr + 1, qyl, qyr, n);
  }

  // Outward boundary fluxes, accumulated in a fixed order.
  double outflow = 0.0;
  for (int r = 0; r < n; ++r) outflow += -qx[static_cast<size_t>(r) * (n + 1)];
  for (int r = 0; r < n; ++r) outflow += qx[static_cast<size_t>(r) * (n + 1) + n];
  for (int c = 0; c < n; ++c) outflow += -qy[c];
  for (int c = 0; c < n; ++c) outflow += qy[static_cast<size_t>(n) * n + c];
  out.outflow_volume = outflow * params.cell_area() * params.h_ref;
  return out;
}

RedistributeResult redistribute_overfill(Field2D& f_star, double h, const SimParams& params) {
  const int n = f_star.n();
  const double scale = params.h_ref / h;      // f = f* * scale
  const double cap = h / params.h_ref;        // f* value at f = 1
  const double limit = 1.0 + 1e-9;
  const int max_sweeps = 10 * params.grid_n;
  const kernels::Kernels& k = active_kernels();

  RedistributeResult result;
  double outflow_fstar = 0.0;
  Field2D snap(0);
  while (true) {
    const double max_f = k.max_abs(f_star.data(), static_cast<int>(f_star.size())) * scale;
    if (max_f <= limit) {
      result.outflow_volume = outflow_fstar * params.cell_area() * params.h_ref;
      return result;
    }
    if (result.sweeps >= max_sweeps)
      throw std::runtime_error("redistribute_overfill: sweep budget exhausted");
    ++result.sweeps;

    snap = f_star;
    // Donors are cells above the tolerance band; they offer their excess
    // over f = 1 in equal shares to face-neighbors with f < 1. A transfer
    // is capped by the receiver's headroom (split across its adjacent
    // donors) so local redistribution never pushes a receiver past f = 1.
    // Faces on the open domain boundary count as receivers with unlimited
    // headroom: excess pressed against the edge leaves as outflow.
    const double donor_cap = cap * limit;
    auto in_grid = [&](int r, int c) { return r >= 0 && r < n && c >= 0 && c < n; };
    auto is_donor = [&](int r, int c) { return snap(r, c) > donor_cap; };
    auto wants = [&](int rr, int rc) {
      return !in_grid(rr, rc) || snap(rr, rc) < cap;
    };
    auto receiver_count = [&](int r, int c) {
      int cnt = 0;
      if (wants(r - 1, c)) ++cnt;
      if (wants(r + 1, c)) ++cnt;
      if (wants(r, c - 1)) ++cnt;
      if (wants(r, c + 1)) ++cnt;
      return cnt;
    };
    auto is_local_donor = [&](int r, int c) {
      return is_donor(r, c) && receiver_count(r, c) > 0;
    };
    // Number of adjacent donors offering to (r,c); splits its headroom.
    auto donors_at = [&](int r, int c) {
      int cnt = 0;
      for (auto [dr, dc] : {std::pair{-1, 0}, {1, 0}, {0, -1}, {0, 1}}) {
        const int ar = r + dr, ac = c + dc;
        if (in_grid(ar, ac) && is_local_donor(ar, ac)) ++cnt;
      }
      return cnt;
    };
    // Amount moved from local donor (dr,dc) to receiver (rr,rc); the
    // receiver may sit outside the grid (open boundary, no headroom cap).
    auto accepted = [&](int dr, int dc, int rr, int rc) -> double {
      if (!in_grid(dr, dc)) return 0.0;
      if (!is_local_donor(dr, dc) || !wants(rr, rc)) return 0.0;
      const double offer = (snap(dr, dc) - cap) / receiver_count(dr, dc);
      if (!in_grid(rr, rc)) return offer;
      const double headroom = (cap - snap(rr, rc)) / donors_at(rr, rc);
      return (offer < headroom) ? offer : headroom;
    };

    // Donors whose neighbors are all full (saturated pockets behind merge
    // seams) cannot drain locally: the lubrication pressure would push that
    // volume to the liquid front instantaneously, so their excess is
    // deposited into front-cell headroom (cells below f = 1 that touch a
    // full cell), proportionally to the available headroom.
    Field2D landlocked(n);
    Field2D front_headroom(n);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) {
        if (is_donor(r, c) && receiver_count(r, c) == 0)
          landlocked(r, c) = snap(r, c) - cap;
        if (in_grid(r, c) && snap(r, c) < cap) {
          const bool near_full =
              (r > 0 && !(snap(r - 1, c) < cap)) || (r + 1 < n && !(snap(r + 1, c) < cap)) ||
              (c > 0 && !(snap(r, c - 1) < cap)) || (c + 1 < n && !(snap(r, c + 1) < cap));
          if (near_full) front_headroom(r, c) = cap - snap(r, c);
        }
      }
    const kernels::OrbitList all = kernels::build_orbits_in_box(n, GridBox{0, n, 0, n});
    const double trapped = k.sum_orbits(landlocked.data(), all);
    double deposit_scale = 0.0;
    if (trapped > 0.0) {
      const double pool = k.sum_orbits(front_headroom.data(), all);
      if (pool <= 0.0 || trapped > pool)
        throw std::runtime_error(
            "redistribute_overfill: landlocked excess exceeds the front headroom (domain full)");
      deposit_scale = trapped / pool;
    }

    bool moved = trapped > 0.0;
    for (int r = 0; r < n; ++r) {
      for (int c = 0; c < n; ++c) {
        const double out_ns = accepted(r, c, r - 1, c) + accepted(r, c, r + 1, c);
        const double out_we = accepted(r, c, r, c - 1) + accepted(r, c, r, c + 1);
        const double in_ns = accepted(r - 1, c, r, c) + accepted(r + 1, c, r, c);
        const double in_we = accepted(r, c - 1, r, c) + accepted(r, c + 1, r, c);
        double delta = (in_ns + in_we) - (out_ns + out_we);
        delta += deposit_scale * front_headroom(r, c) - landlocked(r, c);
        if (delta != 0.0) {
          f_star(r, c) = snap(r, c) + delta;
          moved = true;
        }
      }
    }
    // Boundary venting, accumulated in a fixed scan order.
    for (int r = 0; r < n; ++r) {
      outflow_fstar += accepted(r, 0, r, -1);
      outflow_fstar += accepted(r, n - 1, r, n);
    }
    for (int c = 0; c < n; ++c) {
      outflow_fstar += accepted(0, c, -1, c);
      outflow_fstar += accepted(n - 1, c, n, c);
    }
    if (!moved)
      throw std::runtime_error(
          "redistribute_overfill: overfilled cells cannot drain (domain full)");
  }
}

RedistributeResult apply_gap_change_and_redistribute(SimState& state, double gap_rate,
                                                     double dt, const SimParams& params) {
  const double h_new = state.h + gap_rate * dt;
  if (!(h_new >= 0.5 * params.term_h_min))
    throw std::runtime_error("apply_gap_change: step would shrink the gap below term_h_min/2");
  state.h = h_new;
  state.t += dt;
  RedistributeResult r = redistribute_overfill(state.f_star, state.h, params);
  state.outflow_volume += r.outflow_volume;
  return r;
}

}  // namespace sqflow
