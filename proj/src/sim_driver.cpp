#include "sqflow/sim_driver.hpp"

#include <cmath>
#include <stdexcept>

#include "sqflow/kernels.hpp"
#include "sqflow/vof_advection.hpp"

namespace sqflow {

const char* to_string(TerminationReason r) {
  switch (r) {
    case TerminationReason::coverage: return "coverage";
    case TerminationReason::time: return "time";
    case TerminationReason::thickness: return "thickness";
    case TerminationReason::stalled: return "stalled";
  }
  return "?";
}

std::optional<TerminationStatus> check_termination(const SimState& state,
                                                   const SimParams& params) {
  const int n = state.f_star.n();
  const double coverage =
      static_cast<double>(wet_cell_count(state.f_star, state.h, params)) / (double(n) * n);
  if (coverage > params.term_coverage_max)
    return TerminationStatus{TerminationReason::coverage, state.t, state.h};
  if (state.t > params.term_time_max)
    return TerminationStatus{TerminationReason::time, state.t, state.h};
  if (state.h < params.term_h_min)
    return TerminationStatus{TerminationReason::thickness, state.t, state.h};
  return std::nullopt;
}

Stepper::StepInfo Stepper::step(SimState& state) {
  const SimParams& p = params_;
  if (check_termination(state, p).has_value() || state.h <= p.term_h_min)
    throw std::runtime_error("step: state is terminated");

  const kernels::Kernels& k = kernels::active_kernels();
  const kernels::OrbitList all_orbits =
      kernels::build_orbits_in_box(p.grid_n, GridBox{0, p.grid_n, 0, p.grid_n});
  const double sum_before = k.sum_orbits(state.f_star.data(), all_orbits);

  WetMask mask = classify_cells(state.f_star, state.h, p);
  ShapeField phi = solve_shape(mask, p, has_prev_ ? &phi_prev_ : nullptr);
  const double gap_rate = gap_rate_from_balance(phi, mask, state.h, p);
  PressureSolution press = pressure_field(phi, mask, gap_rate, state.h, p);
  FaceVelocities vel = face_velocities(press, state.h, p);
  const double dt = stable_timestep(vel, gap_rate, state.h, p);
  if (state.t + dt == state.t) throw StalledError("step: timestep underflow");

  AdvectResult adv = advect(state.f_star, vel, dt, p);
  state.f_star = std::move(adv.f_star);
  state.outflow_volume += adv.outflow_volume;
  const RedistributeResult redist = apply_gap_change_and_redistribute(state, gap_rate, dt, p);

  phi_prev_ = std::move(phi.phi);
  has_prev_ = true;

  StepInfo info;
  info.dt = dt;
  info.gap_rate = gap_rate;
  info.outflow_volume = adv.outflow_volume + redist.outflow_volume;
  info.cg_iterations = phi.iterations;
  const double sum_after = k.sum_orbits(state.f_star.data(), all_orbits);
  const double outflow_fstar = info.outflow_volume / (p.cell_area() * p.h_ref);
  info.balance_rel =
      sum_before > 0.0 ? std::fabs(sum_after + outflow_fstar - sum_before) / sum_before : 0.0;
  return info;
}

SimState step(const SimState& state, const SimParams& params) {
  SimState copy = state;
  Stepper st(params);
  st.step(copy);
  return copy;
}

RunResult run(const DropPattern& dp, const SimParams& params, const SnapshotSchedule& schedule) {
  params.validate();
  if (!(schedule.ratio > 0.0 && schedule.ratio < 1.0))
    throw std::invalid_argument("run: snapshot ratio must lie in (0,1)");

  RunResult res;
  SimState state = init_state(dp, params);
  const double initial_volume = dp.count() * params.droplet_volume;

  auto record = [&](const SimState& s) {
    res.snapshots.push_back(Snapshot{std::max(s.t, schedule.min_record_t), s.h,
                                     binarize_imprint(s.f_star, s.h, params), dp});
  };

  Stepper stepper(params);
  record(state);  // initial state, milestone k = 0
  int milestone_k = 1;
  double next_h = params.initial_gap * std::pow(schedule.ratio, milestone_k);
  double prev_gap_rate = 0.0;

  while (true) {
    if (auto status = check_termination(state, params)) {
      res.status = *status;
      break;
    }
    if (state.h <= params.term_h_min) {
      // Exactly at the floor: stepping is refused, treat as thickness stop.
      res.status = TerminationStatus{TerminationReason::thickness, state.t, state.h};
      break;
    }

    Stepper::StepInfo info;
    try {
      info = stepper.step(state);
    } catch (const StalledError&) {
      res.status = TerminationStatus{TerminationReason::stalled, state.t, state.h};
      break;
    }

    res.audit.steps += 1;
    res.audit.total_cg_iterations += info.cg_iterations;
    res.audit.max_step_balance_rel = std::max(res.audit.max_step_balance_rel, info.balance_rel);
    const double vol_err =
        std::fabs(state.liquid_volume(params) + state.outflow_volume - initial_volume) /
        initial_volume;
    res.audit.max_volume_error_rel = std::max(res.audit.max_volume_error_rel, vol_err);
    if (res.audit.steps > 1 && std::fabs(prev_gap_rate) > 0.0)
      res.audit.max_gap_rate_increase = std::max(
          res.audit.max_gap_rate_increase, std::fabs(info.gap_rate) / std::fabs(prev_gap_rate));
    prev_gap_rate = info.gap_rate;
    res.audit.step_t.push_back(state.t);
    res.audit.step_h.push_back(state.h);
    res.audit.step_gap_rate.push_back(info.gap_rate);

    // Record crossed milestones unless the new state violates the dataset
    // ranges (it would then terminate without contributing an example).
    if (!check_termination(state, params).has_value()) {
      while (state.h <= next_h) {
        record(state);
        ++milestone_k;
        next_h = params.initial_gap * std::pow(schedule.ratio, milestone_k);
      }
    }
  }
  return res;
}

double analytic_single_droplet_h(double t, const SimParams& params) {
  if (t < 0.0) throw std::invalid_argument("analytic_single_droplet_h: t must be >= 0");
  const double kconst = 4.0 * M_PI * params.surface_tension * params.contact_angle_cos_sum /
                        (3.0 * params.viscosity * params.droplet_volume);
  const double h0 = params.initial_gap;
  return h0 / std::sqrt(1.0 + kconst * h0 * h0 * t);
}

double analytic_time_to_thickness(double h, const SimParams& params) {
  if (!(h > 0.0) || h > params.initial_gap)
    throw std::invalid_argument("analytic_time_to_thickness: h must lie in (0, h0]");
  const double kconst = 4.0 * M_PI * params.surface_tension * params.contact_angle_cos_sum /
                        (3.0 * params.viscosity * params.droplet_volume);
  const double h0 = params.initial_gap;
  const double ratio = h0 / h;
  return (ratio * ratio - 1.0) / (kconst * h0 * h0);
}

}  // namespace sqflow
