#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sqflow/core_grid.hpp"
#include "sqflow/params.hpp"
#include "sqflow/pattern.hpp"
#include "sqflow/pressure_solver.hpp"

namespace sqflow {

/// One dataset example: spread time, film thickness and the imprint image,
/// with the generating pattern for bookkeeping.
struct Snapshot {
  double t = 0.0;  // s
  double h = 0.0;  // m
  ImprintImage imprint;
  DropPattern dp;
};

enum class TerminationReason { coverage, time, thickness, stalled };

struct TerminationStatus {
  TerminationReason reason = TerminationReason::time;
  double final_t = 0.0;
  double final_h = 0.0;
};

const char* to_string(TerminationReason r);

/// Snapshots are recorded whenever h first crosses h0 * ratio^k, plus the
/// initial state. The initial snapshot's recorded time is floored at
/// `min_record_t` so that log-normalization stays finite.
struct SnapshotSchedule {
  double ratio = 0.90;
  double min_record_t = 1e-12;  // s
};

/// Per-step diagnostics of a run, used by conservation/monotonicity checks.
struct RunAudit {
  int steps = 0;
  long total_cg_iterations = 0;
  double max_step_balance_rel = 0.0;    // f* balance drift per step
  double max_volume_error_rel = 0.0;    // bookkeeping vs initial volume
  double max_gap_rate_increase = 0.0;   // max |hdot_k+1| / |hdot_k|
  std::vector<double> step_t;           // t after each step
  std::vector<double> step_h;           // h after each step
  std::vector<double> step_gap_rate;    // hdot used in each step
};

/// Stepper holds scratch state between steps (warm-started elliptic solve).
class Stepper {
 public:
  explicit Stepper(const SimParams& params) : params_(params) {}

  struct StepInfo {
    double dt = 0.0;
    double gap_rate = 0.0;
    double outflow_volume = 0.0;  // m^3 this step
    int cg_iterations = 0;
    double balance_rel = 0.0;     // |d(sum f*) + outflow| / sum f*
  };

  /// One full cycle: classify, shape solve, force balance, velocities,
  /// timestep, advection, gap update with redistribution.
  /// Throws when the state is already terminated.
  StepInfo step(SimState& state);

  const SimParams& params() const { return params_; }

 private:
  SimParams params_;
  Field2D phi_prev_;
  bool has_prev_ = false;
};

/// Single step without history (fresh elliptic solve).
SimState step(const SimState& state, const SimParams& params);

std::optional<TerminationStatus> check_termination(const SimState& state,
                                                   const SimParams& params);

struct RunResult {
  std::vector<Snapshot> snapshots;
  TerminationStatus status;
  RunAudit audit;
};

/// Full simulation of one droplet pattern. Snapshots of states that already
/// violate the termination thresholds are not recorded, matching the
/// dataset ranges (t in [0,1s], h in [5nm, 1um], coverage < 90%).
RunResult run(const DropPattern& dp, const SimParams& params,
              const SnapshotSchedule& schedule = SnapshotSchedule{});

/// Closed-form gap evolution for a single centered droplet:
/// h(t) = h0 / sqrt(1 + K h0^2 t), K = 4 pi sigma cos_sum / (3 mu V).
double analytic_single_droplet_h(double t, const SimParams& params);

/// Inverse of the above: time at which h(t) = h.
double analytic_time_to_thickness(double h, const SimParams& params);

}  // namespace sqflow
