#pragma once

#include <span>

#include "cqed/hilbert.hpp"
#include "cqed/scenario.hpp"
#include "cqed/trajectory.hpp"

namespace cqed {

/// Classical RK4 with step-doubling error control: a step of size h is
/// accepted when it agrees with two h/2 steps to `tolerance` (max-abs entry).
struct IntegratorConfig {
  double initial_step = 0.05;  // us
  double tolerance = 1e-11;
  double max_step = 1.0;  // us
  double min_step = 1e-9;  // us; below this the run aborts with StepUnderflow
  double max_trace_drift = 1e-8;  // per accepted step, before renormalisation
  /// Fixed-step mode: every step is max_step (clipped to stage and sample
  /// boundaries), no error control.
  bool fixed_step = false;
};

/// Master-equation right-hand side in the rotating frame:
///   -i[H_stage, rho] + sum_i gamma_i (2 a_i rho a_i^dag - rho a_i^dag a_i - a_i^dag a_i rho).
Matrix liouvillian_apply(const Matrix& rho, const SubsystemLayout& layout, StageKind stage,
                         const Scenario& scenario);
Matrix liouvillian_apply(const DensityMatrix& rho, StageKind stage, const Scenario& scenario);

struct IntegrationStats {
  std::size_t accepted_steps = 0;
  std::size_t rejected_steps = 0;
  double max_trace_drift = 0.0;
};

/// Integrates the master equation through the scenario's five stages and
/// samples the state at `grid` (sorted, within [0, t5]). Rotating frame only.
Trajectory integrate(const DensityMatrix& rho0, const Scenario& scenario,
                     std::span<const double> grid, const IntegratorConfig& config = {},
                     const RunOptions& options = {}, IntegrationStats* stats = nullptr);

}  // namespace cqed
