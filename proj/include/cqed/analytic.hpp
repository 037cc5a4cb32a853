#pragma once

#include <span>
#include <vector>

#include "cqed/hilbert.hpp"
#include "cqed/scenario.hpp"

namespace cqed {

// Closed-form state of the system while the atom is inside the first cavity
// (t0 = 0). Labels follow scenario.frame: the lab frame keeps the cavity
// rotation e^{-i omega_tilde t}, the rotating frame drops it.

struct BranchLabels {
  cd excited;  // field-1 label correlated with |e>: alpha e^{-i(w~ + w)t - gamma t}
  cd ground;   // field-1 label correlated with |g>: alpha e^{-i(w~ - w)t - gamma t}
  cd field2;   // beta e^{-i w~2 t - gamma2 t}
};

BranchLabels branch_amplitudes(double t, const Scenario& scenario);

/// f_x(t) = gamma/(gamma + i w)(1 - e^{-2(gamma + i w)t}) - (1 - e^{-2 gamma t}).
cd coherence_exponent(double t, double gamma, double omega);

/// Coefficient of |e, alpha_e><g, alpha_g| (times 1/2) in the stage-1 state:
/// x(t) = exp[i phi/2 + |alpha|^2 f_x(t) - i w t], with an extra e^{-i w_a t}
/// in the lab frame.
cd coherence_factor(double t, const Scenario& scenario);

/// |x(t)| sqrt(1 - |<alpha_g|alpha_e>|^2), using the exact coherent overlap.
double concurrence_stage1(double t, const Scenario& scenario);

/// Dense stage-1 state at the scenario's truncation.
DensityMatrix rho_stage1(double t, const Scenario& scenario);

struct Stage1Snapshot {
  double t = 0.0;
  cd alpha_e;
  cd alpha_g;
  cd beta_1;
  cd x;
  double concurrence = 0.0;
};

Stage1Snapshot stage1_snapshot(double t, const Scenario& scenario);

/// Field-1 labels in the frame rotating at the cavity frequency, plus their
/// phase-space separation |alpha_e - alpha_g|.
struct PhaseSpacePoint {
  double t = 0.0;
  cd alpha_e;
  cd alpha_g;
  double chord = 0.0;
};

std::vector<PhaseSpacePoint> phase_space_trajectory(const Scenario& scenario,
                                                    std::span<const double> times);

}  // namespace cqed
