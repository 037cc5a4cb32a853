#pragma once

#include <span>
#include <string>
#include <vector>

#include "cqed/hilbert.hpp"
#include "cqed/scenario.hpp"
#include "cqed/trajectory.hpp"

namespace cqed {

/// exp(-i tau H) for H = omega((n+1)|e><e| - n|g><g|) on atom (x) Fock(truncation).
/// Diagonal: e^{-i omega tau (n+1)} on |e,n>, e^{+i omega tau n} on |g,n>.
Matrix dispersive_unitary(double omega, double tau, std::size_t truncation);

/// exp(-i theta sigma_x) in the (e, g) basis.
Eigen::Matrix2cd ramsey_unitary(double theta);

/// The Ramsey rotation used by the stage maps. In the lab frame the classical
/// field stays in phase with the atom, so the rotation is conjugated by the free
/// atomic phase accumulated up to the start of the Ramsey stage.
Eigen::Matrix2cd stage_ramsey_unitary(double theta, const Scenario& scenario);

/// Coefficient of the jump superoperator a . a^dagger on an atomic dyad block
/// whose (sigma_z . - . sigma_z) eigenvalue is `lambda` (0, +2 or -2):
///   F = 2 gamma (1 - e^{-(2 gamma + i omega lambda) tau}) / (2 gamma + i omega lambda).
/// Small arguments use a series expansion, so gamma -> 0 gives F -> 0.
cd dissipation_coefficient(double gamma, double omega, int lambda, double tau);

/// Factorised dissipative part of a stage: for each field, the jump factor
/// exp(F a . a^dagger) followed by the damping factor exp(-gamma tau (n . + . n)).
DensityMatrix dissipative_map(const DensityMatrix& rho, StageKind stage, double tau,
                              const Scenario& scenario);

/// Evolves a stage-start state by tau within `stage`: dissipative map, then the
/// stage unitary (dispersive, Ramsey or identity), then free phases in the lab frame.
DensityMatrix stage_step(const DensityMatrix& rho, StageKind stage, double tau,
                         const Scenario& scenario);

/// (|e> + e^{-i phi/2}|g>)/sqrt2 (x) |alpha> (x) |beta>, truncated per scenario.
PureState initial_pure_state(const Scenario& scenario);
DensityMatrix initial_state(const Scenario& scenario);

/// Dense evolution through all five stages, sampled at `sample_times`
/// (sorted, within [0, t5]).
Trajectory run_scenario(const Scenario& scenario, std::span<const double> sample_times,
                        const RunOptions& options = {});
Trajectory run_scenario(const DensityMatrix& initial, const Scenario& scenario,
                        std::span<const double> sample_times, const RunOptions& options = {});

struct ValidityReport {
  /// |Delta_i| / (Omega_i sqrt(|amplitude_i|^2 + 1)); infinity when Omega_i = 0,
  /// empty when Omega_i or Delta_i is not specified.
  std::array<std::optional<double>, 2> ratio;
  std::vector<std::string> warnings;
};

ValidityReport dispersive_validity(const Scenario& scenario, double threshold = 2.0);

}  // namespace cqed
