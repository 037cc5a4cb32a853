#pragma once

#include <array>
#include <span>
#include <vector>

#include "cqed/hilbert.hpp"
#include "cqed/scenario.hpp"

namespace cqed {

struct Trajectory;
struct RunOptions;
struct Observables;

/// weight |s><s'| (x) |ket[0]><bra[0]| (x) |ket[1]><bra[1]| with coherent labels.
struct Branch {
  cd weight;
  std::array<cd, 2> ket;
  std::array<cd, 2> bra;
};

/// Exact sparse state: per atomic dyad (s, s'), a list of coherent-state
/// dyad products. Dyad index is 2 s + s' with s = 0 for |e>, 1 for |g>.
class BranchState {
 public:
  std::array<std::vector<Branch>, 4> dyads;

  static constexpr std::size_t dyad_index(int s, int s_prime) {
    return static_cast<std::size_t>(2 * s + s_prime);
  }

  /// Initial state of the scenario: atomic superposition (x) |alpha> (x) |beta>.
  static BranchState initial(const Scenario& scenario);

  /// Recognises atom (x) coherent (x) coherent product states; throws
  /// UnsupportedInitialState otherwise.
  static BranchState from_product_state(const PureState& psi, double tol = 1e-8);

  std::size_t branch_count() const;
  std::size_t max_branches_per_dyad() const;

  cd trace() const;
  /// Exact Tr(rho^2) from coherent overlaps.
  double purity() const;

  /// Dense matrix on the given (atom, field1, field2) layout.
  DensityMatrix densify(const SubsystemLayout& layout) const;

  /// Reduced state on the kept subsystems (0 = atom, 1 = field1, 2 = field2);
  /// traced fields contribute exact coherent overlaps.
  Matrix reduce(const SubsystemLayout& layout, std::span<const std::size_t> keep) const;

  // Stage pieces; `field` is 1 or 2.
  void apply_dissipation(int field, double gamma, double omega, double tau);
  void apply_dispersive(int field, double phase);
  void apply_atom_unitary(const Eigen::Matrix2cd& u);
  void apply_free_phases(double atom_phase, double field1_phase, double field2_phase);
};

BranchState branch_stage_step(const BranchState& state, StageKind stage, double tau,
                              const Scenario& scenario);

/// Pairwise concurrences, purity and discarded weight computed from the
/// branch representation without densifying the full state.
Observables observe_branches(const BranchState& state, const SubsystemLayout& layout);

Trajectory branch_run(const Scenario& scenario, std::span<const double> sample_times,
                      const RunOptions& options);
Trajectory branch_run(const Scenario& scenario, std::span<const double> sample_times);
Trajectory branch_run(const PureState& initial, const Scenario& scenario,
                      std::span<const double> sample_times, const RunOptions& options);

}  // namespace cqed
