#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cqed/branch.hpp"
#include "cqed/hilbert.hpp"
#include "cqed/scenario.hpp"

namespace cqed {

/// Derived quantities recorded at each sample time.
struct Observables {
  double c_af1 = 0.0;
  double c_af2 = 0.0;
  double c_f1f2 = 0.0;
  double discarded_weight = 0.0;  // largest discarded weight of the three reductions
  double purity = 1.0;
  std::string flags;  // empty when nothing is flagged; ';'-separated otherwise
};

struct TrajectoryPoint {
  double t = 0.0;
  StageKind stage = StageKind::kCavity1;
  std::optional<DensityMatrix> state;   // dense and oracle backends
  std::optional<BranchState> branches;  // branch backend
  Observables observables;
};

struct Trajectory {
  SubsystemLayout layout;
  std::vector<TrajectoryPoint> points;

  /// Dense state at point i, densifying a branch snapshot when necessary.
  DensityMatrix density(std::size_t i) const;
};

struct RunOptions {
  bool keep_states = true;
  bool compute_observables = true;
  /// Check applied to every dense snapshot.
  Check check = Check::kBasic;
};

/// 0, dt, 2dt, ... up to t_end, with t_end always included.
std::vector<double> uniform_grid(double t_end, double dt);

}  // namespace cqed
