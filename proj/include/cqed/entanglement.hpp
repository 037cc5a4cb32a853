#pragma once

#include <array>
#include <optional>

#include "cqed/hilbert.hpp"
#include "cqed/trajectory.hpp"

namespace cqed {

inline constexpr double kSupportTolerance = 1e-10;
inline constexpr double kDiscardedWeightFlag = 1e-3;

/// A pair of subsystems projected onto two-dimensional supports.
struct EffectiveQubitReduction {
  Eigen::Matrix4cd two_qubit_state;           // renormalised
  std::array<Matrix, 2> support_bases;        // d_k x 2, orthonormal columns
  double discarded_weight = 0.0;
  bool support_deficient = false;  // a party has rank < 2: the pair is a product
  bool flagged = false;            // discarded_weight >= kDiscardedWeightFlag
};

/// Projects each party of a two-subsystem state onto the top-2 eigenvectors of
/// its single-party reduction (qubits are kept whole) and renormalises.
EffectiveQubitReduction effective_two_qubit(const DensityMatrix& rho_pair,
                                            double tol = kSupportTolerance);

/// Builds the reduction from an already projected (unnormalised) 4x4 block.
/// `pair_trace` is the trace of the state before projection.
EffectiveQubitReduction finish_two_qubit(const Eigen::Matrix4cd& projected, double pair_trace,
                                         std::array<Matrix, 2> bases, bool support_deficient);

/// Top-2 eigenvectors of a single-party state, best first. Sets `deficient`
/// when the second eigenvalue is below `tol`.
Matrix top_two_support(const Matrix& single_party, double tol, bool& deficient);

/// Wootters concurrence max(0, l1 - l2 - l3 - l4), with l_i the singular values
/// of sqrt(rho) (sy (x) sy) sqrt(rho)^*, i.e. the square roots of the spectrum
/// of rho (sy (x) sy) rho^* (sy (x) sy).
double wootters_concurrence(const Eigen::Matrix4cd& rho);
double wootters_concurrence(const DensityMatrix& rho);

/// Concurrence of a two-subsystem state through the effective-qubit reduction.
double pair_concurrence(const EffectiveQubitReduction& reduction);

struct PairwiseConcurrences {
  double atom_field1 = 0.0;
  double atom_field2 = 0.0;
  double field1_field2 = 0.0;
  double discarded_weight = 0.0;
  bool flagged = false;
};

PairwiseConcurrences pairwise_concurrences(const DensityMatrix& rho);

/// 4 det(rho_atom).
double atom_tangle(const Matrix& rho_atom);

/// tau_A - C_AF1^2 - C_AF2^2 for globally pure states (Tr rho^2 > 1 - 1e-6);
/// nullopt marks a mixed state, for which the relation does not apply.
std::optional<double> monogamy_residual(const DensityMatrix& rho);

/// Concurrences, purity and flags of a full (atom, field1, field2) state.
Observables observe(const DensityMatrix& rho);

std::string flag_string(double discarded_weight);

}  // namespace cqed
