#pragma once

// Shared kernels for the dense backends (factorised evolution and the
// master-equation integrator). Layouts are always (atom, field1, field2).

#include <array>
#include <vector>

#include "cqed/hilbert.hpp"
#include "cqed/scenario.hpp"

namespace cqed::detail {

struct IndexMap {
  std::size_t dim = 0;
  std::array<std::size_t, 3> dims{};
  std::array<std::size_t, 3> strides{};
  std::vector<int> atom;                    // 0 = e, 1 = g
  std::array<std::vector<int>, 3> level{};  // level[k][i]: occupation of subsystem k

  explicit IndexMap(const SubsystemLayout& layout);
};

inline int sigma_z(int atomic_level) { return atomic_level == 0 ? 1 : -1; }

/// Requires the (atom, field1, field2) layout.
void require_atom_fields(const SubsystemLayout& layout);

/// In-place exp(-gamma tau (M+P)) exp(F J) on field k (1 or 2), with F chosen
/// per atomic dyad from the active dispersive frequency.
void apply_field_dissipation(Matrix& rho, const IndexMap& idx, int field, double gamma,
                             double omega, double tau);

/// rho -> (u (x) I) rho (u (x) I)^dagger for a 2x2 atomic unitary.
void apply_atom_unitary(Matrix& rho, const Eigen::Matrix2cd& u);

/// rho_rc -> p_r conj(p_c) rho_rc.
void apply_diagonal_unitary(Matrix& rho, const Vector& phases);

/// Sorted and within [0, t5]; throws ConfigError otherwise.
void check_sample_times(const Scenario& s, std::span<const double> times);

inline void hermitize(Matrix& rho) { rho = 0.5 * (rho + rho.adjoint()).eval(); }

}  // namespace cqed::detail
