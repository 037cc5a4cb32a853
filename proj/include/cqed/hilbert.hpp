#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace cqed {

using cd = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr double kDefaultTailTolerance = 1e-10;

/// Ordered tensor-factor description of a composite Hilbert space. Index
/// ordering is Kronecker with the first subsystem slowest. A subsystem
/// labelled "atom" must have dimension 2.
class SubsystemLayout {
 public:
  SubsystemLayout() = default;
  SubsystemLayout(std::vector<std::size_t> dims, std::vector<std::string> labels);

  /// (atom, field1, field2) with Fock truncations n1, n2 (dimensions n+1).
  static SubsystemLayout atom_fields(std::size_t n1, std::size_t n2);
  static SubsystemLayout single(std::size_t dim, std::string label);

  std::size_t size() const { return dims_.size(); }
  std::size_t dim(std::size_t k) const { return dims_.at(k); }
  std::size_t total_dim() const { return total_; }
  const std::vector<std::size_t>& dims() const { return dims_; }
  const std::vector<std::string>& labels() const { return labels_; }
  /// Distance in the flat index between neighbouring levels of subsystem k.
  std::size_t stride(std::size_t k) const;
  std::size_t index_of(const std::string& label) const;

  SubsystemLayout subset(std::span<const std::size_t> keep) const;
  SubsystemLayout concat(const SubsystemLayout& other) const;

  bool operator==(const SubsystemLayout&) const = default;

 private:
  std::vector<std::size_t> dims_;
  std::vector<std::string> labels_;
  std::size_t total_ = 1;
};

struct PhysicalTolerance {
  double hermiticity = 1e-12;
  double trace = 1e-10;
  double positivity = -1e-9;
};

enum class Check {
  kNone,   // trusted internal construction
  kBasic,  // Hermiticity, trace, non-negative diagonal
  kFull,   // kBasic plus minimum eigenvalue
};

class PureState {
 public:
  PureState(SubsystemLayout layout, Vector amplitudes);

  const SubsystemLayout& layout() const { return layout_; }
  const Vector& amplitudes() const { return amplitudes_; }
  std::size_t dim() const { return static_cast<std::size_t>(amplitudes_.size()); }

 private:
  SubsystemLayout layout_;
  Vector amplitudes_;
};

class DensityMatrix {
 public:
  DensityMatrix(SubsystemLayout layout, Matrix entries, Check check = Check::kBasic,
                const PhysicalTolerance& tol = {});
  explicit DensityMatrix(const PureState& psi);

  const SubsystemLayout& layout() const { return layout_; }
  const Matrix& matrix() const { return entries_; }
  std::size_t dim() const { return static_cast<std::size_t>(entries_.rows()); }

  cd trace() const { return entries_.trace(); }
  double purity() const;
  double min_eigenvalue() const;

  /// Throws NonPhysicalState when an invariant is violated beyond tolerance.
  void check(Check level, const PhysicalTolerance& tol = {}) const;

 private:
  SubsystemLayout layout_;
  Matrix entries_;
};

/// Unnormalised Fock coefficients e^{-|a|^2/2} a^n / sqrt(n!), n = 0..truncation.
Vector coherent_coefficients(cd amplitude, std::size_t truncation);

/// Probability mass of the coherent state above the truncation.
double coherent_tail_mass(cd amplitude, std::size_t truncation);

/// Truncated, renormalised coherent state. Throws TruncationTooSmall when the
/// discarded tail exceeds `tail_tolerance`.
PureState coherent_state(cd amplitude, std::size_t truncation,
                         double tail_tolerance = kDefaultTailTolerance);

/// Exact overlap <a|b> of untruncated coherent states.
cd coherent_overlap(cd a, cd b);

/// ceil(|a|^2 + 8|a| + 6).
std::size_t default_truncation(cd amplitude);

/// Smallest truncation whose coherent tail mass is at most `tail`.
std::size_t truncation_for_tail(cd amplitude, double tail);

PureState fock_state(std::size_t n, std::size_t truncation);
PureState atom_excited();
PureState atom_ground();

Matrix kron(const Matrix& a, const Matrix& b);
PureState tensor_product(std::span<const PureState> factors);
DensityMatrix tensor_product(std::span<const DensityMatrix> factors);
Matrix tensor_product(std::span<const Matrix> factors);

/// Reduced state on the subsystems listed in `keep` (layout order is kept).
DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const std::size_t> keep);

/// Raw-matrix partial trace used internally and by the integrator.
Matrix partial_trace_matrix(const Matrix& rho, const SubsystemLayout& layout,
                            std::span<const std::size_t> keep);

double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma);
double trace_distance(const Matrix& rho, const Matrix& sigma);

/// Cheap two-sided bounds on the trace distance for large matrices. The
/// difference is compressed onto a `probes`-dimensional randomised range
/// (fixed seed, so the result is deterministic); the compressed part gives the
/// lower bound and sqrt(dim) times the Frobenius norm of the remainder is
/// added for the upper bound.
struct TraceDistanceBounds {
  double lower = 0.0;
  double upper = 0.0;
};
TraceDistanceBounds trace_distance_bounds(const Matrix& rho, const Matrix& sigma,
                                          std::size_t probes = 48);

std::vector<double> photon_number_distribution(const DensityMatrix& rho, std::size_t field);
double mean_photon_number(const DensityMatrix& rho, std::size_t field);

}  // namespace cqed
