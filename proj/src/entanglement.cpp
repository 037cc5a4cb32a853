#include "cqed/entanglement.hpp"

#include <algorithm>
#include <cmath>

#include "cqed/errors.hpp"

namespace cqed {

Matrix top_two_support(const Matrix& single_party, double tol, bool& deficient) {
  const Eigen::Index d = single_party.rows();
  if (d == 2) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(single_party, Eigen::EigenvaluesOnly);
    deficient = es.eigenvalues()(0) < tol;
    return Matrix::Identity(2, 2);
  }
  if (d < 2) throw Error("effective_two_qubit: subsystem dimension below 2");
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (single_party + single_party.adjoint()));
  deficient = es.eigenvalues()(d - 2) < tol;
  Matrix basis(d, 2);
  basis.col(0) = es.eigenvectors().col(d - 1);
  basis.col(1) = es.eigenvectors().col(d - 2);
  return basis;
}

EffectiveQubitReduction finish_two_qubit(const Eigen::Matrix4cd& projected, double pair_trace,
                                         std::array<Matrix, 2> bases, bool support_deficient) {
  EffectiveQubitReduction out;
  const double kept = projected.trace().real();
  out.discarded_weight = std::max(0.0, pair_trace - kept) / pair_trace;
  out.two_qubit_state = projected / kept;
  out.two_qubit_state = 0.5 * (out.two_qubit_state + out.two_qubit_state.adjoint()).eval();
  out.support_bases = std::move(bases);
  out.support_deficient = support_deficient;
  out.flagged = out.discarded_weight >= kDiscardedWeightFlag;
  return out;
}

EffectiveQubitReduction effective_two_qubit(const DensityMatrix& rho_pair, double tol) {
  const auto& layout = rho_pair.layout();
  if (layout.size() != 2) throw Error("effective_two_qubit: expected a two-subsystem state");
  std::array<Matrix, 2> bases;
  bool deficient = false;
  for (std::size_t k = 0; k < 2; ++k) {
    const std::size_t keep[] = {k};
    bool d = false;
    bases[k] = top_two_support(partial_trace_matrix(rho_pair.matrix(), layout, keep), tol, d);
    deficient = deficient || d;
  }
  const Matrix v = kron(bases[0], bases[1]);
  const Eigen::Matrix4cd projected = v.adjoint() * rho_pair.matrix() * v;
  return finish_two_qubit(projected, rho_pair.trace().real(), std::move(bases), deficient);
}

double wootters_concurrence(const Eigen::Matrix4cd& rho) {
  const Eigen::Matrix4cd h = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(h);
  const Eigen::Vector4d roots = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const Eigen::Matrix4cd sqrt_rho =
      es.eigenvectors() * roots.cast<cd>().asDiagonal() * es.eigenvectors().adjoint();
  Eigen::Matrix4cd flip = Eigen::Matrix4cd::Zero();
  flip(0, 3) = -1.0;
  flip(1, 2) = 1.0;
  flip(2, 1) = 1.0;
  flip(3, 0) = -1.0;
  const Eigen::Matrix4cd x = sqrt_rho * flip * sqrt_rho.conjugate();
  Eigen::JacobiSVD<Eigen::Matrix4cd> svd(x);
  const Eigen::Vector4d s = svd.singularValues();  // descending
  return std::max(0.0, s(0) - s(1) - s(2) - s(3));
}

double wootters_concurrence(const DensityMatrix& rho) {
  if (rho.dim() != 4) throw Error("wootters_concurrence: expected a 4x4 state");
  return wootters_concurrence(Eigen::Matrix4cd(rho.matrix()));
}

double pair_concurrence(const EffectiveQubitReduction& reduction) {
  if (reduction.support_deficient) return 0.0;
  return wootters_concurrence(reduction.two_qubit_state);
}

PairwiseConcurrences pairwise_concurrences(const DensityMatrix& rho) {
  if (rho.layout().size() != 3) throw Error("pairwise_concurrences: expected atom, field1, field2");
  PairwiseConcurrences out;
  const std::array<std::array<std::size_t, 2>, 3> pairs = {{{0, 1}, {0, 2}, {1, 2}}};
  std::array<double, 3> c{};
  for (std::size_t p = 0; p < 3; ++p) {
    const auto red = effective_two_qubit(partial_trace(rho, pairs[p]));
    c[p] = pair_concurrence(red);
    out.discarded_weight = std::max(out.discarded_weight, red.discarded_weight);
    out.flagged = out.flagged || red.flagged;
  }
  out.atom_field1 = c[0];
  out.atom_field2 = c[1];
  out.field1_field2 = c[2];
  return out;
}

double atom_tangle(const Matrix& rho_atom) {
  return 4.0 * (rho_atom(0, 0) * rho_atom(1, 1) - rho_atom(0, 1) * rho_atom(1, 0)).real();
}

std::optional<double> monogamy_residual(const DensityMatrix& rho) {
  if (rho.purity() < 1.0 - 1e-6) return std::nullopt;
  const std::size_t keep[] = {0};
  const double tangle = atom_tangle(partial_trace_matrix(rho.matrix(), rho.layout(), keep));
  const auto c = pairwise_concurrences(rho);
  return tangle - c.atom_field1 * c.atom_field1 - c.atom_field2 * c.atom_field2;
}

std::string flag_string(double discarded_weight) {
  return discarded_weight >= kDiscardedWeightFlag ? "discarded_weight" : "";
}

Observables observe(const DensityMatrix& rho) {
  const auto c = pairwise_concurrences(rho);
  Observables obs;
  obs.c_af1 = c.atom_field1;
  obs.c_af2 = c.atom_field2;
  obs.c_f1f2 = c.field1_field2;
  obs.discarded_weight = c.discarded_weight;
  obs.purity = rho.purity();
  obs.flags = flag_string(c.discarded_weight);
  return obs;
}

}  // namespace cqed
