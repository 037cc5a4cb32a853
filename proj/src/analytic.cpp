#include "cqed/analytic.hpp"

#include <cmath>

#include "cqed/errors.hpp"

namespace cqed {

namespace {

void require_nonnegative(double t) {
  if (!(t >= 0.0)) throw Error("analytic: negative time");
}

}  // namespace

BranchLabels branch_amplitudes(double t, const Scenario& s) {
  require_nonnegative(t);
  const auto& f1 = s.field(1);
  const auto& f2 = s.field(2);
  const bool lab = s.frame == Frame::kLab;
  const double w1 = lab ? f1.cavity_frequency : 0.0;
  const double w2 = lab ? f2.cavity_frequency : 0.0;
  const double d = f1.dispersive_frequency;
  BranchLabels out;
  out.excited = f1.amplitude * std::exp(cd(-f1.decay_rate * t, -(w1 + d) * t));
  out.ground = f1.amplitude * std::exp(cd(-f1.decay_rate * t, -(w1 - d) * t));
  out.field2 = f2.amplitude * std::exp(cd(-f2.decay_rate * t, -w2 * t));
  return out;
}

cd coherence_exponent(double t, double gamma, double omega) {
  const cd c(gamma, omega);
  const cd x = 2.0 * c * t;
  cd first;
  if (std::abs(x) < 1e-6) {
    // gamma/c (1 - e^{-x}) with x = 2ct, expanded to third order in x.
    first = gamma * 2.0 * t * (1.0 - x / 2.0 + x * x / 6.0);
  } else {
    first = gamma / c * (1.0 - std::exp(-x));
  }
  return first + std::expm1(-2.0 * gamma * t);
}

cd coherence_factor(double t, const Scenario& s) {
  require_nonnegative(t);
  const auto& f1 = s.field(1);
  const cd fx = coherence_exponent(t, f1.decay_rate, f1.dispersive_frequency);
  double phase = 0.5 * s.atomic_phase - f1.dispersive_frequency * t;
  if (s.frame == Frame::kLab) phase -= s.atom_frequency * t;
  return std::exp(std::norm(f1.amplitude) * fx + cd(0.0, phase));
}

double concurrence_stage1(double t, const Scenario& s) {
  const auto labels = branch_amplitudes(t, s);
  const double overlap = std::norm(coherent_overlap(labels.ground, labels.excited));
  return std::abs(coherence_factor(t, s)) * std::sqrt(std::max(0.0, 1.0 - overlap));
}

DensityMatrix rho_stage1(double t, const Scenario& s) {
  const auto labels = branch_amplitudes(t, s);
  const cd x = coherence_factor(t, s);
  const std::size_t n1 = s.truncation(1);
  const std::size_t n2 = s.truncation(2);
  const Vector ce = coherent_state(labels.excited, n1, s.tail_tolerance).amplitudes();
  const Vector cg = coherent_state(labels.ground, n1, s.tail_tolerance).amplitudes();
  const Vector b = coherent_state(labels.field2, n2, s.tail_tolerance).amplitudes();

  Vector ket_e = Vector::Zero(2);
  ket_e(0) = 1.0;
  Vector ket_g = Vector::Zero(2);
  ket_g(1) = 1.0;
  const Vector ue = kron(ket_e, ce);
  const Vector ug = kron(ket_g, cg);
  const Matrix atom_field = 0.5 * (ue * ue.adjoint() + x * ue * ug.adjoint() +
                                   std::conj(x) * ug * ue.adjoint() + ug * ug.adjoint());
  Matrix rho = kron(atom_field, b * b.adjoint());
  return DensityMatrix(s.layout(), std::move(rho), Check::kBasic);
}

Stage1Snapshot stage1_snapshot(double t, const Scenario& s) {
  const auto labels = branch_amplitudes(t, s);
  Stage1Snapshot out;
  out.t = t;
  out.alpha_e = labels.excited;
  out.alpha_g = labels.ground;
  out.beta_1 = labels.field2;
  out.x = coherence_factor(t, s);
  out.concurrence = concurrence_stage1(t, s);
  return out;
}

std::vector<PhaseSpacePoint> phase_space_trajectory(const Scenario& scenario,
                                                    std::span<const double> times) {
  Scenario rotating = scenario;
  rotating.frame = Frame::kRotating;
  std::vector<PhaseSpacePoint> out;
  out.reserve(times.size());
  for (double t : times) {
    const auto labels = branch_amplitudes(t, rotating);
    out.push_back({t, labels.excited, labels.ground, std::abs(labels.excited - labels.ground)});
  }
  return out;
}

}  // namespace cqed
