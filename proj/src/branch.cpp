#include "cqed/branch.hpp"

#include <algorithm>
#include <cmath>

#include "cqed/entanglement.hpp"
#include "cqed/errors.hpp"
#include "cqed/evolution.hpp"
#include "cqed/trajectory.hpp"
#include "detail.hpp"

namespace cqed {

namespace {

constexpr int level_e = 0;

cd rotation(double angle) { return std::polar(1.0, angle); }

Vector atom_basis(int s) {
  Vector v = Vector::Zero(2);
  v(s) = 1.0;
  return v;
}

// Separates v (viewed as rows x cols, row-major in the flat index) into
// left (x) right; returns false when v is not a product within tol.
bool split_product(const Vector& v, Eigen::Index rows, Eigen::Index cols, Vector& left,
                   Vector& right, double tol) {
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) m.row(r) = v.segment(r * cols, cols).transpose();
  Eigen::Index best = 0;
  m.rowwise().norm().maxCoeff(&best);
  right = m.row(best).transpose();
  const double rn = right.squaredNorm();
  if (rn == 0.0) return false;
  left.resize(rows);
  for (Eigen::Index r = 0; r < rows; ++r) left(r) = right.dot(m.row(r).transpose()) / rn;
  const double residual = (m - left * right.transpose()).norm();
  return residual < tol;
}

}  // namespace

BranchState BranchState::initial(const Scenario& scenario) {
  const cd ce = 1.0 / std::sqrt(2.0);
  const cd cg = std::polar(1.0 / std::sqrt(2.0), -0.5 * scenario.atomic_phase);
  const std::array<cd, 2> c = {ce, cg};
  const cd a = scenario.field(1).amplitude;
  const cd b = scenario.field(2).amplitude;
  BranchState st;
  for (int s = 0; s < 2; ++s) {
    for (int sp = 0; sp < 2; ++sp) {
      st.dyads[dyad_index(s, sp)].push_back(Branch{c[s] * std::conj(c[sp]), {a, b}, {a, b}});
    }
  }
  return st;
}

BranchState BranchState::from_product_state(const PureState& psi, double tol) {
  const auto& layout = psi.layout();
  if (layout.size() != 3 || layout.dim(0) != 2) {
    throw UnsupportedInitialState("branch backend needs an (atom, field1, field2) state");
  }
  const auto d1 = static_cast<Eigen::Index>(layout.dim(1));
  const auto d2 = static_cast<Eigen::Index>(layout.dim(2));
  Vector atom, fields, f1, f2;
  if (!split_product(psi.amplitudes(), 2, d1 * d2, atom, fields, tol) ||
      !split_product(fields, d1, d2, f1, f2, tol)) {
    throw UnsupportedInitialState("initial state is not a product of atom and field states");
  }
  atom *= f1.norm() * f2.norm();
  f1.normalize();
  f2.normalize();
  std::array<cd, 2> labels{};
  std::array<const Vector*, 2> fv = {&f1, &f2};
  for (std::size_t i = 0; i < 2; ++i) {
    const Vector& f = *fv[i];
    if (std::abs(f(0)) < tol || f.size() < 2) {
      throw UnsupportedInitialState("field state is not coherent (vacuum component missing)");
    }
    labels[i] = f(1) / f(0);
    Vector c = coherent_coefficients(labels[i], static_cast<std::size_t>(f.size() - 1));
    c.normalize();
    const cd phase = c.dot(f);  // <c|f>
    if ((f - phase * c).norm() > tol) {
      throw UnsupportedInitialState("field state is not a coherent state");
    }
    atom *= phase;
  }
  BranchState st;
  for (int s = 0; s < 2; ++s) {
    for (int sp = 0; sp < 2; ++sp) {
      st.dyads[dyad_index(s, sp)].push_back(
          Branch{atom(s) * std::conj(atom(sp)), labels, labels});
    }
  }
  return st;
}

std::size_t BranchState::branch_count() const {
  std::size_t n = 0;
  for (const auto& d : dyads) n += d.size();
  return n;
}

std::size_t BranchState::max_branches_per_dyad() const {
  std::size_t n = 0;
  for (const auto& d : dyads) n = std::max(n, d.size());
  return n;
}

cd BranchState::trace() const {
  cd tr = 0.0;
  for (int s = 0; s < 2; ++s) {
    for (const auto& b : dyads[dyad_index(s, s)]) {
      tr += b.weight * coherent_overlap(b.bra[0], b.ket[0]) * coherent_overlap(b.bra[1], b.ket[1]);
    }
  }
  return tr;
}

double BranchState::purity() const {
  cd acc = 0.0;
  for (int s = 0; s < 2; ++s) {
    for (int sp = 0; sp < 2; ++sp) {
      for (const auto& b : dyads[dyad_index(s, sp)]) {
        for (const auto& c : dyads[dyad_index(sp, s)]) {
          acc += b.weight * c.weight * coherent_overlap(b.bra[0], c.ket[0]) *
                 coherent_overlap(b.bra[1], c.ket[1]) * coherent_overlap(c.bra[0], b.ket[0]) *
                 coherent_overlap(c.bra[1], b.ket[1]);
        }
      }
    }
  }
  return acc.real();
}

Matrix BranchState::reduce(const SubsystemLayout& layout, std::span<const std::size_t> keep) const {
  detail::require_atom_fields(layout);
  std::array<bool, 3> kept{};
  for (std::size_t k : keep) kept.at(k) = true;
  std::size_t dim = 1;
  for (std::size_t k = 0; k < 3; ++k)
    if (kept[k]) dim *= layout.dim(k);
  const auto n = static_cast<Eigen::Index>(dim);
  // Collect the dyads as columns and sum them with one product.
  std::vector<Vector> kets;
  std::vector<Vector> bras;
  for (int s = 0; s < 2; ++s) {
    for (int sp = 0; sp < 2; ++sp) {
      if (!kept[0] && s != sp) continue;
      for (const auto& b : dyads[dyad_index(s, sp)]) {
        cd factor = b.weight;
        Matrix ket = Matrix::Ones(1, 1);
        Matrix bra = Matrix::Ones(1, 1);
        if (kept[0]) {
          ket = kron(ket, atom_basis(s));
          bra = kron(bra, atom_basis(sp));
        }
        for (std::size_t i = 0; i < 2; ++i) {
          if (kept[i + 1]) {
            ket = kron(ket, coherent_coefficients(b.ket[i], layout.dim(i + 1) - 1));
            bra = kron(bra, coherent_coefficients(b.bra[i], layout.dim(i + 1) - 1));
          } else {
            factor *= coherent_overlap(b.bra[i], b.ket[i]);
          }
        }
        kets.push_back(factor * ket.col(0));
        bras.push_back(bra.col(0));
      }
    }
  }
  Matrix k(n, static_cast<Eigen::Index>(kets.size()));
  Matrix b(n, static_cast<Eigen::Index>(bras.size()));
  for (std::size_t c = 0; c < kets.size(); ++c) {
    k.col(static_cast<Eigen::Index>(c)) = kets[c];
    b.col(static_cast<Eigen::Index>(c)) = bras[c];
  }
  Matrix out = Matrix::Zero(n, n);
  if (!kets.empty()) out.noalias() = k * b.adjoint();
  return out;
}

DensityMatrix BranchState::densify(const SubsystemLayout& layout) const {
  const std::size_t all[] = {0, 1, 2};
  Matrix m = reduce(layout, all);
  detail::hermitize(m);
  return DensityMatrix(layout, std::move(m), Check::kNone);
}

void BranchState::apply_dissipation(int field, double gamma, double omega, double tau) {
  if (gamma == 0.0 || tau == 0.0) return;
  const auto i = static_cast<std::size_t>(field - 1);
  const double shrink = std::exp(-gamma * tau);
  const double loss = -std::expm1(-2.0 * gamma * tau);  // 1 - e^{-2 gamma tau}
  for (int s = 0; s < 2; ++s) {
    for (int sp = 0; sp < 2; ++sp) {
      const int lambda = detail::sigma_z(s) - detail::sigma_z(sp);
      const cd f = dissipation_coefficient(gamma, omega, lambda, tau);
      for (auto& b : dyads[dyad_index(s, sp)]) {
        // exp(F J)|k><b| = e^{F k b*}|k><b|; e^{-gamma tau n}|k> = e^{-|k|^2 loss/2}|k shrink>.
        b.weight *= std::exp(f * b.ket[i] * std::conj(b.bra[i]) -
                             0.5 * loss * (std::norm(b.ket[i]) + std::norm(b.bra[i])));
        b.ket[i] *= shrink;
        b.bra[i] *= shrink;
      }
    }
  }
}

void BranchState::apply_dispersive(int field, double phase) {
  if (phase == 0.0) return;
  const auto i = static_cast<std::size_t>(field - 1);
  // e^{-i phase (n+1)}|k> = e^{-i phase}|k e^{-i phase}> on |e>; e^{i phase n}|k> = |k e^{i phase}> on |g>.
  const cd rot_e = rotation(-phase);
  const cd rot_g = rotation(phase);
  for (int s = 0; s < 2; ++s) {
    for (int sp = 0; sp < 2; ++sp) {
      cd w = 1.0;
      if (s == level_e) w *= rot_e;
      if (sp == level_e) w *= std::conj(rot_e);
      for (auto& b : dyads[dyad_index(s, sp)]) {
        b.weight *= w;
        b.ket[i] *= s == level_e ? rot_e : rot_g;
        b.bra[i] *= sp == level_e ? rot_e : rot_g;
      }
    }
  }
}

void BranchState::apply_atom_unitary(const Eigen::Matrix2cd& u) {
  std::array<std::vector<Branch>, 4> out;
  for (int a = 0; a < 2; ++a) {
    for (int d = 0; d < 2; ++d) {
      auto& target = out[dyad_index(a, d)];
      for (int b = 0; b < 2; ++b) {
        for (int c = 0; c < 2; ++c) {
          const cd coef = u(a, b) * std::conj(u(d, c));
          if (coef == 0.0) continue;
          for (const auto& br : dyads[dyad_index(b, c)]) {
            target.push_back(Branch{coef * br.weight, br.ket, br.bra});
          }
        }
      }
    }
  }
  dyads = std::move(out);
}

void BranchState::apply_free_phases(double atom_phase, double field1_phase, double field2_phase) {
  const std::array<cd, 2> rot = {rotation(-field1_phase), rotation(-field2_phase)};
  for (int s = 0; s < 2; ++s) {
    for (int sp = 0; sp < 2; ++sp) {
      const cd w = rotation(-0.5 * atom_phase * (detail::sigma_z(s) - detail::sigma_z(sp)));
      for (auto& b : dyads[dyad_index(s, sp)]) {
        b.weight *= w;
        for (std::size_t i = 0; i < 2; ++i) {
          b.ket[i] *= rot[i];
          b.bra[i] *= rot[i];
        }
      }
    }
  }
}

BranchState branch_stage_step(const BranchState& state, StageKind stage, double tau,
                              const Scenario& s) {
  BranchState out = state;
  for (int i = 1; i <= 2; ++i) {
    out.apply_dissipation(i, s.field(i).decay_rate, s.active_dispersive_frequency(i, stage), tau);
  }
  if (stage == StageKind::kRamsey) {
    const double theta = s.ramsey_rate() * tau;
    if (theta != 0.0) out.apply_atom_unitary(stage_ramsey_unitary(theta, s));
  }
  for (int i = 1; i <= 2; ++i) out.apply_dispersive(i, s.active_dispersive_frequency(i, stage) * tau);
  if (s.frame == Frame::kLab) {
    out.apply_free_phases(s.atom_frequency * tau, s.field(1).cavity_frequency * tau,
                          s.field(2).cavity_frequency * tau);
  }
  return out;
}

Observables observe_branches(const BranchState& state, const SubsystemLayout& layout) {
  detail::require_atom_fields(layout);
  std::array<Matrix, 3> basis;
  std::array<bool, 3> deficient{};
  for (std::size_t k = 0; k < 3; ++k) {
    const std::size_t keep[] = {k};
    bool d = false;
    basis[k] = top_two_support(state.reduce(layout, keep), kSupportTolerance, d);
    deficient[k] = d;
  }

  auto factor_vector = [&](std::size_t k, int s, cd label) -> Vector {
    if (k == 0) return atom_basis(s);
    return coherent_coefficients(label, layout.dim(k) - 1);
  };

  const std::array<std::array<std::size_t, 2>, 3> pairs = {{{0, 1}, {0, 2}, {1, 2}}};
  std::array<double, 3> conc{};
  double discarded = 0.0;
  for (std::size_t p = 0; p < 3; ++p) {
    const auto [k0, k1] = pairs[p];
    Eigen::Matrix4cd projected = Eigen::Matrix4cd::Zero();
    cd pair_trace = 0.0;
    for (int s = 0; s < 2; ++s) {
      for (int sp = 0; sp < 2; ++sp) {
        if (k0 != 0 && s != sp) continue;  // atom traced out
        for (const auto& b : state.dyads[BranchState::dyad_index(s, sp)]) {
          cd factor = b.weight;
          std::array<Vector, 2> ket, bra;
          const std::array<std::size_t, 2> ks = {k0, k1};
          for (std::size_t q = 0; q < 2; ++q) {
            const std::size_t k = ks[q];
            const cd kl = k == 0 ? cd{} : b.ket[k - 1];
            const cd bl = k == 0 ? cd{} : b.bra[k - 1];
            ket[q] = factor_vector(k, s, kl);
            bra[q] = factor_vector(k, sp, bl);
          }
          for (std::size_t f = 1; f <= 2; ++f) {
            if (f != k0 && f != k1) factor *= coherent_overlap(b.bra[f - 1], b.ket[f - 1]);
          }
          pair_trace += factor * bra[0].dot(ket[0]) * bra[1].dot(ket[1]);
          const Vector pk = kron(basis[k0].adjoint() * ket[0], basis[k1].adjoint() * ket[1]);
          const Vector pb = kron(basis[k0].adjoint() * bra[0], basis[k1].adjoint() * bra[1]);
          projected.noalias() += factor * pk * pb.adjoint();
        }
      }
    }
    const auto red = finish_two_qubit(projected, pair_trace.real(), {basis[k0], basis[k1]},
                                      deficient[k0] || deficient[k1]);
    conc[p] = pair_concurrence(red);
    discarded = std::max(discarded, red.discarded_weight);
  }
  Observables obs;
  obs.c_af1 = conc[0];
  obs.c_af2 = conc[1];
  obs.c_f1f2 = conc[2];
  obs.discarded_weight = discarded;
  obs.purity = state.purity();
  obs.flags = flag_string(discarded);
  return obs;
}

namespace {

Trajectory run_branches(BranchState state, const Scenario& scenario,
                        std::span<const double> sample_times, const RunOptions& options) {
  scenario.validate();
  detail::check_sample_times(scenario, sample_times);
  Trajectory traj;
  traj.layout = scenario.layout();
  const auto b = scenario.boundaries();
  const double eps = 1e-9 * std::max(1.0, b[5]);
  std::size_t next = 0;
  for (std::size_t k = 0; k < 5; ++k) {
    const StageKind stage = kStageOrder[k];
    const double dur = scenario.stage_durations[k];
    while (next < sample_times.size() && sample_times[next] <= b[k + 1] + eps) {
      const double tau = std::clamp(sample_times[next] - b[k], 0.0, dur);
      BranchState st = tau == 0.0 ? state : branch_stage_step(state, stage, tau, scenario);
      TrajectoryPoint pt;
      pt.t = sample_times[next];
      pt.stage = stage;
      if (options.compute_observables) pt.observables = observe_branches(st, traj.layout);
      if (options.keep_states) pt.branches = std::move(st);
      traj.points.push_back(std::move(pt));
      ++next;
    }
    if (dur > 0.0) state = branch_stage_step(state, stage, dur, scenario);
  }
  return traj;
}

}  // namespace

Trajectory branch_run(const Scenario& scenario, std::span<const double> sample_times,
                      const RunOptions& options) {
  return run_branches(BranchState::initial(scenario), scenario, sample_times, options);
}

Trajectory branch_run(const Scenario& scenario, std::span<const double> sample_times) {
  return branch_run(scenario, sample_times, RunOptions{});
}

Trajectory branch_run(const PureState& initial, const Scenario& scenario,
                      std::span<const double> sample_times, const RunOptions& options) {
  return run_branches(BranchState::from_product_state(initial), scenario, sample_times, options);
}

}  // namespace cqed
