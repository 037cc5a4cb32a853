#include "cqed/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "cqed/entanglement.hpp"
#include "cqed/errors.hpp"
#include "detail.hpp"

namespace cqed {

namespace detail {

IndexMap::IndexMap(const SubsystemLayout& layout) {
  require_atom_fields(layout);
  dim = layout.total_dim();
  for (std::size_t k = 0; k < 3; ++k) {
    dims[k] = layout.dim(k);
    strides[k] = layout.stride(k);
    level[k].resize(dim);
  }
  atom.resize(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t k = 0; k < 3; ++k) {
      level[k][i] = static_cast<int>((i / strides[k]) % dims[k]);
    }
    atom[i] = level[0][i];
  }
}

void require_atom_fields(const SubsystemLayout& layout) {
  if (layout.size() != 3 || layout.dim(0) != 2) {
    throw Error("expected an (atom, field1, field2) layout");
  }
}

void apply_field_dissipation(Matrix& rho, const IndexMap& idx, int field, double gamma,
                             double omega, double tau) {
  if (gamma == 0.0 || tau == 0.0) return;
  const auto k = static_cast<std::size_t>(field);
  const std::size_t d = idx.dims[k];
  const std::size_t st = idx.strides[k];
  const auto& level = idx.level[k];

  // coef[l][j] = F_lambda^j / j!, l = (lambda + 2) / 2.
  std::array<std::vector<cd>, 3> coef;
  for (int l = 0; l < 3; ++l) {
    const cd f = dissipation_coefficient(gamma, omega, 2 * l - 2, tau);
    coef[l].resize(d);
    coef[l][0] = 1.0;
    for (std::size_t j = 1; j < d; ++j) coef[l][j] = coef[l][j - 1] * f / static_cast<double>(j);
  }
  // ladder[n][j] = sqrt((n + j)! / n!)
  std::vector<std::vector<double>> ladder(d);
  for (std::size_t n = 0; n < d; ++n) {
    ladder[n].resize(d - n);
    ladder[n][0] = 1.0;
    for (std::size_t j = 1; j < d - n; ++j) {
      ladder[n][j] = ladder[n][j - 1] * std::sqrt(static_cast<double>(n + j));
    }
  }
  std::vector<double> damp(d);
  for (std::size_t n = 0; n < d; ++n) damp[n] = std::exp(-gamma * tau * static_cast<double>(n));

  const auto dim = static_cast<Eigen::Index>(idx.dim);
  Matrix out(dim, dim);
  for (Eigen::Index c = 0; c < dim; ++c) {
    const auto nc = static_cast<std::size_t>(level[c]);
    const int sc = idx.atom[c];
    for (Eigen::Index r = 0; r < dim; ++r) {
      const auto nr = static_cast<std::size_t>(level[r]);
      const int lambda = sigma_z(idx.atom[r]) - sigma_z(sc);
      const auto& t = coef[static_cast<std::size_t>((lambda + 2) / 2)];
      const std::size_t jmax = d - 1 - std::max(nr, nc);
      cd acc = rho(r, c);
      for (std::size_t j = 1; j <= jmax; ++j) {
        const auto off = static_cast<Eigen::Index>(j * st);
        acc += t[j] * (ladder[nr][j] * ladder[nc][j]) * rho(r + off, c + off);
      }
      out(r, c) = acc * (damp[nr] * damp[nc]);
    }
  }
  rho = std::move(out);
}

void apply_atom_unitary(Matrix& rho, const Eigen::Matrix2cd& u) {
  const Eigen::Index h = rho.rows() / 2;
  Matrix tmp(rho.rows(), rho.cols());
  tmp.topRows(h) = u(0, 0) * rho.topRows(h) + u(0, 1) * rho.bottomRows(h);
  tmp.bottomRows(h) = u(1, 0) * rho.topRows(h) + u(1, 1) * rho.bottomRows(h);
  rho.leftCols(h) = std::conj(u(0, 0)) * tmp.leftCols(h) + std::conj(u(0, 1)) * tmp.rightCols(h);
  rho.rightCols(h) = std::conj(u(1, 0)) * tmp.leftCols(h) + std::conj(u(1, 1)) * tmp.rightCols(h);
}

void apply_diagonal_unitary(Matrix& rho, const Vector& phases) {
  rho = (phases.asDiagonal() * rho * phases.conjugate().asDiagonal()).eval();
}

}  // namespace detail

namespace {

// Diagonal phases of the stage unitary: dispersive coupling of the active
// cavity and, in the lab frame, the free Hamiltonian (zero-point terms drop
// out of the commutator).
Vector stage_phases(const detail::IndexMap& idx, StageKind stage, double tau,
                    const Scenario& s, bool& trivial) {
  trivial = true;
  Vector p = Vector::Ones(static_cast<Eigen::Index>(idx.dim));
  for (int i = 1; i <= 2; ++i) {
    const double w = s.active_dispersive_frequency(i, stage);
    if (w == 0.0) continue;
    trivial = false;
    const double phi = w * tau;
    for (std::size_t r = 0; r < idx.dim; ++r) {
      const double n = idx.level[static_cast<std::size_t>(i)][r];
      p(static_cast<Eigen::Index>(r)) *=
          idx.atom[r] == 0 ? std::polar(1.0, -phi * (n + 1.0)) : std::polar(1.0, phi * n);
    }
  }
  if (s.frame == Frame::kLab) {
    trivial = false;
    const double wa = s.atom_frequency * tau;
    const double w1 = s.field(1).cavity_frequency * tau;
    const double w2 = s.field(2).cavity_frequency * tau;
    for (std::size_t r = 0; r < idx.dim; ++r) {
      const double phase = -0.5 * wa * detail::sigma_z(idx.atom[r]) - w1 * idx.level[1][r] -
                           w2 * idx.level[2][r];
      p(static_cast<Eigen::Index>(r)) *= std::polar(1.0, phase);
    }
  }
  return p;
}

void check_tau(StageKind stage, double tau, const Scenario& s) {
  const double dur = s.duration(stage);
  if (!(tau >= 0.0) || tau > dur + 1e-9 * std::max(1.0, dur)) {
    std::ostringstream os;
    os << "stage " << to_string(stage) << ": tau " << tau << " outside [0, " << dur << "]";
    throw Error(os.str());
  }
}

}  // namespace

Matrix dispersive_unitary(double omega, double tau, std::size_t truncation) {
  const auto d = static_cast<Eigen::Index>(truncation + 1);
  Vector diag(2 * d);
  const double phi = omega * tau;
  for (Eigen::Index n = 0; n < d; ++n) {
    const auto dn = static_cast<double>(n);
    diag(n) = std::polar(1.0, -phi * (dn + 1.0));
    diag(d + n) = std::polar(1.0, phi * dn);
  }
  return diag.asDiagonal();
}

Eigen::Matrix2cd ramsey_unitary(double theta) {
  Eigen::Matrix2cd u;
  const cd c = std::cos(theta);
  const cd is = cd(0.0, -std::sin(theta));
  u << c, is, is, c;
  return u;
}

Eigen::Matrix2cd stage_ramsey_unitary(double theta, const Scenario& scenario) {
  Eigen::Matrix2cd u = ramsey_unitary(theta);
  if (scenario.frame == Frame::kLab) {
    const double phi =
        std::fmod(scenario.atom_frequency * scenario.boundaries()[2], 2.0 * std::numbers::pi);
    u(0, 1) *= std::polar(1.0, -phi);
    u(1, 0) *= std::polar(1.0, phi);
  }
  return u;
}

cd dissipation_coefficient(double gamma, double omega, int lambda, double tau) {
#ifdef CQED_MUTATION_FLIP_F_SIGN
  lambda = -lambda;
#endif
  const cd z(2.0 * gamma, omega * lambda);
  const cd x = z * tau;
  if (std::abs(x) < 1e-6) {
    // (1 - e^{-x}) / x = 1 - x/2 + x^2/6 - ...
    return 2.0 * gamma * tau * (1.0 - x / 2.0 + x * x / 6.0);
  }
  return 2.0 * gamma * (1.0 - std::exp(-x)) / z;
}

DensityMatrix dissipative_map(const DensityMatrix& rho, StageKind stage, double tau,
                              const Scenario& scenario) {
  if (tau < 0.0) throw Error("dissipative_map: negative tau");
  const detail::IndexMap idx(rho.layout());
  Matrix m = rho.matrix();
  for (int i = 1; i <= 2; ++i) {
    detail::apply_field_dissipation(m, idx, i, scenario.field(i).decay_rate,
                                    scenario.active_dispersive_frequency(i, stage), tau);
  }
  detail::hermitize(m);
  return DensityMatrix(rho.layout(), std::move(m), Check::kBasic);
}

DensityMatrix stage_step(const DensityMatrix& rho, StageKind stage, double tau,
                         const Scenario& scenario) {
  check_tau(stage, tau, scenario);
  const detail::IndexMap idx(rho.layout());
  Matrix m = rho.matrix();
  for (int i = 1; i <= 2; ++i) {
    detail::apply_field_dissipation(m, idx, i, scenario.field(i).decay_rate,
                                    scenario.active_dispersive_frequency(i, stage), tau);
  }
  if (stage == StageKind::kRamsey) {
    const double theta = scenario.ramsey_rate() * tau;
    if (theta != 0.0) detail::apply_atom_unitary(m, stage_ramsey_unitary(theta, scenario));
  }
  bool trivial = true;
  const Vector phases = stage_phases(idx, stage, tau, scenario, trivial);
  if (!trivial) detail::apply_diagonal_unitary(m, phases);
  detail::hermitize(m);
  return DensityMatrix(rho.layout(), std::move(m), Check::kBasic);
}

PureState initial_pure_state(const Scenario& scenario) {
  Vector atom(2);
  atom << 1.0, std::polar(1.0, -0.5 * scenario.atomic_phase);
  atom /= std::sqrt(2.0);
  const PureState factors[] = {
      PureState(SubsystemLayout::single(2, "atom"), atom),
      coherent_state(scenario.field(1).amplitude, scenario.truncation(1), scenario.tail_tolerance),
      coherent_state(scenario.field(2).amplitude, scenario.truncation(2), scenario.tail_tolerance),
  };
  const PureState psi = tensor_product(factors);
  return PureState(scenario.layout(), psi.amplitudes());
}

DensityMatrix initial_state(const Scenario& scenario) {
  return DensityMatrix(initial_pure_state(scenario));
}

std::vector<double> uniform_grid(double t_end, double dt) {
  if (!(dt > 0.0) || t_end < 0.0) throw Error("uniform_grid: need dt > 0 and t_end >= 0");
  std::vector<double> grid;
  const auto steps = static_cast<std::size_t>(std::floor(t_end / dt + 1e-9));
  for (std::size_t k = 0; k <= steps; ++k) grid.push_back(static_cast<double>(k) * dt);
  if (t_end - grid.back() > 1e-9 * std::max(1.0, t_end)) grid.push_back(t_end);
  return grid;
}

namespace detail {

void check_sample_times(const Scenario& s, std::span<const double> times) {
  const double t5 = s.total_duration();
  const double eps = 1e-9 * std::max(1.0, t5);
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!(times[i] >= -eps && times[i] <= t5 + eps)) {
      throw ConfigError("sample_times", "sample time outside [t0, t5]");
    }
    if (i > 0 && times[i] < times[i - 1]) throw ConfigError("sample_times", "not sorted");
  }
}

}  // namespace detail

Trajectory run_scenario(const DensityMatrix& initial, const Scenario& scenario,
                        std::span<const double> sample_times, const RunOptions& options) {
  scenario.validate();
  detail::require_atom_fields(initial.layout());
  detail::check_sample_times(scenario, sample_times);

  Trajectory traj;
  traj.layout = initial.layout();
  const auto b = scenario.boundaries();
  const double eps = 1e-9 * std::max(1.0, b[5]);

  DensityMatrix stage_start = initial;
  std::size_t next = 0;
  for (std::size_t k = 0; k < 5; ++k) {
    const StageKind stage = kStageOrder[k];
    const double dur = scenario.stage_durations[k];
    std::optional<DensityMatrix> stage_end;
    while (next < sample_times.size() && sample_times[next] <= b[k + 1] + eps) {
      const double tau = std::clamp(sample_times[next] - b[k], 0.0, dur);
      DensityMatrix rho = tau == 0.0 ? stage_start : stage_step(stage_start, stage, tau, scenario);
      if (options.check == Check::kFull) rho.check(Check::kFull);
      if (tau == dur) stage_end = rho;
      TrajectoryPoint pt;
      pt.t = sample_times[next];
      pt.stage = stage;
      if (options.compute_observables) pt.observables = observe(rho);
      if (options.keep_states) pt.state = std::move(rho);
      traj.points.push_back(std::move(pt));
      ++next;
    }
    if (dur > 0.0) {
      stage_start = stage_end ? std::move(*stage_end) : stage_step(stage_start, stage, dur, scenario);
    }
  }
  return traj;
}

Trajectory run_scenario(const Scenario& scenario, std::span<const double> sample_times,
                        const RunOptions& options) {
  return run_scenario(initial_state(scenario), scenario, sample_times, options);
}

ValidityReport dispersive_validity(const Scenario& scenario, double threshold) {
  ValidityReport report;
  for (int i = 1; i <= 2; ++i) {
    const auto& f = scenario.field(i);
    if (!f.rabi_frequency || !f.detuning) continue;
    const double omega = *f.rabi_frequency;
    double r = std::numeric_limits<double>::infinity();
    if (omega != 0.0) r = std::abs(*f.detuning) / (omega * std::sqrt(std::norm(f.amplitude) + 1.0));
    report.ratio[static_cast<std::size_t>(i - 1)] = r;
    if (r < threshold) {
      std::ostringstream os;
      os << "field " << i << ": |Delta|/(Omega sqrt(n+1)) = " << r << " < " << threshold
         << "; dispersive approximation questionable";
      report.warnings.push_back(os.str());
    }
  }
  return report;
}

DensityMatrix Trajectory::density(std::size_t i) const {
  const auto& pt = points.at(i);
  if (pt.state) return *pt.state;
  if (pt.branches) return pt.branches->densify(layout);
  throw Error("trajectory point holds no state");
}

}  // namespace cqed
