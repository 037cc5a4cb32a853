#include "cqed/lindblad_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cqed/entanglement.hpp"
#include "cqed/errors.hpp"
#include "detail.hpp"

namespace cqed {

namespace {

// Written directly from the master equation, sharing nothing with the
// factorised propagator beyond index bookkeeping.
class Generator {
 public:
  Generator(const SubsystemLayout& layout, StageKind stage, const Scenario& s)
      : idx_(layout), rabi_(stage == StageKind::kRamsey ? s.ramsey_rate() : 0.0) {
    const auto n = static_cast<Eigen::Index>(idx_.dim);
    energy_ = Eigen::VectorXd::Zero(n);
    for (int i = 1; i <= 2; ++i) {
      gamma_[static_cast<std::size_t>(i)] = s.field(i).decay_rate;
      const double w = s.active_dispersive_frequency(i, stage);
      if (w == 0.0) continue;
      for (std::size_t r = 0; r < idx_.dim; ++r) {
        const double level = idx_.level[static_cast<std::size_t>(i)][r];
        energy_(static_cast<Eigen::Index>(r)) += idx_.atom[r] == 0 ? w * (level + 1.0) : -w * level;
      }
    }
  }

  void apply(const Matrix& rho, Matrix& out) const {
    const auto n = static_cast<Eigen::Index>(idx_.dim);
    out.resize(n, n);
    for (Eigen::Index c = 0; c < n; ++c) {
      for (Eigen::Index r = 0; r < n; ++r) {
        cd acc = cd(0.0, -(energy_(r) - energy_(c))) * rho(r, c);
        for (std::size_t i = 1; i <= 2; ++i) {
          const double g = gamma_[i];
          if (g == 0.0) continue;
          const int nr = idx_.level[i][static_cast<std::size_t>(r)];
          const int nc = idx_.level[i][static_cast<std::size_t>(c)];
          const int d = static_cast<int>(idx_.dims[i]);
          cd term = -static_cast<double>(nr + nc) * rho(r, c);
          if (nr + 1 < d && nc + 1 < d) {
            const auto st = static_cast<Eigen::Index>(idx_.strides[i]);
            term += 2.0 * std::sqrt(static_cast<double>((nr + 1) * (nc + 1))) * rho(r + st, c + st);
          }
          acc += g * term;
        }
        out(r, c) = acc;
      }
    }
    if (rabi_ != 0.0) {
      // -i rabi (sx rho - rho sx); sx swaps the atomic halves.
      const Eigen::Index h = n / 2;
      const cd k(0.0, -rabi_);
      out.topRows(h) += k * rho.bottomRows(h);
      out.bottomRows(h) += k * rho.topRows(h);
      out.leftCols(h) -= k * rho.rightCols(h);
      out.rightCols(h) -= k * rho.leftCols(h);
    }
  }

 private:
  detail::IndexMap idx_;
  double rabi_;
  Eigen::VectorXd energy_;
  std::array<double, 3> gamma_{};
};

Matrix rk4(const Generator& gen, const Matrix& y, double h) {
  Matrix k1, k2, k3, k4;
  gen.apply(y, k1);
  gen.apply(y + (0.5 * h) * k1, k2);
  gen.apply(y + (0.5 * h) * k2, k3);
  gen.apply(y + h * k3, k4);
  return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

class Stepper {
 public:
  Stepper(const IntegratorConfig& cfg, IntegrationStats& stats)
      : cfg_(cfg), stats_(stats), h_(cfg.fixed_step ? cfg.max_step : cfg.initial_step) {}

  void advance(Matrix& rho, double& t, double t_to, const Generator& gen) {
    const double eps = 1e-12 * std::max(1.0, std::abs(t_to));
    while (t < t_to - eps) {
      const double step = std::min(h_, t_to - t);
      if (cfg_.fixed_step) {
        rho = rk4(gen, rho, step);
        accept(rho, t, step);
        continue;
      }
      const Matrix full = rk4(gen, rho, step);
      const Matrix half = rk4(gen, rk4(gen, rho, 0.5 * step), 0.5 * step);
      const double err = (half - full).cwiseAbs().maxCoeff();
      if (err <= cfg_.tolerance) {
        rho = half;
        accept(rho, t, step);
        const double grow = err == 0.0 ? 2.0 : std::min(2.0, 0.9 * std::pow(cfg_.tolerance / err, 0.2));
        if (step == h_) h_ = std::min(cfg_.max_step, std::max(step, step * grow));
      } else {
        ++stats_.rejected_steps;
        h_ = 0.5 * step;
        if (h_ < cfg_.min_step) {
          std::ostringstream os;
          os << "integrator step " << h_ << " us below minimum at t = " << t;
          throw StepUnderflow(os.str());
        }
      }
    }
    t = t_to;
  }

 private:
  void accept(Matrix& rho, double& t, double step) {
    const double tr = rho.trace().real();
    const double drift = std::abs(tr - 1.0);
    stats_.max_trace_drift = std::max(stats_.max_trace_drift, drift);
    if (drift > cfg_.max_trace_drift) {
      std::ostringstream os;
      os << "trace drift " << drift << " in one step at t = " << t
         << "; tighten the tolerance or reduce max_step";
      throw StepUnderflow(os.str());
    }
    rho /= tr;
    detail::hermitize(rho);
    t += step;
    ++stats_.accepted_steps;
  }

  const IntegratorConfig& cfg_;
  IntegrationStats& stats_;
  double h_;
};

}  // namespace

Matrix liouvillian_apply(const Matrix& rho, const SubsystemLayout& layout, StageKind stage,
                         const Scenario& scenario) {
  Matrix out;
  Generator(layout, stage, scenario).apply(rho, out);
  return out;
}

Matrix liouvillian_apply(const DensityMatrix& rho, StageKind stage, const Scenario& scenario) {
  return liouvillian_apply(rho.matrix(), rho.layout(), stage, scenario);
}

Trajectory integrate(const DensityMatrix& rho0, const Scenario& scenario,
                     std::span<const double> grid, const IntegratorConfig& config,
                     const RunOptions& options, IntegrationStats* stats) {
  scenario.validate();
  if (scenario.frame != Frame::kRotating) {
    throw ConfigError("frame", "the master-equation integrator runs in the rotating frame only");
  }
  if (!(config.tolerance > 0.0) || !(config.max_step > 0.0) || !(config.initial_step > 0.0)) {
    throw ConfigError("integrator", "step sizes and tolerance must be positive");
  }
  detail::check_sample_times(scenario, grid);

  IntegrationStats local;
  IntegrationStats& st = stats ? *stats : local;
  Stepper stepper(config, st);
  const PhysicalTolerance relaxed{1e-12, 1e-10, -1e-7};

  Trajectory traj;
  traj.layout = rho0.layout();
  Matrix rho = rho0.matrix();
  double t = 0.0;
  const auto b = scenario.boundaries();
  const double eps = 1e-9 * std::max(1.0, b[5]);
  std::size_t next = 0;
  for (std::size_t k = 0; k < 5; ++k) {
    const StageKind stage = kStageOrder[k];
    const Generator gen(rho0.layout(), stage, scenario);
    while (next < grid.size() && grid[next] <= b[k + 1] + eps) {
      stepper.advance(rho, t, std::clamp(grid[next], b[k], b[k + 1]), gen);
      DensityMatrix snap(rho0.layout(), rho, Check::kBasic, relaxed);
      TrajectoryPoint pt;
      pt.t = grid[next];
      pt.stage = stage;
      if (options.compute_observables) pt.observables = observe(snap);
      if (options.keep_states) pt.state = std::move(snap);
      traj.points.push_back(std::move(pt));
      ++next;
    }
    stepper.advance(rho, t, b[k + 1], gen);
  }
  return traj;
}

}  // namespace cqed
