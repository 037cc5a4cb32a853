#include "cqed/validation.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <thread>

#include "cqed/analytic.hpp"
#include "cqed/branch.hpp"
#include "cqed/entanglement.hpp"
#include "cqed/errors.hpp"
#include "cqed/evolution.hpp"
#include "cqed/lindblad_oracle.hpp"

namespace cqed {

bool ValidationReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

std::string ValidationReport::text() const {
  std::string out;
  char buf[160];
  std::size_t failed = 0;
  for (const auto& c : checks) {
    std::snprintf(buf, sizeof buf, "%s %-28s worst %.3e limit %.1e", c.passed ? "PASS" : "FAIL",
                  c.name.c_str(), c.value, c.limit);
    out += buf;
    if (!c.detail.empty()) out += "  " + c.detail;
    out += '\n';
    if (!c.passed) ++failed;
  }
  std::snprintf(buf, sizeof buf, "%zu/%zu checks passed in %.1f s\n", checks.size() - failed,
                checks.size(), seconds);
  out += buf;
  return out;
}

std::size_t certification_truncation(cd amplitude) {
  return std::max(default_truncation(amplitude), truncation_for_tail(amplitude, 1e-20));
}

double max_trace_distance(const Trajectory& a, const Trajectory& b) {
  if (a.points.size() != b.points.size()) throw Error("max_trace_distance: grids differ");
  double worst = 0.0;
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    const DensityMatrix x = a.density(i);
    const DensityMatrix y = b.density(i);
    const double td = x.matrix().rows() <= 600
                          ? trace_distance(x, y)
                          : trace_distance_bounds(x.matrix(), y.matrix()).upper;
    worst = std::max(worst, td);
  }
  return worst;
}

namespace {

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

/// Records the worst value and where it happened.
struct Worst {
  double value = 0.0;
  std::string where;
  void update(double v, const std::string& w) {
    if (where.empty() || v > value) {
      value = v;
      where = w;
    }
  }
};

CheckResult finish(std::string name, const Worst& w, double limit) {
  return {std::move(name), w.value < limit, w.value, limit, w.where.empty() ? "" : "at " + w.where};
}

Scenario certification_scenario(cd a, cd b, double g, double q) {
  Scenario s;
  s.field(1).amplitude = a;
  s.field(2).amplitude = b;
  s.field(1).decay_rate = g * s.field(1).dispersive_frequency;
  s.field(2).decay_rate = q * s.field(2).dispersive_frequency;
  s.field(1).truncation = certification_truncation(a);
  s.field(2).truncation = certification_truncation(b);
  return s;
}

// Closed-form stage-1 state against the factorised propagator.
CheckResult analytic_vs_dense(std::span<const double> alphas, std::span<const double> rates,
                              std::span<const double> times) {
  Worst w;
  for (double a : alphas) {
    for (double g : rates) {
      Scenario s = certification_scenario(a, 0.5, g, 0.0);
      s.stage_durations = {times.back(), 0.0, 0.0, 0.0, 0.0};
      const DensityMatrix rho0 = initial_state(s);
      for (double t : times) {
        const double td =
            trace_distance(rho_stage1(t, s), stage_step(rho0, StageKind::kCavity1, t, s));
        w.update(td, fmt("alpha=%g g=%g t=%g", a, g, t));
      }
    }
  }
  return finish("analytic_vs_dense", w, 1e-8);
}

struct Tuple {
  double a, b, g, q;
};

CheckResult branch_vs_dense(std::span<const Tuple> tuples, std::size_t jobs) {
  std::vector<double> worst(tuples.size(), 0.0);
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  auto worker = [&] {
    for (std::size_t i = next++; i < tuples.size(); i = next++) {
      try {
        const auto& p = tuples[i];
        const Scenario s = certification_scenario(p.a, p.b, p.g, p.q);
        const auto bd = s.boundaries();
        const double grid[] = {bd[1], bd[3], bd[5]};
        RunOptions opt;
        opt.compute_observables = false;
        worst[i] = max_trace_distance(run_scenario(s, grid, opt), branch_run(s, grid, opt));
      } catch (...) {
        if (!failed.exchange(true)) error = std::current_exception();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    for (std::size_t k = 1; k < std::max<std::size_t>(1, jobs); ++k) pool.emplace_back(worker);
    worker();
  }
  if (error) std::rethrow_exception(error);
  Worst w;
  for (std::size_t i = 0; i < tuples.size(); ++i) {
    const auto& p = tuples[i];
    w.update(worst[i], fmt("alpha=%g beta=%g g=%g q=%g", p.a, p.b, p.g, p.q));
  }
  return finish("branch_vs_dense", w, 1e-8);
}

CheckResult dense_vs_oracle(double amp, double rate, std::size_t truncation, std::size_t points) {
  Scenario s;
  for (int i = 1; i <= 2; ++i) {
    s.field(i).amplitude = amp;
    s.field(i).decay_rate = rate * s.field(i).dispersive_frequency;
    s.field(i).truncation = truncation;
  }
  std::vector<double> grid;
  for (std::size_t k = 1; k <= points; ++k) {
    grid.push_back(s.total_duration() * static_cast<double>(k) / static_cast<double>(points));
  }
  RunOptions opt;
  opt.compute_observables = false;
  const auto dense = run_scenario(s, grid, opt);
  const auto oracle = integrate(initial_state(s), s, grid, {}, opt);
  Worst w;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    w.update(trace_distance(dense.density(i), oracle.density(i)), fmt("t=%g", grid[i]));
  }
  return finish("dense_vs_oracle", w, 1e-6);
}

CheckResult concurrence_peak() {
  Scenario s;
  s.field(1).amplitude = 1.0;
  const double t = std::numbers::pi / (2.0 * s.field(1).dispersive_frequency);
  s.stage_durations = {2.0 * t, 0.0, 0.0, 0.0, 0.0};
  Worst w;
  w.update(std::abs(concurrence_stage1(t, s) - std::sqrt(1.0 - std::exp(-4.0))),
           fmt("t=%g", t));
  w.update(concurrence_stage1(2.0 * t, s), fmt("t=%g", 2.0 * t));
  return finish("concurrence_landmarks", w, 1e-6);
}

// Physicality of every snapshot, CKW residual on pure runs and the stage semigroup law.
std::vector<CheckResult> invariants(std::span<const Tuple> tuples) {
  Worst physical;
  Worst ckw;
  Worst semigroup;
  for (const auto& p : tuples) {
    Scenario s;
    s.field(1).amplitude = p.a;
    s.field(2).amplitude = p.b;
    s.field(1).decay_rate = p.g * s.field(1).dispersive_frequency;
    s.field(2).decay_rate = p.q * s.field(2).dispersive_frequency;
    const std::string where = fmt("alpha=%g beta=%g g=%g q=%g", p.a, p.b, p.g, p.q);
    const auto grid = uniform_grid(s.total_duration(), 15.0);
    RunOptions opt;
    opt.compute_observables = false;
    const auto traj = run_scenario(s, grid, opt);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const auto& rho = *traj.points[i].state;
      const Matrix& m = rho.matrix();
      const double herm = (m - m.adjoint()).cwiseAbs().maxCoeff();
      const double trace = std::abs(m.trace() - 1.0);
      const double negative = std::max(0.0, -rho.min_eigenvalue());
      // Hermiticity 1e-12, trace 1e-10, positivity -1e-9, scaled onto one limit.
      physical.update(std::max({herm / 1e-12, trace / 1e-10, negative / 1e-9}), where);
      if (p.g == 0.0 && p.q == 0.0) {
        if (auto r = monogamy_residual(rho)) ckw.update(std::max(0.0, -*r), where);
      }
    }
    const DensityMatrix rho0 = initial_state(s);
    for (StageKind stage : kStageOrder) {
      const double d = s.duration(stage);
      if (d == 0.0) continue;
      const auto whole = stage_step(rho0, stage, d, s);
      const auto split = stage_step(stage_step(rho0, stage, 0.3 * d, s), stage, 0.7 * d, s);
      semigroup.update((whole.matrix() - split.matrix()).cwiseAbs().maxCoeff(),
                       where + " stage=" + std::string(to_string(stage)));
    }
  }
  return {finish("snapshot_physicality", physical, 1.0), finish("ckw_residual", ckw, 1e-6),
          finish("semigroup", semigroup, 1e-9)};
}

}  // namespace

ValidationReport validate(ValidationLevel level, std::size_t jobs) {
  const auto start = std::chrono::steady_clock::now();
  ValidationReport report;
  auto add = [&](CheckResult r) { report.checks.push_back(std::move(r)); };
  auto guarded = [&](const char* name, auto&& fn) {
    try {
      fn();
    } catch (const std::exception& e) {
      add({name, false, 0.0, 0.0, std::string("error: ") + e.what()});
    }
  };

  if (level == ValidationLevel::kQuick) {
    const double alphas[] = {1.0};
    const double rates[] = {0.5};
    const double times[] = {10.0, 20.0, 30.0};
    guarded("analytic_vs_dense", [&] { add(analytic_vs_dense(alphas, rates, times)); });
    const Tuple tuples[] = {{0.5, 0.5, 0.5, 0.5}, {1.0, 0.5, 0.05, 1.0}};
    guarded("branch_vs_dense", [&] { add(branch_vs_dense(tuples, jobs)); });
    guarded("dense_vs_oracle", [&] { add(dense_vs_oracle(0.5, 0.5, 0, 3)); });
    guarded("concurrence_landmarks", [&] { add(concurrence_peak()); });
    const Tuple inv[] = {{0.5, 0.5, 0.0, 0.0}, {0.5, 1.0, 0.5, 0.05}};
    guarded("invariants", [&] {
      for (auto& r : invariants(inv)) add(std::move(r));
    });
  } else {
    const double amps[] = {0.5, 1.0, 2.0};
    const double rates[] = {0.0, 0.05, 0.5, 1.0};
    std::vector<double> times;
    for (int k = 1; k <= 20; ++k) times.push_back(50.0 * k);
    guarded("analytic_vs_dense", [&] { add(analytic_vs_dense(amps, rates, times)); });
    std::vector<Tuple> grid;
    for (double a : amps)
      for (double b : amps)
        for (double g : rates)
          for (double q : rates) grid.push_back({a, b, g, q});
    guarded("branch_vs_dense", [&] { add(branch_vs_dense(grid, jobs)); });
    guarded("dense_vs_oracle", [&] { add(dense_vs_oracle(1.0, 0.05, 20, 10)); });
    guarded("concurrence_landmarks", [&] { add(concurrence_peak()); });
    std::vector<Tuple> inv;
    for (double a : amps)
      for (double g : rates) inv.push_back({a, a, g, g});
    guarded("invariants", [&] {
      for (auto& r : invariants(inv)) add(std::move(r));
    });
  }
  report.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace cqed
