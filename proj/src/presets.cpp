#include "cqed/presets.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <thread>

#include "cqed/analytic.hpp"
#include "cqed/branch.hpp"
#include "cqed/csv.hpp"
#include "cqed/entanglement.hpp"
#include "cqed/errors.hpp"
#include "cqed/evolution.hpp"
#include "cqed/lindblad_oracle.hpp"

namespace cqed {

Trajectory simulate(const Scenario& scenario, std::span<const double> grid, Backend backend,
                    const RunOptions& options) {
  switch (backend) {
    case Backend::kDense: return run_scenario(scenario, grid, options);
    case Backend::kBranch: return branch_run(scenario, grid, options);
    case Backend::kOracle: return integrate(initial_state(scenario), scenario, grid, {}, options);
  }
  throw Error("unknown backend");
}

namespace {

double max_concurrence_change(const Trajectory& a, const Trajectory& b) {
  double change = 0.0;
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    const auto& x = a.points[i].observables;
    const auto& y = b.points[i].observables;
    change = std::max({change, std::abs(x.c_af1 - y.c_af1), std::abs(x.c_af2 - y.c_af2),
                       std::abs(x.c_f1f2 - y.c_f1f2)});
  }
  return change;
}

struct Job {
  Scenario scenario;
  std::filesystem::path path;
};

Trajectory run_with_settings(Scenario scenario, std::span<const double> grid,
                             const RunSettings& settings) {
  if (settings.truncation) {
    scenario.field(1).truncation = (*settings.truncation)[0];
    scenario.field(2).truncation = (*settings.truncation)[1];
  }
  RunOptions options;
  options.keep_states = false;
  if (settings.converge) {
    return converge_truncation(scenario, grid, settings.backend).trajectory;
  }
  return simulate(scenario, grid, settings.backend, options);
}

WrittenFile summarise(const std::filesystem::path& path, std::span<const ConcurrenceRecord> rows) {
  WrittenFile f;
  f.path = path;
  f.records = rows.size();
  for (const auto& r : rows) {
    if (!r.flags.empty()) ++f.flagged;
    else if (r.discarded_weight >= kSupportTolerance) ++f.warned;
    f.max_discarded_weight = std::max(f.max_discarded_weight, r.discarded_weight);
  }
  return f;
}

OutputSummary run_jobs(std::vector<Job> jobs, double sample_dt, const RunSettings& settings) {
  std::vector<WrittenFile> written(jobs.size());
  std::vector<std::exception_ptr> errors(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      try {
        const auto grid = uniform_grid(jobs[i].scenario.total_duration(), sample_dt);
        const auto rows = records(run_with_settings(jobs[i].scenario, grid, settings));
        write_file(jobs[i].path, to_csv(rows));
        written[i] = summarise(jobs[i].path, rows);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t n_threads = std::clamp<std::size_t>(settings.jobs, 1, std::max<std::size_t>(1, jobs.size()));
  {
    std::vector<std::jthread> pool;
    for (std::size_t k = 1; k < n_threads; ++k) pool.emplace_back(worker);
    worker();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return {std::move(written)};
}

constexpr std::array<double, 4> kRates = {0.0, 0.05, 0.5, 1.0};
constexpr std::array<double, 3> kAmplitudes = {0.5, 1.0, 2.0};

RunConfig preset_config() {
  RunConfig cfg;
  cfg.sweep.sample_dt = kPresetSampleDt;
  return cfg;
}

void add_point(std::vector<Job>& jobs, const RunConfig& cfg, const std::filesystem::path& dir,
               double a, double b, double g, double q) {
  jobs.push_back({sweep_point(cfg, a, b, g, q), dir / (tuple_name(cfg.sweep, a, b, g, q) + ".csv")});
}

OutputSummary run_fig2(const std::filesystem::path& dir) {
  OutputSummary summary;
  Scenario s;
  s.stage_durations = {1000.0, 0.0, 0.0, 0.0, 0.0};
  const auto grid = uniform_grid(1000.0, 1.0);
  for (double a : kAmplitudes) {
    for (double g : kRates) {
      s.field(1).amplitude = a;
      s.field(1).decay_rate = g * s.field(1).dispersive_frequency;
      std::vector<ConcurrenceRecord> rows;
      for (double t : grid) {
        Observables obs;
        obs.c_af1 = concurrence_stage1(t, s);
        obs.purity = 0.5 * (1.0 + std::norm(coherence_factor(t, s)));
        rows.push_back(make_record(t, obs));
      }
      const auto path = dir / ("a" + format_number(a) + "_g" + format_number(g) + ".csv");
      write_file(path, to_csv(rows));
      summary.files.push_back(summarise(path, rows));
    }
  }
  // Field-1 labels for alpha = 1, lossless and with gamma_1 = 0.2 omega_1.
  s.field(1).amplitude = 1.0;
  for (double g : {0.0, 0.2}) {
    s.field(1).decay_rate = g * s.field(1).dispersive_frequency;
    const auto pts = phase_space_trajectory(s, grid);
    const auto path = dir / ("phase_space_a1_g" + format_number(g) + ".csv");
    write_file(path, to_csv(pts));
    WrittenFile f;
    f.path = path;
    f.records = pts.size();
    summary.files.push_back(f);
  }
  return summary;
}

constexpr std::array<std::string_view, 6> kPresetNames = {"fig2", "fig4", "fig5",
                                                          "fig6", "fig7", "full"};

}  // namespace

ConvergedRun converge_truncation(Scenario scenario, std::span<const double> grid, Backend backend,
                                 double tolerance, std::size_t step, std::size_t max_iterations) {
  RunOptions options;
  options.keep_states = false;
  for (int i = 1; i <= 2; ++i) scenario.field(i).truncation = scenario.truncation(i);
  ConvergedRun run;
  run.trajectory = simulate(scenario, grid, backend, options);
  for (std::size_t it = 1; it <= max_iterations; ++it) {
    Scenario bigger = scenario;
    for (int i = 1; i <= 2; ++i) bigger.field(i).truncation += step;
    Trajectory next = simulate(bigger, grid, backend, options);
    run.last_change = max_concurrence_change(run.trajectory, next);
    run.iterations = it;
    scenario = bigger;
    run.trajectory = std::move(next);
    if (run.last_change < tolerance) {
      run.scenario = scenario;
      return run;
    }
  }
  throw Error("truncation did not converge within " + std::to_string(max_iterations) +
              " increments");
}

std::size_t OutputSummary::warned_records() const {
  std::size_t n = 0;
  for (const auto& f : files) n += f.warned;
  return n;
}

std::size_t OutputSummary::flagged_records() const {
  std::size_t n = 0;
  for (const auto& f : files) n += f.flagged;
  return n;
}

std::string simulate_csv(const Scenario& scenario, double sample_dt, const RunSettings& settings) {
  const auto grid = uniform_grid(scenario.total_duration(), sample_dt);
  const auto rows = records(run_with_settings(scenario, grid, settings));
  return to_csv(rows);
}

OutputSummary run_sweep(const RunConfig& config, const std::filesystem::path& out,
                        const RunSettings& settings) {
  std::vector<Job> jobs;
  for (cd a : config.sweep.alpha)
    for (cd b : config.sweep.beta)
      for (double g : config.sweep.g.values)
        for (double q : config.sweep.q.values) {
          Scenario s = sweep_point(config, a, b, g, q);
          s.validate();
          jobs.push_back({s, out / (tuple_name(config.sweep, a, b, g, q) + ".csv")});
        }
  return run_jobs(std::move(jobs), config.sweep.sample_dt, settings);
}

std::span<const std::string_view> preset_names() { return kPresetNames; }

OutputSummary run_preset(std::string_view name, const std::filesystem::path& out,
                         const RunSettings& settings) {
  const auto dir = out / std::string(name);
  if (name == "fig2") return run_fig2(dir);
  const RunConfig cfg = preset_config();
  std::vector<Job> jobs;
  if (name == "fig4") {
    for (double q : kRates) add_point(jobs, cfg, dir, 0.5, 0.5, 0.0, q);
  } else if (name == "fig5") {
    for (double g : kRates) add_point(jobs, cfg, dir, 0.5, 0.5, g, 0.0);
  } else if (name == "fig6") {
    for (double a : kAmplitudes)
      for (double g : kRates) add_point(jobs, cfg, dir, a, a, g, g);
  } else if (name == "fig7") {
    for (double b : kAmplitudes)
      for (double q : kRates) add_point(jobs, cfg, dir, 0.5, b, 0.0, q);
  } else if (name == "full") {
    for (double a : kAmplitudes)
      for (double b : kAmplitudes)
        for (double g : kRates)
          for (double q : kRates) add_point(jobs, cfg, dir, a, b, g, q);
  } else {
    throw ConfigError("preset", "unknown preset '" + std::string(name) + "'");
  }
  return run_jobs(std::move(jobs), cfg.sweep.sample_dt, settings);
}

}  // namespace cqed
