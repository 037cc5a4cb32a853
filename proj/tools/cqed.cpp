// Command-line front end: simulate, sweep, preset, validate, phase-space.

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "cqed/analytic.hpp"
#include "cqed/config.hpp"
#include "cqed/csv.hpp"
#include "cqed/errors.hpp"
#include "cqed/evolution.hpp"
#include "cqed/presets.hpp"
#include "cqed/validation.hpp"

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;

std::filesystem::path default_out_dir() {
  if (const char* env = std::getenv("CQED_OUT_DIR"); env && *env) return env;
  return "out";
}

struct Options {
  std::string config;
  std::string name;
  std::string out;
  std::string backend;
  std::vector<std::size_t> truncation;
  bool converge = false;
  bool full = false;
  std::size_t jobs = 1;
};

cqed::RunSettings settings_for(const Options& o, cqed::Backend fallback) {
  cqed::RunSettings s;
  s.backend = o.backend.empty() ? fallback : cqed::parse_backend(o.backend);
  if (!o.truncation.empty()) {
    if (o.truncation.size() != 2 || o.truncation[0] < 1 || o.truncation[1] < 1) {
      throw cqed::ConfigError("truncation", "expected two positive integers N1,N2");
    }
    s.truncation = std::array<std::size_t, 2>{o.truncation[0], o.truncation[1]};
  }
  s.converge = o.converge;
  s.jobs = o.jobs;
  return s;
}

void warn_validity(const cqed::Scenario& s) {
  for (const auto& w : cqed::dispersive_validity(s).warnings) std::cerr << "warning: " << w << '\n';
}

void report(const cqed::OutputSummary& summary) {
  std::cerr << "wrote " << summary.files.size() << " file(s)";
  if (const auto w = summary.warned_records()) {
    std::cerr << "; " << w << " record(s) with discarded weight above 1e-10";
  }
  if (const auto f = summary.flagged_records()) std::cerr << "; " << f << " flagged record(s)";
  std::cerr << '\n';
}

int run_simulate(const Options& o) {
  const auto cfg = cqed::load_config(o.config);
  warn_validity(cfg.scenario);
  const auto csv = cqed::simulate_csv(cfg.scenario, cfg.sweep.sample_dt,
                                      settings_for(o, cfg.sweep.backend));
  if (o.out.empty()) {
    std::cout << csv;
  } else {
    const auto& sw = cfg.sweep;
    const auto path = std::filesystem::path(o.out) /
                      (cqed::tuple_name(sw, sw.alpha.front(), sw.beta.front(), sw.g.values.front(),
                                        sw.q.values.front()) +
                       ".csv");
    cqed::write_file(path, csv);
    std::cerr << "wrote " << path.string() << '\n';
  }
  return 0;
}

int run_sweep(const Options& o) {
  const auto cfg = cqed::load_config(o.config);
  warn_validity(cfg.scenario);
  const auto out = o.out.empty() ? default_out_dir() : std::filesystem::path(o.out);
  report(cqed::run_sweep(cfg, out, settings_for(o, cfg.sweep.backend)));
  return 0;
}

int run_preset(const Options& o) {
  const auto out = o.out.empty() ? default_out_dir() : std::filesystem::path(o.out);
  report(cqed::run_preset(o.name, out, settings_for(o, cqed::Backend::kBranch)));
  return 0;
}

int run_validate(const Options& o) {
  const auto r = cqed::validate(o.full ? cqed::ValidationLevel::kFull : cqed::ValidationLevel::kQuick,
                                o.jobs);
  std::cout << r.text();
  return r.passed() ? 0 : kExitFailure;
}

int run_phase_space(const Options& o) {
  const auto cfg = cqed::load_config(o.config);
  const auto& s = cfg.scenario;
  const auto grid = cqed::uniform_grid(s.duration(cqed::StageKind::kCavity1), cfg.sweep.sample_dt);
  const auto csv = cqed::to_csv(cqed::phase_space_trajectory(s, grid));
  if (o.out.empty()) {
    std::cout << csv;
  } else {
    cqed::write_file(o.out, csv);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Atom crossing two dissipative cavities: dynamics and pairwise entanglement"};
  app.require_subcommand(1);
  Options o;

  auto add_run_flags = [&](CLI::App* cmd) {
    cmd->add_option("--out", o.out, "Output directory (default $CQED_OUT_DIR or ./out)");
    cmd->add_option("--backend", o.backend, "dense, branch or oracle");
    cmd->add_option("--truncation", o.truncation, "Fock truncations N1,N2")->delimiter(',')->expected(2);
    cmd->add_flag("--converge", o.converge, "Raise truncations until concurrences settle to 1e-6");
  };

  auto* simulate = app.add_subcommand("simulate", "Run one scenario and print its CSV");
  simulate->add_option("config", o.config, "Config file")->required();
  add_run_flags(simulate);

  auto* sweep = app.add_subcommand("sweep", "One CSV per alpha, beta, g, q tuple");
  sweep->add_option("config", o.config, "Config file")->required();
  add_run_flags(sweep);
  sweep->add_option("--jobs", o.jobs, "Concurrent sweep points")->check(CLI::PositiveNumber);

  auto* preset = app.add_subcommand("preset", "Curves of a named figure");
  std::vector<std::string> names;
  for (auto n : cqed::preset_names()) names.emplace_back(n);
  preset->add_option("name", o.name, "fig2, fig4, fig5, fig6, fig7 or full")
      ->required()
      ->check(CLI::IsMember(names));
  add_run_flags(preset);
  preset->add_option("--jobs", o.jobs, "Concurrent curves")->check(CLI::PositiveNumber);

  auto* validate = app.add_subcommand("validate", "Cross-backend and invariant checks");
  validate->add_flag("--full", o.full, "Whole parameter grid (tens of minutes)");
  validate->add_option("--jobs", o.jobs, "Concurrent comparisons")->check(CLI::PositiveNumber);

  auto* phase = app.add_subcommand("phase-space", "Field-1 labels while in the first cavity");
  phase->add_option("config", o.config, "Config file")->required();
  phase->add_option("--out", o.out, "Output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*simulate) return run_simulate(o);
    if (*sweep) return run_sweep(o);
    if (*preset) return run_preset(o);
    if (*validate) return run_validate(o);
    if (*phase) return run_phase_space(o);
  } catch (const cqed::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitFailure;
}
