#pragma once

#include <array>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cqed/config.hpp"
#include "cqed/trajectory.hpp"

namespace cqed {

/// Runs one scenario on the chosen backend.
Trajectory simulate(const Scenario& scenario, std::span<const double> grid, Backend backend,
                    const RunOptions& options = {});

struct ConvergedRun {
  Scenario scenario;  // with the accepted truncations
  Trajectory trajectory;
  double last_change = 0.0;  // max concurrence change of the final increment
  std::size_t iterations = 0;
};

/// Raises both truncations by `step` until no concurrence on the grid moves by
/// more than `tolerance`. Throws Error after `max_iterations` increments.
ConvergedRun converge_truncation(Scenario scenario, std::span<const double> grid, Backend backend,
                                 double tolerance = 1e-6, std::size_t step = 5,
                                 std::size_t max_iterations = 20);

struct RunSettings {
  Backend backend = Backend::kBranch;
  std::optional<std::array<std::size_t, 2>> truncation;
  bool converge = false;
  std::size_t jobs = 1;
};

struct WrittenFile {
  std::filesystem::path path;
  std::size_t records = 0;
  std::size_t flagged = 0;
  std::size_t warned = 0;  // discarded weight in [1e-10, 1e-3)
  double max_discarded_weight = 0.0;
};

struct OutputSummary {
  std::vector<WrittenFile> files;

  std::size_t warned_records() const;
  std::size_t flagged_records() const;
};

/// Output of a single scenario as CSV text.
std::string simulate_csv(const Scenario& scenario, double sample_dt, const RunSettings& settings);

/// One CSV per (alpha, beta, g, q) tuple, named by tuple_name, written to `out`.
OutputSummary run_sweep(const RunConfig& config, const std::filesystem::path& out,
                        const RunSettings& settings);

std::span<const std::string_view> preset_names();

/// Writes the curves of a named figure preset into out/<name>/.
/// fig2 also writes the phase-space trajectories of the field-1 labels.
OutputSummary run_preset(std::string_view name, const std::filesystem::path& out,
                         const RunSettings& settings);

/// Sample spacing used by the five-stage presets, in us.
inline constexpr double kPresetSampleDt = 0.5;

}  // namespace cqed
