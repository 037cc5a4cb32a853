#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "cqed/scenario.hpp"

namespace cqed {

enum class Backend { kDense, kBranch, kOracle };

std::string_view to_string(Backend backend);
Backend parse_backend(std::string_view name);

/// Decay-rate values of one field across a sweep. Relative values are
/// multiples of the field's dispersive frequency (gamma = g omega).
struct RateAxis {
  bool relative = true;
  std::vector<double> values = {0.0};
};

struct SweepSpec {
  std::vector<cd> alpha = {0.5};
  std::vector<cd> beta = {0.5};
  RateAxis g;
  RateAxis q;
  double sample_dt = 1.0;  // us
  Backend backend = Backend::kBranch;
};

struct RunConfig {
  Scenario scenario;  // first point of every sweep axis
  SweepSpec sweep;
};

/// Parses the line-oriented `key = value` format (`#` starts a comment).
/// Absent keys take the default experimental values; unknown or repeated keys
/// and invalid values raise ConfigError with the key and line number.
///
/// Keys: omega_a, omega_tilde_{1,2}, omega_{1,2}, Omega_{1,2}, Delta_{1,2},
/// gamma_{1,2}, g, q, alpha, beta, phi, ramsey_angle, durations,
/// t_cavity1, t_free1, t_ramsey, t_free2, t_cavity2, N_1, N_2, frame,
/// tail_tolerance, sample_dt, backend. g, q, alpha and beta take
/// comma-separated lists; amplitudes accept complex values such as 0.5+0.2i.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

cd parse_complex(std::string_view text);

/// Scenario at one sweep point.
Scenario sweep_point(const RunConfig& config, cd alpha, cd beta, double g, double q);

/// Canonical tuple encoding used for sweep file names, e.g. a0.5_b1_g0.05_q0.
std::string tuple_name(const SweepSpec& sweep, cd alpha, cd beta, double g, double q);

}  // namespace cqed
