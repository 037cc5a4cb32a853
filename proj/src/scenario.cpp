#include "cqed/scenario.hpp"

#include <cmath>
#include <string>

#include "cqed/errors.hpp"

namespace cqed {

std::string_view to_string(StageKind stage) {
  switch (stage) {
    case StageKind::kCavity1: return "cavity1";
    case StageKind::kFree1: return "free1";
    case StageKind::kRamsey: return "ramsey";
    case StageKind::kFree2: return "free2";
    case StageKind::kCavity2: return "cavity2";
  }
  return "?";
}

std::string_view to_string(Frame frame) {
  return frame == Frame::kLab ? "lab" : "rotating";
}

std::size_t Scenario::truncation(int i) const {
  const auto& f = field(i);
  return f.truncation > 0 ? f.truncation : default_truncation(f.amplitude);
}

SubsystemLayout Scenario::layout() const {
  return SubsystemLayout::atom_fields(truncation(1), truncation(2));
}

std::array<double, 6> Scenario::boundaries() const {
  std::array<double, 6> t{};
  for (std::size_t k = 0; k < 5; ++k) t[k + 1] = t[k] + stage_durations[k];
  return t;
}

double Scenario::total_duration() const { return boundaries()[5]; }

double Scenario::active_dispersive_frequency(int i, StageKind stage) const {
  if (i == 1 && stage == StageKind::kCavity1) return field(1).dispersive_frequency;
  if (i == 2 && stage == StageKind::kCavity2) return field(2).dispersive_frequency;
  return 0.0;
}

double Scenario::ramsey_rate() const {
  const double d = duration(StageKind::kRamsey);
  return d > 0.0 ? ramsey_angle / d : 0.0;
}

void Scenario::validate() const {
  auto finite = [](const char* key, double v) {
    if (!std::isfinite(v)) throw ConfigError(key, "value is not finite");
  };
  finite("omega_a", atom_frequency);
  finite("ramsey_angle", ramsey_angle);
  finite("phi", atomic_phase);
  finite("tail_tolerance", tail_tolerance);
  if (!(tail_tolerance > 0.0)) throw ConfigError("tail_tolerance", "must be positive");
  static const char* kDurationKeys[] = {"t_cavity1", "t_free1", "t_ramsey", "t_free2",
                                        "t_cavity2"};
  for (std::size_t k = 0; k < 5; ++k) {
    finite(kDurationKeys[k], stage_durations[k]);
    if (stage_durations[k] < 0.0) throw ConfigError(kDurationKeys[k], "duration is negative");
  }
  for (int i = 1; i <= 2; ++i) {
    const auto& f = field(i);
    const std::string suffix = "_" + std::to_string(i);
    finite(("omega_tilde" + suffix).c_str(), f.cavity_frequency);
    finite(("omega" + suffix).c_str(), f.dispersive_frequency);
    finite(("gamma" + suffix).c_str(), f.decay_rate);
    if (!std::isfinite(f.amplitude.real()) || !std::isfinite(f.amplitude.imag())) {
      throw ConfigError(i == 1 ? "alpha" : "beta", "amplitude is not finite");
    }
    if (f.decay_rate < 0.0) throw ConfigError("gamma" + suffix, "decay rate is negative");
    if (f.rabi_frequency && *f.rabi_frequency < 0.0) {
      throw ConfigError("Omega" + suffix, "Rabi frequency is negative");
    }
    if (f.rabi_frequency && f.detuning) {
      if (*f.detuning == 0.0) throw ConfigError("Delta" + suffix, "detuning is zero");
      const double expected = (*f.rabi_frequency) * (*f.rabi_frequency) / (*f.detuning);
      const double scale = std::max(std::abs(expected), std::abs(f.dispersive_frequency));
      if (std::abs(expected - f.dispersive_frequency) > 1e-9 * std::max(scale, 1e-300)) {
        throw ConfigError("omega" + suffix,
                          "inconsistent with Omega" + suffix + "^2/Delta" + suffix);
      }
    }
  }
}

StageKind stage_at(const Scenario& s, double t) {
  const auto b = s.boundaries();
  for (std::size_t k = 0; k < 5; ++k) {
    if (t < b[k + 1]) return kStageOrder[k];
  }
  return StageKind::kCavity2;
}

}  // namespace cqed
