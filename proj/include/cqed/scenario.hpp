#pragma once

#include <array>
#include <cstddef>
#include <numbers>
#include <optional>
#include <string_view>

#include "cqed/hilbert.hpp"

namespace cqed {

// Units throughout: time in microseconds, angular frequencies in rad/us,
// decay rates in 1/us. A value quoted as "kHz" for these cavities means
// 1e3 rad/s, i.e. 1e-3 rad/us.

enum class Frame { kRotating, kLab };

/// Interval of the atom's flight. Exactly one is active at a time, in this order.
enum class StageKind { kCavity1 = 0, kFree1, kRamsey, kFree2, kCavity2 };

inline constexpr std::array<StageKind, 5> kStageOrder = {
    StageKind::kCavity1, StageKind::kFree1, StageKind::kRamsey, StageKind::kFree2,
    StageKind::kCavity2};

std::string_view to_string(StageKind stage);
std::string_view to_string(Frame frame);

/// One high-Q cavity mode.
struct CavityField {
  double cavity_frequency = 5.11e4 - 0.1;  // bare mode frequency
  double dispersive_frequency = 6.25e-3;   // Omega^2 / Delta
  std::optional<double> rabi_frequency = 0.025;
  std::optional<double> detuning = 0.1;  // atom frequency minus cavity frequency
  double decay_rate = 0.0;               // amplitude decay; photon loss rate is twice this
  cd amplitude = 0.5;                    // initial coherent amplitude
  std::size_t truncation = 0;            // 0 selects default_truncation(amplitude)
};

/// Full parameter set of a run. Defaults are the experimental values used
/// for the two-cavity setup (30/10/10/10/30 us flight, alpha = beta = 0.5).
struct Scenario {
  double atom_frequency = 5.11e4;
  std::array<CavityField, 2> fields{};
  double ramsey_angle = std::numbers::pi / 4;  // total pulse area of the Ramsey stage
  double atomic_phase = 0.0;                   // phi in (|e> + e^{-i phi/2}|g>)/sqrt2
  std::array<double, 5> stage_durations = {30.0, 10.0, 10.0, 10.0, 30.0};
  Frame frame = Frame::kRotating;
  double tail_tolerance = kDefaultTailTolerance;

  /// Field accessor by physical number (1 or 2).
  const CavityField& field(int i) const { return fields.at(static_cast<std::size_t>(i - 1)); }
  CavityField& field(int i) { return fields.at(static_cast<std::size_t>(i - 1)); }

  /// Effective truncation of field i (explicit value or the default rule).
  std::size_t truncation(int i) const;
  SubsystemLayout layout() const;

  /// Stage boundary times t0..t5 with t0 = 0.
  std::array<double, 6> boundaries() const;
  double total_duration() const;
  double duration(StageKind stage) const {
    return stage_durations[static_cast<std::size_t>(stage)];
  }

  /// Dispersive frequency of field i while `stage` is active (zero outside its cavity).
  double active_dispersive_frequency(int i, StageKind stage) const;
  /// Angular rate of the Ramsey rotation; zero when the Ramsey stage has no duration.
  double ramsey_rate() const;

  /// Throws ConfigError on negative rates or durations, non-finite values, or an
  /// inconsistent dispersive frequency.
  void validate() const;
};

/// Stage active at time t (closed on the left; t5 belongs to Cavity2).
StageKind stage_at(const Scenario& s, double t);

}  // namespace cqed
