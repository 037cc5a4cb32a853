#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cqed/analytic.hpp"
#include "cqed/trajectory.hpp"

namespace cqed {

inline constexpr std::string_view kConcurrenceHeader =
    "t_us,C_AF1,C_AF2,C_F1F2,discarded_weight,purity,flags";
inline constexpr std::string_view kPhaseSpaceHeader =
    "t_us,re_alpha_e,im_alpha_e,re_alpha_g,im_alpha_g,chord";

struct ConcurrenceRecord {
  double t = 0.0;
  double c_af1 = 0.0;
  double c_af2 = 0.0;
  double c_f1f2 = 0.0;
  double discarded_weight = 0.0;
  double purity = 1.0;
  std::string flags;
};

/// Concurrences are clamped to [0, 1].
ConcurrenceRecord make_record(double t, const Observables& obs);
std::vector<ConcurrenceRecord> records(const Trajectory& trajectory);

/// printf "%.12g" with negative zero printed as 0.
std::string format_number(double value);

std::string to_csv(std::span<const ConcurrenceRecord> rows);
std::string to_csv(std::span<const PhaseSpacePoint> rows);

/// Writes in binary mode so line endings are always '\n'. Creates parent directories.
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace cqed
