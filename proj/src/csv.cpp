#include "cqed/csv.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include "cqed/errors.hpp"

namespace cqed {

ConcurrenceRecord make_record(double t, const Observables& obs) {
  auto unit = [](double c) { return std::clamp(c, 0.0, 1.0); };
  return {t,
          unit(obs.c_af1),
          unit(obs.c_af2),
          unit(obs.c_f1f2),
          std::max(0.0, obs.discarded_weight),
          obs.purity,
          obs.flags};
}

std::vector<ConcurrenceRecord> records(const Trajectory& trajectory) {
  std::vector<ConcurrenceRecord> out;
  out.reserve(trajectory.points.size());
  for (const auto& p : trajectory.points) out.push_back(make_record(p.t, p.observables));
  return out;
}

std::string format_number(double value) {
  if (value == 0.0) value = 0.0;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", value);
  return buf;
}

std::string to_csv(std::span<const ConcurrenceRecord> rows) {
  std::string out(kConcurrenceHeader);
  out += '\n';
  for (const auto& r : rows) {
    for (double v : {r.t, r.c_af1, r.c_af2, r.c_f1f2, r.discarded_weight, r.purity}) {
      out += format_number(v);
      out += ',';
    }
    out += r.flags;
    out += '\n';
  }
  return out;
}

std::string to_csv(std::span<const PhaseSpacePoint> rows) {
  std::string out(kPhaseSpaceHeader);
  out += '\n';
  for (const auto& p : rows) {
    out += format_number(p.t) + ',' + format_number(p.alpha_e.real()) + ',' +
           format_number(p.alpha_e.imag()) + ',' + format_number(p.alpha_g.real()) + ',' +
           format_number(p.alpha_g.imag()) + ',' + format_number(p.chord) + '\n';
  }
  return out;
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("cannot open " + path.string() + " for writing");
  f.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!f) throw Error("write to " + path.string() + " failed");
}

}  // namespace cqed
