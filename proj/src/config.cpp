#include "cqed/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "cqed/errors.hpp"

namespace cqed {

std::string_view to_string(Backend backend) {
  switch (backend) {
    case Backend::kDense: return "dense";
    case Backend::kBranch: return "branch";
    case Backend::kOracle: return "oracle";
  }
  return "?";
}

Backend parse_backend(std::string_view name) {
  if (name == "dense") return Backend::kDense;
  if (name == "branch") return Backend::kBranch;
  if (name == "oracle") return Backend::kOracle;
  throw ConfigError("backend", "expected dense, branch or oracle, got '" + std::string(name) + "'");
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool parse_double(std::string_view s, double& out) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end && !s.empty();
}

std::vector<std::string_view> split_list(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = s.find(',', start);
    out.push_back(trim(s.substr(start, comma == std::string_view::npos ? s.npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

struct Entry {
  std::string value;
  std::size_t line;
};

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "omega_a", "omega_tilde_1", "omega_tilde_2", "omega_1",   "omega_2",   "Omega_1",
      "Omega_2", "Delta_1",       "Delta_2",       "gamma_1",   "gamma_2",   "g",
      "q",       "alpha",         "beta",          "phi",       "ramsey_angle", "durations",
      "t_cavity1", "t_free1",     "t_ramsey",      "t_free2",   "t_cavity2", "N_1",
      "N_2",     "frame",         "tail_tolerance", "sample_dt", "backend"};
  return keys;
}

class Reader {
 public:
  explicit Reader(std::map<std::string, Entry> entries) : entries_(std::move(entries)) {}

  bool has(const std::string& key) const { return entries_.count(key) > 0; }
  std::size_t line(const std::string& key) const {
    auto it = entries_.find(key);
    return it == entries_.end() ? 0 : it->second.line;
  }

  double number(const std::string& key) const {
    const auto& e = entries_.at(key);
    double v = 0.0;
    if (!parse_double(e.value, v)) throw ConfigError(key, "not a number: '" + e.value + "'", e.line);
    return v;
  }

  std::vector<double> numbers(const std::string& key) const {
    const auto& e = entries_.at(key);
    std::vector<double> out;
    for (auto item : split_list(e.value)) {
      double v = 0.0;
      if (!parse_double(item, v)) {
        throw ConfigError(key, "not a number: '" + std::string(item) + "'", e.line);
      }
      out.push_back(v);
    }
    return out;
  }

  std::vector<cd> complexes(const std::string& key) const {
    const auto& e = entries_.at(key);
    std::vector<cd> out;
    for (auto item : split_list(e.value)) {
      try {
        out.push_back(parse_complex(item));
      } catch (const ConfigError&) {
        throw ConfigError(key, "not a complex number: '" + std::string(item) + "'", e.line);
      }
    }
    return out;
  }

  std::size_t count(const std::string& key) const {
    const double v = number(key);
    if (v < 1.0 || v != std::floor(v)) {
      throw ConfigError(key, "expected a positive integer", line(key));
    }
    return static_cast<std::size_t>(v);
  }

  const std::string& text(const std::string& key) const { return entries_.at(key).value; }

 private:
  std::map<std::string, Entry> entries_;
};

std::string short_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string format_complex(cd z) {
  std::string s = short_number(z.real());
  if (z.imag() != 0.0) {
    const std::string im = short_number(z.imag());
    s += (z.imag() > 0 ? "+" : "") + im + "i";
  }
  return s;
}

}  // namespace

cd parse_complex(std::string_view text) {
  std::string_view s = trim(text);
  double re = 0.0;
  double im = 0.0;
  if (s.empty()) throw ConfigError("", "empty complex number");
  if (s.back() != 'i') {
    if (!parse_double(s, re)) throw ConfigError("", "bad complex number");
    return {re, 0.0};
  }
  s.remove_suffix(1);
  // Split at the last sign that is not a leading sign or part of an exponent.
  std::size_t split = std::string_view::npos;
  for (std::size_t k = s.size(); k-- > 1;) {
    if ((s[k] == '+' || s[k] == '-') && s[k - 1] != 'e' && s[k - 1] != 'E') {
      split = k;
      break;
    }
  }
  std::string_view re_part = split == std::string_view::npos ? std::string_view{} : s.substr(0, split);
  std::string_view im_part = split == std::string_view::npos ? s : s.substr(split);
  if (!re_part.empty() && !parse_double(re_part, re)) throw ConfigError("", "bad complex number");
  if (im_part == "+" || im_part.empty()) {
    im = 1.0;
  } else if (im_part == "-") {
    im = -1.0;
  } else if (!parse_double(im_part, im)) {
    throw ConfigError("", "bad complex number");
  }
  return {re, im};
}

RunConfig parse_config(std::string_view text) {
  std::map<std::string, Entry> entries;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError("", "expected 'key = value'", line_no);
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (!known_keys().count(key)) throw ConfigError(key, "unknown key", line_no);
    if (entries.count(key)) throw ConfigError(key, "key given twice", line_no);
    if (value.empty()) throw ConfigError(key, "missing value", line_no);
    entries.emplace(key, Entry{value, line_no});
  }
  const Reader in(std::move(entries));

  RunConfig cfg;
  Scenario& s = cfg.scenario;
  if (in.has("omega_a")) s.atom_frequency = in.number("omega_a");
  if (in.has("phi")) s.atomic_phase = in.number("phi");
  if (in.has("ramsey_angle")) s.ramsey_angle = in.number("ramsey_angle");
  if (in.has("tail_tolerance")) s.tail_tolerance = in.number("tail_tolerance");
  if (in.has("frame")) {
    const auto& f = in.text("frame");
    if (f == "rotating") s.frame = Frame::kRotating;
    else if (f == "lab") s.frame = Frame::kLab;
    else throw ConfigError("frame", "expected rotating or lab", in.line("frame"));
  }

  if (in.has("durations")) {
    const auto d = in.numbers("durations");
    if (d.size() != 5) throw ConfigError("durations", "expected five stage durations", in.line("durations"));
    std::copy(d.begin(), d.end(), s.stage_durations.begin());
  }
  static const char* kStageKeys[] = {"t_cavity1", "t_free1", "t_ramsey", "t_free2", "t_cavity2"};
  for (std::size_t k = 0; k < 5; ++k) {
    if (!in.has(kStageKeys[k])) continue;
    if (in.has("durations")) {
      throw ConfigError(kStageKeys[k], "conflicts with 'durations'", in.line(kStageKeys[k]));
    }
    s.stage_durations[k] = in.number(kStageKeys[k]);
  }

  for (int i = 1; i <= 2; ++i) {
    const std::string n = std::to_string(i);
    CavityField& f = s.field(i);
    const bool has_w = in.has("omega_" + n);
    const bool has_rabi = in.has("Omega_" + n);
    const bool has_det = in.has("Delta_" + n);
    if (has_rabi) f.rabi_frequency = in.number("Omega_" + n);
    if (has_det) f.detuning = in.number("Delta_" + n);
    if (has_w) {
      f.dispersive_frequency = in.number("omega_" + n);
      const double w = f.dispersive_frequency;
      if (has_rabi && !has_det) {
        if (w == 0.0) {
          if (*f.rabi_frequency != 0.0) {
            throw ConfigError("omega_" + n, "zero dispersive frequency with nonzero Omega_" + n,
                              in.line("omega_" + n));
          }
        } else {
          f.detuning = (*f.rabi_frequency) * (*f.rabi_frequency) / w;
        }
      } else if (!has_rabi && has_det) {
        const double r2 = w * (*f.detuning);
        if (r2 < 0.0) {
          throw ConfigError("omega_" + n, "sign inconsistent with Delta_" + n, in.line("omega_" + n));
        }
        f.rabi_frequency = std::sqrt(r2);
      } else if (!has_rabi && !has_det) {
        // Keep the default Rabi frequency and move the detuning.
        if (w == 0.0) {
          f.rabi_frequency = 0.0;
        } else {
          f.detuning = (*f.rabi_frequency) * (*f.rabi_frequency) / w;
        }
      }
    } else if (has_rabi || has_det) {
      if (*f.detuning == 0.0) throw ConfigError("Delta_" + n, "detuning is zero", in.line("Delta_" + n));
      f.dispersive_frequency = (*f.rabi_frequency) * (*f.rabi_frequency) / (*f.detuning);
    }
    f.cavity_frequency = in.has("omega_tilde_" + n) ? in.number("omega_tilde_" + n)
                                                    : s.atom_frequency - f.detuning.value_or(0.0);
    if (in.has("N_" + n)) f.truncation = in.count("N_" + n);
  }

  SweepSpec& sw = cfg.sweep;
  if (in.has("alpha")) sw.alpha = in.complexes("alpha");
  if (in.has("beta")) sw.beta = in.complexes("beta");
  std::array<RateAxis*, 2> axes = {&sw.g, &sw.q};
  for (int i = 1; i <= 2; ++i) {
    const std::string rel = i == 1 ? "g" : "q";
    const std::string abs = "gamma_" + std::to_string(i);
    RateAxis& axis = *axes[static_cast<std::size_t>(i - 1)];
    if (in.has(rel) && in.has(abs)) throw ConfigError(abs, "conflicts with '" + rel + "'", in.line(abs));
    if (in.has(rel)) {
      axis.relative = true;
      axis.values = in.numbers(rel);
    } else if (in.has(abs)) {
      axis.relative = false;
      axis.values = {in.number(abs)};
    }
    for (double v : axis.values) {
      if (v < 0.0) {
        const std::string key = in.has(rel) ? rel : abs;
        throw ConfigError(key, "decay rate is negative", in.line(key));
      }
    }
  }
  if (in.has("sample_dt")) {
    sw.sample_dt = in.number("sample_dt");
    if (!(sw.sample_dt > 0.0)) throw ConfigError("sample_dt", "must be positive", in.line("sample_dt"));
  }
  if (in.has("backend")) {
    try {
      sw.backend = parse_backend(in.text("backend"));
    } catch (const ConfigError&) {
      throw ConfigError("backend", "expected dense, branch or oracle", in.line("backend"));
    }
  }

  s = sweep_point(cfg, sw.alpha.front(), sw.beta.front(), sw.g.values.front(), sw.q.values.front());
  try {
    s.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(e.key(), e.message(), in.line(e.key()));
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream file(path);
  if (!file) throw ConfigError("", "cannot open config file " + path.string());
  std::stringstream buf;
  buf << file.rdbuf();
  return parse_config(buf.str());
}

Scenario sweep_point(const RunConfig& config, cd alpha, cd beta, double g, double q) {
  Scenario s = config.scenario;
  s.field(1).amplitude = alpha;
  s.field(2).amplitude = beta;
  s.field(1).decay_rate = config.sweep.g.relative ? g * s.field(1).dispersive_frequency : g;
  s.field(2).decay_rate = config.sweep.q.relative ? q * s.field(2).dispersive_frequency : q;
  return s;
}

std::string tuple_name(const SweepSpec& sweep, cd alpha, cd beta, double g, double q) {
  return "a" + format_complex(alpha) + "_b" + format_complex(beta) + "_" +
         (sweep.g.relative ? "g" : "G") + short_number(g) + "_" + (sweep.q.relative ? "q" : "Q") +
         short_number(q);
}

}  // namespace cqed
