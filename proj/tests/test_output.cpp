#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "cqed/csv.hpp"
#include "cqed/errors.hpp"
#include "cqed/presets.hpp"

using namespace cqed;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

std::map<std::string, std::string> tree(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) out[fs::relative(e.path(), root).string()] = slurp(e.path());
  }
  return out;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream s(text);
  for (std::string l; std::getline(s, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST_CASE("number formatting") {
  CHECK(format_number(0.0) == "0");
  CHECK(format_number(-0.0) == "0");
  CHECK(format_number(1.0) == "1");
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(1.0 / 3.0) == "0.333333333333");
  CHECK(format_number(251.327412287) == "251.327412287");
  CHECK(format_number(1e-20) == "1e-20");
  CHECK(format_number(-2.5) == "-2.5");
}

TEST_CASE("records are clamped and formatted") {
  Observables obs;
  obs.c_af1 = -1e-17;
  obs.c_af2 = 1.0 + 1e-15;
  obs.c_f1f2 = 0.25;
  obs.discarded_weight = -0.0;
  obs.purity = 0.75;
  obs.flags = "discarded_weight";
  const auto r = make_record(2.5, obs);
  CHECK(r.c_af1 == 0.0);
  CHECK(r.c_af2 == 1.0);
  CHECK(r.c_f1f2 == 0.25);
  const ConcurrenceRecord rows[] = {r, make_record(3.0, Observables{})};
  CHECK(to_csv(rows) ==
        "t_us,C_AF1,C_AF2,C_F1F2,discarded_weight,purity,flags\n"
        "2.5,0,1,0.25,0,0.75,discarded_weight\n"
        "3,0,0,0,0,1,\n");
}

TEST_CASE("phase-space rows") {
  const PhaseSpacePoint rows[] = {{1.0, cd(0.5, -0.25), cd(-1, 0), 1.5}};
  CHECK(to_csv(rows) ==
        "t_us,re_alpha_e,im_alpha_e,re_alpha_g,im_alpha_g,chord\n"
        "1,0.5,-0.25,-1,0,1.5\n");
}

TEST_CASE("every emitted record satisfies the schema") {
  Scenario s;
  s.field(1).amplitude = 1.0;
  s.field(2).amplitude = 1.0;
  s.field(1).decay_rate = 0.5 * s.field(1).dispersive_frequency;
  s.field(2).decay_rate = 0.05 * s.field(2).dispersive_frequency;
  for (Backend b : {Backend::kBranch, Backend::kDense}) {
    RunSettings settings;
    settings.backend = b;
    const auto text = simulate_csv(s, 1.0, settings);
    const auto ls = lines(text);
    REQUIRE(ls.size() == 92);
    CHECK(ls[0] == kConcurrenceHeader);
    for (std::size_t i = 1; i < ls.size(); ++i) {
      std::vector<std::string> cells;
      std::stringstream row(ls[i]);
      for (std::string c; std::getline(row, c, ',');) cells.push_back(c);
      if (ls[i].back() == ',') cells.emplace_back();
      REQUIRE(cells.size() == 7);
      CHECK(std::stod(cells[0]) == doctest::Approx(static_cast<double>(i - 1)));
      for (int k = 1; k <= 3; ++k) {
        const double c = std::stod(cells[static_cast<std::size_t>(k)]);
        CHECK(c >= 0.0);
        CHECK(c <= 1.0);
      }
      CHECK(std::stod(cells[4]) >= 0.0);
      const double flagged_weight = std::stod(cells[4]);
      CHECK((flagged_weight >= 1e-3) == !cells[6].empty());
    }
    CHECK(text.find('\r') == std::string::npos);
  }
}

TEST_CASE("branch and dense CSV agree to printing precision on concurrences") {
  Scenario s;
  s.field(1).decay_rate = 0.05 * s.field(1).dispersive_frequency;
  RunSettings dense;
  dense.backend = Backend::kDense;
  const auto grid = uniform_grid(s.total_duration(), 10.0);
  const auto a = records(simulate(s, grid, Backend::kBranch));
  const auto b = records(simulate(s, grid, Backend::kDense));
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(std::abs(a[i].c_af1 - b[i].c_af1) < 1e-7);
    CHECK(std::abs(a[i].c_af2 - b[i].c_af2) < 1e-7);
    CHECK(std::abs(a[i].purity - b[i].purity) < 1e-7);
  }
}

TEST_CASE("write_file creates directories and uses newline endings") {
  TempDir dir("cqed_test_write");
  const auto p = dir.path / "a" / "b" / "x.csv";
  write_file(p, "h\n1\n");
  CHECK(slurp(p) == "h\n1\n");
  write_file(p, "short\n");
  CHECK(slurp(p) == "short\n");
}

TEST_CASE("sweep writes one file per tuple") {
  TempDir dir("cqed_test_sweep");
  const auto cfg = parse_config("alpha = 0.5, 1\nbeta = 0.5\ng = 0, 0.05\nq = 0.5\nsample_dt = 5\n");
  const auto summary = run_sweep(cfg, dir.path, {});
  CHECK(summary.files.size() == 4);
  for (const char* name : {"a0.5_b0.5_g0_q0.5.csv", "a0.5_b0.5_g0.05_q0.5.csv",
                           "a1_b0.5_g0_q0.5.csv", "a1_b0.5_g0.05_q0.5.csv"}) {
    CHECK(fs::exists(dir.path / name));
  }
  for (const auto& f : summary.files) CHECK(f.records == 19);
  CHECK(summary.flagged_records() == 0);

  // A tuple file matches the single-scenario output.
  const auto one = simulate_csv(sweep_point(cfg, 1.0, 0.5, 0.05, 0.5), 5.0, {});
  CHECK(slurp(dir.path / "a1_b0.5_g0.05_q0.5.csv") == one);
}

TEST_CASE("parallel sweeps write the same bytes") {
  TempDir serial("cqed_test_serial");
  TempDir parallel("cqed_test_parallel");
  const auto cfg = parse_config("alpha = 0.5, 2\nbeta = 1\ng = 0, 1\nq = 0, 0.5\nsample_dt = 2\n");
  run_sweep(cfg, serial.path, {});
  RunSettings four;
  four.jobs = 4;
  run_sweep(cfg, parallel.path, four);
  const auto a = tree(serial.path);
  CHECK(a.size() == 8);
  CHECK(a == tree(parallel.path));
}

TEST_CASE("presets are byte-deterministic") {
  TempDir first("cqed_test_preset1");
  TempDir second("cqed_test_preset2");
  for (std::string_view name : {"fig2", "fig4"}) {
    run_preset(name, first.path, {});
    RunSettings threaded;
    threaded.jobs = 3;
    run_preset(name, second.path, threaded);
  }
  const auto a = tree(first.path);
  CHECK(a.size() == 12 + 2 + 4);
  CHECK(a.count("fig2/a1_g0.csv") == 1);
  CHECK(a.count("fig2/phase_space_a1_g0.2.csv") == 1);
  CHECK(a.count("fig4/a0.5_b0.5_g0_q1.csv") == 1);
  CHECK(a == tree(second.path));
}

TEST_CASE("fig2 curve has the lossless landmarks") {
  TempDir dir("cqed_test_fig2");
  run_preset("fig2", dir.path, {});
  const auto ls = lines(slurp(dir.path / "fig2" / "a1_g0.csv"));
  REQUIRE(ls.size() == 1002);
  double peak = 0.0;
  for (std::size_t i = 1; i < ls.size(); ++i) peak = std::max(peak, std::stod(ls[i].substr(ls[i].find(',') + 1)));
  CHECK(peak == doctest::Approx(std::sqrt(1.0 - std::exp(-4.0))).epsilon(1e-4));
}

TEST_CASE("unknown preset") {
  TempDir dir("cqed_test_unknown");
  CHECK_THROWS_AS(run_preset("fig3", dir.path, {}), ConfigError);
  CHECK(preset_names().size() == 6);
}

TEST_CASE("explicit truncation and convergence") {
  Scenario s;
  s.field(1).amplitude = 1.0;
  s.field(1).decay_rate = 0.05 * s.field(1).dispersive_frequency;
  const auto grid = uniform_grid(s.total_duration(), 15.0);
  const auto run = converge_truncation(s, grid, Backend::kDense, 1e-6, 3, 10);
  CHECK(run.last_change < 1e-6);
  CHECK(run.iterations >= 1);
  CHECK(run.scenario.field(1).truncation == s.truncation(1) + 3 * run.iterations);
  const auto reference = simulate(run.scenario, grid, Backend::kBranch);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(std::abs(run.trajectory.points[i].observables.c_af1 - reference.points[i].observables.c_af1) <
          1e-6);
  }

  RunSettings small;
  small.backend = Backend::kDense;
  small.truncation = std::array<std::size_t, 2>{12, 12};
  CHECK_NOTHROW(simulate_csv(s, 15.0, small));
  small.truncation = std::array<std::size_t, 2>{2, 2};
  CHECK_THROWS_AS(simulate_csv(s, 15.0, small), TruncationTooSmall);
}
