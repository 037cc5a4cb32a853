#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "cqed/config.hpp"
#include "cqed/errors.hpp"

using namespace cqed;

namespace {

std::size_t error_line(std::string_view text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.line();
  }
  FAIL("no ConfigError");
  return 0;
}

std::string error_key(std::string_view text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.key();
  }
  FAIL("no ConfigError");
  return {};
}

}  // namespace

TEST_CASE("empty config gives the experimental defaults") {
  const auto cfg = parse_config("");
  const Scenario& s = cfg.scenario;
  for (int i = 1; i <= 2; ++i) {
    CHECK(s.field(i).dispersive_frequency == 6.25e-3);
    CHECK(*s.field(i).detuning == 0.1);
    CHECK(*s.field(i).rabi_frequency == 0.025);
    CHECK(s.field(i).decay_rate == 0.0);
    CHECK(s.field(i).amplitude == cd(0.5));
  }
  CHECK(s.stage_durations == std::array<double, 5>{30, 10, 10, 10, 30});
  CHECK(s.frame == Frame::kRotating);
  CHECK(cfg.sweep.alpha == std::vector<cd>{0.5});
  CHECK(cfg.sweep.beta == std::vector<cd>{0.5});
  CHECK(cfg.sweep.g.values == std::vector<double>{0.0});
  CHECK(cfg.sweep.q.values == std::vector<double>{0.0});
  CHECK(cfg.sweep.backend == Backend::kBranch);
  CHECK(parse_config("# only a comment\n\n   \n").scenario.total_duration() == 90.0);
}

TEST_CASE("values are read and cross-checked") {
  const auto cfg = parse_config(
      "alpha = 1, 2  # two amplitudes\n"
      "beta = 0.5+0.2i\n"
      "g = 0, 0.05\n"
      "gamma_2 = 0.001\n"
      "durations = 1000, 0, 0, 0, 0\n"
      "N_1 = 30\n"
      "frame = lab\n"
      "phi = 1.5\n"
      "backend = dense\n"
      "sample_dt = 2\n");
  CHECK(cfg.sweep.alpha == std::vector<cd>{1.0, 2.0});
  CHECK(cfg.sweep.beta.size() == 1);
  CHECK(cfg.sweep.beta[0] == cd(0.5, 0.2));
  CHECK(cfg.sweep.g.relative);
  CHECK(cfg.sweep.g.values == std::vector<double>{0.0, 0.05});
  CHECK_FALSE(cfg.sweep.q.relative);
  CHECK(cfg.sweep.q.values == std::vector<double>{0.001});
  CHECK(cfg.scenario.stage_durations[0] == 1000.0);
  CHECK(cfg.scenario.field(1).truncation == 30);
  CHECK(cfg.scenario.frame == Frame::kLab);
  CHECK(cfg.scenario.atomic_phase == 1.5);
  CHECK(cfg.sweep.backend == Backend::kDense);
  CHECK(cfg.sweep.sample_dt == 2.0);

  const auto p = sweep_point(cfg, 2.0, cd(0.5, 0.2), 0.05, 0.001);
  CHECK(p.field(1).decay_rate == doctest::Approx(0.05 * 6.25e-3));
  CHECK(p.field(2).decay_rate == 0.001);
  CHECK(p.field(1).amplitude == cd(2.0));
}

TEST_CASE("dispersive frequency follows Omega and Delta") {
  const auto a = parse_config("Omega_1 = 0.05\nDelta_1 = 0.2\n").scenario;
  CHECK(a.field(1).dispersive_frequency == doctest::Approx(0.0125));
  const auto b = parse_config("omega_2 = 0.0125\n").scenario;
  CHECK(b.field(2).dispersive_frequency == 0.0125);
  CHECK(*b.field(2).detuning == doctest::Approx(0.05));
  const auto c = parse_config("omega_1 = 6.25e-3\nOmega_1 = 0.025\nDelta_1 = 0.1\n").scenario;
  CHECK(c.field(1).dispersive_frequency == 6.25e-3);
}

TEST_CASE("invalid configs name the key and the line") {
  CHECK_THROWS_AS(parse_config("gamma_1 = -1"), ConfigError);
  CHECK(error_key("gamma_1 = -1") == "gamma_1");
  CHECK(error_line("\n\ngamma_1 = -1\n") == 3);
  CHECK(error_key("g = 0, -0.5") == "g");

  // omega = Omega^2 / Delta = 6.25e-3, not 5e-3.
  const char* inconsistent = "omega_1 = 5e-3\nOmega_1 = 0.025\nDelta_1 = 0.1\n";
  CHECK_THROWS_AS(parse_config(inconsistent), ConfigError);
  CHECK(error_key(inconsistent) == "omega_1");
  CHECK(error_line(inconsistent) == 1);

  CHECK(error_key("colour = red") == "colour");
  CHECK(error_line("alpha = 1\nalpha = 2\n") == 2);
  CHECK(error_line("alpha = 1\nthis line has no equals sign\n") == 2);
  CHECK(error_key("alpha = one") == "alpha");
  CHECK(error_key("N_1 = 2.5") == "N_1");
  CHECK(error_key("N_2 = 0") == "N_2");
  CHECK(error_key("durations = 1, 2, 3") == "durations");
  CHECK(error_key("durations = 30, 10, -10, 10, 30") != "");
  CHECK(error_key("durations = 30,10,10,10,30\nt_free1 = 5") == "t_free1");
  CHECK(error_key("frame = sideways") == "frame");
  CHECK(error_key("backend = gpu") == "backend");
  CHECK(error_key("sample_dt = 0") == "sample_dt");
  CHECK(error_key("g = 0.5\ngamma_1 = 0.001") == "gamma_1");
  CHECK(error_key("Delta_1 = 0") == "Delta_1");
  CHECK(error_key("omega_1 = -1e-3\nDelta_1 = 0.1") == "omega_1");
  CHECK(error_key("alpha = ") == "alpha");
}

TEST_CASE("error messages carry key and line") {
  try {
    parse_config("\ngamma_1 = -1\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    const std::string what = e.what();
    CHECK(what.find("gamma_1") != std::string::npos);
    CHECK(what.find('2') != std::string::npos);
  }
}

TEST_CASE("complex numbers") {
  CHECK(parse_complex("1") == cd(1, 0));
  CHECK(parse_complex(" -2.5 ") == cd(-2.5, 0));
  CHECK(parse_complex("0.5+0.2i") == cd(0.5, 0.2));
  CHECK(parse_complex("0.5-0.2i") == cd(0.5, -0.2));
  CHECK(parse_complex("2i") == cd(0, 2));
  CHECK(parse_complex("-i") == cd(0, -1));
  CHECK(parse_complex("1+i") == cd(1, 1));
  CHECK(parse_complex("1e-3+2e-3i") == cd(1e-3, 2e-3));
  CHECK(parse_complex("-1e+2-1e-1i") == cd(-100, -0.1));
  CHECK_THROWS_AS(parse_complex("abc"), ConfigError);
  CHECK_THROWS_AS(parse_complex(""), ConfigError);
  CHECK_THROWS_AS(parse_complex("1+xi"), ConfigError);
}

TEST_CASE("tuple names") {
  SweepSpec rel;
  CHECK(tuple_name(rel, 0.5, 1.0, 0.05, 0.0) == "a0.5_b1_g0.05_q0");
  CHECK(tuple_name(rel, cd(0.5, 0.2), cd(1, -1), 1.0, 0.5) == "a0.5+0.2i_b1-1i_g1_q0.5");
  SweepSpec abs;
  abs.g.relative = false;
  abs.q.relative = false;
  CHECK(tuple_name(abs, 2.0, 2.0, 0.001, 0.0) == "a2_b2_G0.001_Q0");
}

TEST_CASE("backend names round trip") {
  for (Backend b : {Backend::kDense, Backend::kBranch, Backend::kOracle}) {
    CHECK(parse_backend(to_string(b)) == b);
  }
  CHECK_THROWS_AS(parse_backend("fast"), ConfigError);
}

TEST_CASE("load_config reads files") {
  const auto dir = std::filesystem::temp_directory_path() / "cqed_test_config";
  std::filesystem::create_directories(dir);
  const auto path = dir / "run.cfg";
  {
    std::ofstream f(path);
    f << "alpha = 2\nq = 1\n";
  }
  const auto cfg = load_config(path);
  CHECK(cfg.sweep.alpha == std::vector<cd>{2.0});
  CHECK(cfg.sweep.q.values == std::vector<double>{1.0});
  CHECK_THROWS_AS(load_config(dir / "missing.cfg"), ConfigError);
  std::filesystem::remove_all(dir);
}
