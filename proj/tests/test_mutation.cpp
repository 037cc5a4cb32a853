#include <doctest.h>

#include <iostream>

#include "cqed/validation.hpp"

// Linked against a library whose dissipation coefficient has the wrong sign in
// its exponent. Quick validation has to notice.
TEST_CASE("quick validation rejects a corrupted dissipator") {
  const auto report = cqed::validate(cqed::ValidationLevel::kQuick);
  std::cout << report.text();
  CHECK_FALSE(report.passed());
  bool analytic_failed = false;
  for (const auto& c : report.checks) {
    if (c.name.find("analytic_vs_dense") != std::string::npos && !c.passed) analytic_failed = true;
  }
  CHECK(analytic_failed);
}
