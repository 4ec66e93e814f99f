#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "bdp/experiment.hpp"

using namespace bdp;

namespace {

ExperimentConfig parse_text(const std::string& text) {
  std::istringstream in(text);
  return parse_config_text(in, "inline-test");
}

const char* kReferenceConfig =
    "process.kind constant\n"
    "process.lambda 1.0\n"
    "process.mu 2.0\n"
    "nu.mode constant_ratio\n"
    "nu.beta 1.0\n"
    "window.lo -26\n"
    "window.hi 26\n"
    "k 0\n"
    "s 1\n"
    "n 2\n"
    "t_max 1.0\n"
    "grid 60\n"
    "rel_tol 1e-10\n";

}  // namespace

TEST_CASE("minimal config gets the documented defaults") {
  const auto cfg = parse_text(
      "process.kind constant\nprocess.lambda 1\nprocess.mu 2\n"
      "nu.mode constant_ratio\n");
  CHECK(cfg.rel_tol == 1e-10);
  CHECK(cfg.grid == 200);
  CHECK(cfg.trials == 100000);
  CHECK(cfg.seed == 42);
  CHECK(cfg.k == 0);
  CHECK(cfg.s == 1);
  CHECK(!cfg.window.has_value());
  CHECK(cfg.beta == 1.0);
  CHECK(cfg.tol_transition == 1e-8);
  const ProcessSpec spec = cfg.resolve_process();
  CHECK(spec.rates_at(0).mu == 2.0);
}

TEST_CASE("unknown keys are named with their line") {
  try {
    parse_text("process.kind constant\nlamda 1.0\n");
    FAIL("expected config_error");
  } catch (const config_error& e) {
    CHECK(e.line == 2);
    CHECK(std::string(e.what()).find("lamda") != std::string::npos);
  }
}

TEST_CASE("range violations are rejected at parse time") {
  CHECK_THROWS_AS(parse_text("nu.beta -1\n"), config_error);
  CHECK_THROWS_AS(parse_text("rel_tol 0.5\n"), config_error);
  CHECK_THROWS_AS(parse_text("grid 1\n"), config_error);
  CHECK_THROWS_AS(parse_text("trials 0\n"), config_error);
  CHECK_THROWS_AS(parse_text("t_max -2\n"), config_error);
  CHECK_THROWS_AS(parse_text("seed -5\n"), config_error);
  CHECK_THROWS_AS(parse_text("k 1\ns 1\n"), config_error);
  CHECK_THROWS_AS(parse_text("window.lo -5\n"), config_error);
  CHECK_THROWS_AS(
      parse_text("nu.mode recurrence\n"),  // d0 missing
      config_error);
  CHECK_THROWS_AS(parse_text("nu.mode neither\n"), config_error);
  CHECK_THROWS_AS(parse_text("process.kind table\n"), config_error);
}

TEST_CASE("config files load with paths resolved against their directory") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "bdp_cfg_test";
  fs::create_directories(dir);
  {
    std::ofstream proc(dir / "proc.cfg");
    proc << "kind constant\nlambda 1.5\nmu 3.0\n";
  }
  {
    std::ofstream cfg(dir / "exp.cfg");
    cfg << "process.file proc.cfg\nnu.mode constant_ratio\n";
  }
  const auto cfg = parse_config((dir / "exp.cfg").string());
  const ProcessSpec spec = cfg.resolve_process();
  CHECK(spec.rates_at(0).lambda == 1.5);
  fs::remove_all(dir);
}

TEST_CASE("verify passes on the constant-rate reference configuration") {
  const auto cfg = parse_text(kReferenceConfig);
  std::ostringstream log;
  const VerifyReport report = run_verify(cfg, log);
  CHECK(report.pass());
  REQUIRE(report.checks.size() == 5);

  CHECK(report.checks[0].name == "transition-identity");
  CHECK(report.checks[0].max_residual < 1e-8);
  CHECK(report.checks[1].name == "fpt-identity");
  CHECK(report.checks[1].max_residual < 1e-6);
  CHECK(report.checks[2].name == "crossing-relation");
  CHECK(report.checks[3].name == "crossing-quadrature");
  CHECK(report.checks[4].name == "renewal-identity");
  CHECK(log.str().find("PASS overall") != std::string::npos);
}

TEST_CASE("verify also passes with a recurrence-built nu") {
  std::string text = kReferenceConfig;
  text.replace(text.find("nu.mode constant_ratio"),
               std::string("nu.mode constant_ratio").size(),
               "nu.mode recurrence\nnu.nu0 2.0\nnu.d0 1.0");
  const auto cfg = parse_text(text);
  std::ostringstream log;
  const VerifyReport report = run_verify(cfg, log);
  CHECK(report.pass());
}

TEST_CASE("equal rates cannot be transformed by the closed-form family") {
  const auto cfg = parse_text(
      "process.kind constant\nprocess.lambda 2\nprocess.mu 2\n"
      "nu.mode constant_ratio\nwindow.lo -10\nwindow.hi 10\n");
  std::ostringstream log;
  try {
    run_verify(cfg, log);
    FAIL("expected parameter_error");
  } catch (const parameter_error& e) {
    CHECK(std::string(e.what()).find("non-constant") != std::string::npos);
  }
}

TEST_CASE("missing process is reported") {
  const auto cfg = parse_text("nu.mode constant_ratio\n");
  CHECK_THROWS_AS(cfg.resolve_process(), config_error);
}

TEST_CASE("verify passes on a general rate table with a recurrence nu") {
  namespace fs = std::filesystem;
  const StateWindow w(-30, 30);
  std::vector<double> lam(w.width()), mu(w.width());
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> u(0.9, 1.1);
  for (auto& v : lam) v = u(rng);
  for (auto& v : mu) v = u(rng);
  const auto spec = ProcessSpec::table(w, lam, mu);

  // nu_0 above the downward increment sum keeps the sequence positive.
  double down_sum = 0.0, prod = 1.0;
  for (int n = 0; n > w.lo; --n) {
    const Rates r = spec.rates_at(n);
    prod *= r.lambda / r.mu;
    down_sum += prod;
  }

  const fs::path dir = fs::temp_directory_path() / "bdp_verify_table";
  fs::create_directories(dir);
  {
    std::ofstream proc(dir / "table.cfg");
    save_process(spec, proc);
  }
  {
    std::ofstream cfg(dir / "exp.cfg");
    cfg << "process.file table.cfg\n"
        << "nu.mode recurrence\n"
        << "nu.nu0 " << 1.25 * down_sum << "\n"
        << "nu.d0 1.0\n"
        << "k 0\ns 1\nn 2\nt_max 0.5\ngrid 50\n";
  }
  const auto cfg = parse_config((dir / "exp.cfg").string());
  std::ostringstream log;
  const VerifyReport report = run_verify(cfg, log);
  CHECK(report.pass());
  // no closed-form family in play: the quadrature check is skipped
  CHECK(report.checks.size() == 4);
  fs::remove_all(dir);
}

TEST_CASE("verify rejects an invalid renewal ordering") {
  std::string text = kReferenceConfig;
  text += "\n";
  const auto pos = text.find("n 2");
  text.replace(pos, 3, "n 0");  // k < s but n < s: identity undefined
  const auto cfg = parse_text(text);
  std::ostringstream log;
  CHECK_THROWS_AS(run_verify(cfg, log), config_error);
}
