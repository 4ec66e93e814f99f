#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "bdp/model.hpp"

using namespace bdp;

namespace {

ProcessSpec uniform_table(const StateWindow& w) {
  std::vector<double> lam(w.width()), mu(w.width());
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(0.5, 2.0);
  for (auto& v : lam) v = u(rng);
  for (auto& v : mu) v = u(rng);
  return ProcessSpec::table(w, lam, mu);
}

}  // namespace

TEST_CASE("state window invariants") {
  CHECK_THROWS_AS(StateWindow(3, 3), parameter_error);
  CHECK_THROWS_AS(StateWindow(5, 2), parameter_error);
  CHECK_THROWS_AS(StateWindow(0, 1), parameter_error);  // width 2 < 3
  const StateWindow w(-2, 2);
  CHECK(w.width() == 5);
  CHECK(w.contains(-2));
  CHECK(!w.contains(3));
  CHECK(w.interior(0));
  CHECK(!w.interior(-2));
  CHECK(w.index_of(-2) == 0);
}

TEST_CASE("constant rates are state independent") {
  const auto spec = ProcessSpec::constant(1.0, 2.0);
  const Rates r = spec.rates_at(17);
  CHECK(r.lambda == 1.0);
  CHECK(r.mu == 2.0);
  CHECK(!spec.domain().has_value());
  CHECK(spec.has_state(-1000000));
}

TEST_CASE("table lookup and out-of-domain") {
  const StateWindow w(-2, 2);
  std::vector<double> lam{1, 1, 1.5, 1, 1};
  std::vector<double> mu{2, 2, 1.5, 2, 2};
  const auto spec = ProcessSpec::table(w, lam, mu);
  CHECK(spec.rates_at(0).lambda == 1.5);
  CHECK(spec.rates_at(0).mu == 1.5);
  CHECK_THROWS_AS(spec.rates_at(5), domain_error);
  CHECK_THROWS_AS(spec.rates_at(-3), domain_error);
}

TEST_CASE("construction rejects non-positive rates and names states") {
  const StateWindow w(0, 4);
  std::vector<double> lam{1, 1, 1, 1, 1};
  std::vector<double> mu{1, 1, 1, 0.0, 1};  // mu_3 = 0: absorbing
  try {
    ProcessSpec::table(w, lam, mu);
    FAIL("expected validation_error");
  } catch (const validation_error& e) {
    CHECK(std::string(e.what()).find("state 3") != std::string::npos);
  }

  const StateWindow w2(-2, 2);
  std::vector<double> lam2{1, -0.5, 1, 1, 1};  // lambda_{-1} < 0
  std::vector<double> mu2{1, 1, 1, 1, 1};
  try {
    ProcessSpec::table(w2, lam2, mu2);
    FAIL("expected validation_error");
  } catch (const validation_error& e) {
    CHECK(std::string(e.what()).find("state -1") != std::string::npos);
  }
}

TEST_CASE("validate_rates reports every offending state") {
  const StateWindow w(0, 3);
  const auto report =
      validate_rates(w, {1, 0, 1, 1}, {1, 1, -2, 1});
  CHECK(!report.ok());
  REQUIRE(report.violations.size() == 2);
  CHECK(report.violations[0].state == 1);
  CHECK(report.violations[1].state == 2);
}

TEST_CASE("validate_spec covers window checks") {
  const auto spec = ProcessSpec::constant(1.0, 2.0);
  CHECK(validate_spec(spec, StateWindow(-10, 10)).ok());

  const auto table = uniform_table(StateWindow(-2, 2));
  const auto report = validate_spec(table, StateWindow(-4, 4));
  CHECK(!report.ok());
  CHECK(report.violations.size() == 4);  // -4,-3,3,4 uncovered
}

TEST_CASE("geometric ratio derives mu from lambda") {
  const StateWindow w(-1, 1);
  const auto spec = ProcessSpec::geometric_ratio(w, {1.0, 2.0, 4.0}, 0.5);
  CHECK(spec.rates_at(0).mu == doctest::Approx(1.0));
  CHECK(spec.rates_at(1).mu == doctest::Approx(2.0));
  CHECK(spec.rate_ratio() == 0.5);
  CHECK_THROWS_AS(ProcessSpec::geometric_ratio(w, {1, 1, 1}, -2.0),
                  parameter_error);
}

TEST_CASE("rates_at is referentially transparent and positive") {
  const auto spec = uniform_table(StateWindow(-20, 20));
  for (int n = -20; n <= 20; ++n) {
    const Rates a = spec.rates_at(n);
    const Rates b = spec.rates_at(n);
    CHECK(a.lambda == b.lambda);
    CHECK(a.mu == b.mu);
    CHECK(a.lambda > 0);
    CHECK(a.mu > 0);
  }
}

TEST_CASE("process file round trip: constant") {
  std::istringstream in(
      "# a constant process\n"
      "kind constant\n"
      "lambda 1.0\n"
      "mu 2.0\n");
  const auto spec = parse_process(in, "test");
  CHECK(spec.kind() == ProcessSpec::Kind::constant);
  CHECK(spec.rates_at(3).lambda == 1.0);

  std::ostringstream out;
  save_process(spec, out);
  std::istringstream in2(out.str());
  const auto spec2 = parse_process(in2, "round-trip");
  CHECK(spec2.rates_at(0).mu == 2.0);
}

TEST_CASE("process file round trip: table rows") {
  std::istringstream in(
      "kind table\n"
      "-1 1.25 0.5   # n lambda mu\n"
      "0 1.5 0.75\n"
      "1 1.75 1.0\n");
  const auto spec = parse_process(in, "test");
  CHECK(spec.domain() == StateWindow(-1, 1));
  CHECK(spec.rates_at(-1).lambda == 1.25);
  CHECK(spec.rates_at(1).mu == 1.0);

  std::ostringstream out;
  save_process(spec, out);
  std::istringstream in2(out.str());
  const auto spec2 = parse_process(in2, "round-trip");
  for (int n = -1; n <= 1; ++n) {
    CHECK(spec2.rates_at(n).lambda == spec.rates_at(n).lambda);
    CHECK(spec2.rates_at(n).mu == spec.rates_at(n).mu);
  }
}

TEST_CASE("table values round-trip through text exactly") {
  // 17 significant digits: even non-terminating decimals must come
  // back bit-identical.
  const StateWindow w(0, 2);
  const auto spec = ProcessSpec::table(
      w, {1.0 / 3.0, std::sqrt(2.0), 0.1}, {M_PI, 2.0 / 7.0, std::exp(1.0)});
  std::ostringstream out;
  save_process(spec, out);
  std::istringstream in(out.str());
  const auto spec2 = parse_process(in, "bitwise");
  for (int n = 0; n <= 2; ++n) {
    CHECK(spec2.rates_at(n).lambda == spec.rates_at(n).lambda);
    CHECK(spec2.rates_at(n).mu == spec.rates_at(n).mu);
  }
}

TEST_CASE("process file errors carry line numbers") {
  {
    std::istringstream in("kind constant\nlamda 1.0\nmu 2.0\n");
    try {
      parse_process(in, "test");
      FAIL("expected config_error");
    } catch (const config_error& e) {
      CHECK(e.line == 2);
      CHECK(std::string(e.what()).find("lamda") != std::string::npos);
    }
  }
  {
    std::istringstream in("kind table\n0 1 2\n0 1 2\n2 1 2\n");
    try {
      parse_process(in, "test");
      FAIL("expected config_error");
    } catch (const config_error& e) {
      CHECK(std::string(e.what()).find("duplicate") != std::string::npos);
    }
  }
  {
    std::istringstream in("kind table\n0 1 2\n1 1 2\n3 1 2\n");
    CHECK_THROWS_AS(parse_process(in, "test"), config_error);  // gap
  }
  {
    std::istringstream in("mu 2.0\n");
    CHECK_THROWS_AS(parse_process(in, "test"), config_error);  // no kind
  }
  {
    std::istringstream in("kind geometric_ratio\nc 2.0\n0 1 2\n1 1 2\n2 1 2\n");
    CHECK_THROWS_AS(parse_process(in, "test"), config_error);  // 3-field rows
  }
}

TEST_CASE("geometric process file") {
  std::istringstream in(
      "kind geometric_ratio\n"
      "c 2.0\n"
      "-1 1.0\n"
      "0 1.5\n"
      "1 2.0\n");
  const auto spec = parse_process(in, "test");
  CHECK(spec.rates_at(0).mu == doctest::Approx(3.0));
}
