#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cfloat>
#include <cmath>
#include <random>

#include "bdp/bessel.hpp"
#include "bdp/errors.hpp"

using namespace bdp;

namespace {

// Brute-force oracle: 20 terms of I_k(2z) = sum z^{k+2j}/(j!(k+j)!),
// independent of the production stopping rule.
double brute_force_ik(int k, double two_z, int terms = 20) {
  const double z = 0.5 * two_z;
  double sum = 0.0;
  for (int j = 0; j < terms; ++j) {
    double term = 1.0;
    for (int i = 1; i <= j; ++i) term *= z / i;       // z^j / j!
    for (int i = 1; i <= k + j; ++i) term *= z / i;   // z^{k+j} / (k+j)!
    sum += term;
  }
  return sum;
}

}  // namespace

TEST_CASE("values at zero argument") {
  CHECK(bessel_i(0, 0.0) == 1.0);
  CHECK(bessel_i(3, 0.0) == 0.0);
  CHECK(bessel_i(-2, 0.0) == 0.0);
  CHECK(bessel_i_scaled(0, 0.0) == 1.0);
}

TEST_CASE("integer-order symmetry") {
  CHECK(bessel_i(-3, 4.2) == bessel_i(3, 4.2));
  std::mt19937 rng(5);
  std::uniform_int_distribution<int> order(-20, 20);
  std::uniform_real_distribution<double> arg(0.0, 50.0);
  for (int i = 0; i < 200; ++i) {
    const int k = order(rng);
    const double x = arg(rng);
    const double a = bessel_i(k, x);
    const double b = bessel_i(-k, x);
    CHECK(std::fabs(a - b) <= 2.0 * DBL_EPSILON * std::fabs(a));
  }
}

TEST_CASE("I_1(2) against the brute-force series") {
  const double oracle = brute_force_ik(1, 2.0);
  const double value = bessel_i(1, 2.0);
  CHECK(std::fabs(value - oracle) <= 1e-14 * oracle);
  // and the independently summed reference digits
  CHECK(value == doctest::Approx(1.5906368546373291).epsilon(1e-15));
}

TEST_CASE("scaled and unscaled values agree below the overflow guard") {
  for (const double x : {0.5, 3.0, 40.0, 250.0, 599.0}) {
    for (const int k : {0, 1, 7}) {
      const double unscaled = bessel_i(k, x);
      const double scaled = bessel_i_scaled(k, x);
      CHECK(scaled == doctest::Approx(std::exp(-x) * unscaled).epsilon(1e-13));
    }
  }
}

TEST_CASE("three-term recurrence holds across both evaluation regimes") {
  // I_{k-1}(x) - I_{k+1}(x) = (2k/x) I_k(x), scaled through by e^{-x}.
  for (const double x : {1.5, 80.0, 599.0, 601.0, 2500.0, 30000.0}) {
    for (const int k : {1, 3, 10}) {
      const double lhs = bessel_i_scaled(k - 1, x) - bessel_i_scaled(k + 1, x);
      const double rhs = (2.0 * k / x) * bessel_i_scaled(k, x);
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-11));
    }
  }
}

TEST_CASE("large-argument scaled values match the asymptotic expansion") {
  // e^{-x} I_0(x) ~ (2 pi x)^{-1/2} (1 + 1/(8x) + 9/(128 x^2));
  // the neglected term is O(x^-3).
  for (const double x : {1e3, 1e4, 1e5}) {
    const double asym = (1.0 + 1.0 / (8.0 * x) + 9.0 / (128.0 * x * x)) /
                        std::sqrt(2.0 * M_PI * x);
    CHECK(bessel_i_scaled(0, x) == doctest::Approx(asym).epsilon(1e-9));
  }
}

TEST_CASE("huge orders underflow to zero instead of failing") {
  CHECK(bessel_i_scaled(5000, 10.0) == 0.0);
  CHECK(bessel_i(5000, 10.0) == 0.0);
}

TEST_CASE("domain guards") {
  CHECK_THROWS_AS(bessel_i(0, -1.0), domain_error);
  CHECK_THROWS_AS(bessel_i(0, 700.0), domain_error);  // unscaled overflow zone
  CHECK_NOTHROW(bessel_i_scaled(0, 700.0));
}

TEST_CASE("evaluation metadata") {
  const BesselEval ev = bessel_i_eval(2, 10.0);
  CHECK(ev.order == 2);
  CHECK(ev.argument == 10.0);
  CHECK(ev.terms_used > 3);
  CHECK(ev.truncation_bound >= 0.0);
  CHECK(ev.truncation_bound < 1e-15);
  CHECK(ev.value > 0.0);
}
