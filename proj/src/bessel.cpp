#include "bdp/bessel.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>

#include "bdp/csv.hpp"
#include "bdp/errors.hpp"

namespace bdp {

namespace {

constexpr double kRelStop = 1e-16;
constexpr int kTermCap = 100000;
// Above this argument the unscaled value is within a couple of orders
// of magnitude of double overflow (e^709), so only the scaled product
// is evaluated.
constexpr double kUnscaledLimit = 600.0;

// Direct summation; safe while I_k(x) itself fits in a double.
BesselEval eval_direct(int m, double x) {
  const double z = 0.5 * x;
  BesselEval ev{m, x, 0.0, 0.0, 0, 0.0};

  // term_0 = z^m / m!, built as a product of z/i factors to dodge
  // intermediate overflow for large orders.
  double term = 1.0;
  for (int i = 1; i <= m; ++i) term *= z / i;
  if (term == 0.0) {
    // Order so far above the argument that even the leading (and
    // largest) term underflows; the value is zero to double precision.
    ev.terms_used = 1;
    return ev;
  }

  double sum = term;
  int j = 0;
  while (true) {
    ++j;
    if (j > kTermCap)
      throw accuracy_error("Bessel series did not converge within " +
                           std::to_string(kTermCap) + " terms at order " +
                           std::to_string(m) + ", argument " + csv::fmt(x));
    term *= (z * z) / (static_cast<double>(j) * (m + j));
    if (term < kRelStop * sum) {
      ev.truncation_bound = term / sum;
      break;
    }
    sum += term;
  }
  ev.terms_used = j;
  ev.value = sum;
  ev.scaled_value = std::exp(-x) * sum;
  return ev;
}

// Large arguments: work relative to the peak term so nothing
// overflows; one log evaluation anchors the absolute scale.
BesselEval eval_scaled_peak(int m, double x) {
  const double z = 0.5 * x;
  BesselEval ev{m, x, 0.0,
                std::numeric_limits<double>::infinity(), 0, 0.0};

  // The term ratio z^2 / ((j+1)(m+j+1)) crosses 1 near the positive
  // root of (j+1)(m+j+1) = z^2.
  const double b = m + 2.0;
  double jpeak_f = 0.5 * (-b + std::sqrt(b * b + 4.0 * (z * z - (m + 1.0))));
  const long jpeak = std::max(0L, std::lround(jpeak_f));

  const double log_peak = -x + (m + 2.0 * jpeak) * std::log(z) -
                          std::lgamma(jpeak + 1.0) -
                          std::lgamma(m + jpeak + 1.0);

  // Sum terms relative to the peak in both directions.
  double sum = 1.0;
  int terms = 1;
  double rel = 1.0;
  for (long j = jpeak + 1;; ++j) {
    rel *= (z * z) / (static_cast<double>(j) * (m + j));
    if (rel < kRelStop * sum) {
      ev.truncation_bound = rel / sum;
      break;
    }
    sum += rel;
    if (++terms > kTermCap)
      throw accuracy_error("Bessel series did not converge within " +
                           std::to_string(kTermCap) + " terms at order " +
                           std::to_string(m) + ", argument " + csv::fmt(x));
  }
  rel = 1.0;
  for (long j = jpeak; j >= 1; --j) {
    rel *= (static_cast<double>(j) * (m + j)) / (z * z);
    if (rel < kRelStop * sum) break;
    sum += rel;
    ++terms;
  }

  ev.terms_used = terms;
  ev.scaled_value = std::exp(log_peak + std::log(sum));
  return ev;
}

}  // namespace

BesselEval bessel_i_eval(int order, double x) {
  if (!(x >= 0.0))
    throw domain_error("Bessel argument must be >= 0, got " + csv::fmt(x));
  const int m = std::abs(order);

  if (x == 0.0) {
    const double v = (m == 0) ? 1.0 : 0.0;
    return BesselEval{order, x, v, v, 1, 0.0};
  }
  BesselEval ev =
      (x < kUnscaledLimit) ? eval_direct(m, x) : eval_scaled_peak(m, x);
  ev.order = order;
  return ev;
}

double bessel_i(int order, double x) {
  if (x >= kUnscaledLimit)
    throw domain_error("unscaled Bessel evaluation is limited to x < " +
                       csv::fmt(kUnscaledLimit) +
                       " (near double overflow); use bessel_i_scaled");
  return bessel_i_eval(order, x).value;
}

double bessel_i_scaled(int order, double x) {
  return bessel_i_eval(order, x).scaled_value;
}

}  // namespace bdp
