#include "bdp/quadrature.hpp"

#include <cfloat>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "bdp/csv.hpp"
#include "bdp/errors.hpp"

namespace bdp {

namespace {

struct GaussRule {
  std::vector<double> nodes;    // on (-1, 1)
  std::vector<double> weights;
};

// Legendre P_n and P_{n-1} at x.
std::pair<double, double> legendre(int n, double x) {
  double p0 = 1.0, p1 = x;
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  return {p1, p0};
}

GaussRule make_rule(int n) {
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    for (int iter = 0; iter < 100; ++iter) {
      const auto [pn, pn1] = legendre(n, x);
      const double dpn = n * (x * pn - pn1) / (x * x - 1.0);
      const double dx = pn / dpn;
      x -= dx;
      if (std::fabs(dx) < 1e-15) break;
    }
    const auto [pn, pn1] = legendre(n, x);
    const double dpn = n * (x * pn - pn1) / (x * x - 1.0);
    rule.nodes[i] = x;
    rule.weights[i] = 2.0 / ((1.0 - x * x) * dpn * dpn);
  }
  return rule;
}

double apply_rule(const GaussRule& rule, const std::function<double(double)>& f,
                  double a, double b) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double sum = 0.0;
  for (size_t i = 0; i < rule.nodes.size(); ++i)
    sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
  return half * sum;
}

struct Worker {
  const std::function<double(double)>& f;
  const GaussRule& low;
  const GaussRule& high;
  int max_depth;
  long evaluations = 0;
  double error_sum = 0.0;

  double panel(double a, double b, double tol, int depth) {
    const double coarse = apply_rule(low, f, a, b);
    const double fine = apply_rule(high, f, a, b);
    evaluations += static_cast<long>(low.nodes.size() + high.nodes.size());
    const double err = std::fabs(fine - coarse);
    if (err <= tol || b - a < 16.0 * DBL_EPSILON * std::fabs(a)) {
      error_sum += err;
      return fine;
    }
    if (depth >= max_depth)
      throw accuracy_error(
          "adaptive quadrature hit depth " + std::to_string(max_depth) +
          " on [" + csv::fmt(a) + "," + csv::fmt(b) +
          "] without reaching tolerance (panel error " + csv::fmt(err) + ")");
    const double mid = 0.5 * (a + b);
    return panel(a, mid, 0.5 * tol, depth + 1) +
           panel(mid, b, 0.5 * tol, depth + 1);
  }
};

}  // namespace

QuadratureResult integrate_adaptive(const std::function<double(double)>& f,
                                    double a, double b, double abs_tol,
                                    int max_depth) {
  if (!(abs_tol > 0)) throw parameter_error("quadrature tolerance must be > 0");
  if (a == b) return {0.0, 0.0, 0};
  static const GaussRule g7 = make_rule(7);
  static const GaussRule g15 = make_rule(15);
  Worker w{f, g7, g15, max_depth};
  const double value = w.panel(a, b, abs_tol, 0);
  return {value, w.error_sum, w.evaluations};
}

}  // namespace bdp
