#pragma once

#include <functional>

namespace bdp {

struct QuadratureResult {
  double value;
  double error_estimate;  // accumulated pairwise rule differences
  long evaluations;
};

// Adaptive quadrature with an embedded Gauss 7 / Gauss 15 pair:
// each panel is accepted when the two rules agree within its share of
// the absolute tolerance, otherwise bisected. Node tables are computed
// once from the Legendre recurrences. Throws accuracy_error when the
// recursion depth limit is hit before the tolerance is met.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f,
                                    double a, double b, double abs_tol,
                                    int max_depth = 48);

}  // namespace bdp
