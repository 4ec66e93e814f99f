#pragma once

namespace bdp {

// One evaluation of the modified Bessel function of the first kind at
// integer order, via the ascending series
//
//   I_k(2z) = sum_j z^{k+2j} / (j! (k+j)!)
//
// Negative orders use the integer-order symmetry I_{-k} = I_k. The
// series is summed until the next term drops below 1e-16 of the
// partial sum; `terms_used` counts the terms actually added and
// `truncation_bound` is the first neglected term relative to the sum.
struct BesselEval {
  int order;
  double argument;      // x, the full argument of I_k(x)
  double scaled_value;  // e^{-x} I_k(x); always representable
  double value;         // I_k(x); +inf when it exceeds double range
  int terms_used;
  double truncation_bound;
};

BesselEval bessel_i_eval(int order, double x);

// I_k(x) itself. Exposed for small arguments only (x < 600): beyond
// that the unscaled value approaches double overflow and every
// consumer should use the scaled product instead.
double bessel_i(int order, double x);

// e^{-x} I_k(x), valid for all x >= 0. This is the quantity the
// constant-rate transition and first-passage formulas consume.
double bessel_i_scaled(int order, double x);

}  // namespace bdp
