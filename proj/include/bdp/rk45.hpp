#pragma once

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>
#include <vector>

#include "bdp/errors.hpp"

namespace bdp {

struct Rk45Options {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double max_step = std::numeric_limits<double>::infinity();
  long max_steps = 20'000'000;
};

// Adaptive Dormand-Prince 5(4) pair with the standard fourth-order
// continuous extension. The right-hand side is a callable
// f(t, y, dydt); `observe(i, y_at_times_i)` fires for every entry of
// the sorted grid `times` as integration passes it, using the dense
// interpolant rather than forcing steps onto the grid.
//
// Runge-Kutta updates are linear in the stage values, so linear
// invariants of the right-hand side (total probability mass here) are
// preserved to rounding.
template <class Rhs, class Observer>
void rk45_integrate(Rhs&& f, std::vector<double> y,
                    const std::vector<double>& times, const Rk45Options& opt,
                    Observer&& observe) {
  if (times.empty()) return;
  for (size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1]))
      throw parameter_error("time grid must be strictly increasing");
  if (!(opt.rel_tol > 0) || !(opt.abs_tol > 0))
    throw parameter_error("integration tolerances must be > 0");

  const size_t n = y.size();
  double t = times.front();
  size_t next_obs = 0;

  // Grid may start exactly at the initial time.
  if (times[next_obs] == t) observe(next_obs++, y);
  if (next_obs == times.size()) return;
  const double t_end = times.back();

  // Butcher tableau, RK5(4)7M.
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5,
                          c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                          a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                          a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695,
                          e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                          e6 = 22.0 / 525, e7 = -1.0 / 40;
  // Dense-output weights.
  static constexpr double d1 = -12715105075.0 / 11282082432.0,
                          d3 = 87487479700.0 / 32700410799.0,
                          d4 = -10690763975.0 / 1880347072.0,
                          d5 = 701980252875.0 / 199316789632.0,
                          d6 = -1453857185.0 / 822651844.0,
                          d7 = 69997945.0 / 29380423.0;

  std::vector<double> k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n);
  std::vector<double> y_stage(n), y_new(n), y_dense(n);
  std::vector<double> rc1(n), rc2(n), rc3(n), rc4(n), rc5(n);

  f(t, y, k1);

  // Initial step size from the two-derivative heuristic.
  double h;
  {
    double d0 = 0, dd1 = 0;
    for (size_t i = 0; i < n; ++i) {
      const double sc = opt.abs_tol + opt.rel_tol * std::fabs(y[i]);
      d0 += (y[i] / sc) * (y[i] / sc);
      dd1 += (k1[i] / sc) * (k1[i] / sc);
    }
    d0 = std::sqrt(d0 / n);
    dd1 = std::sqrt(dd1 / n);
    double h0 = (d0 < 1e-10 || dd1 < 1e-10) ? 1e-6 : 0.01 * d0 / dd1;
    h0 = std::min(h0, t_end - t);
    for (size_t i = 0; i < n; ++i) y_stage[i] = y[i] + h0 * k1[i];
    f(t + h0, y_stage, k2);
    double d2 = 0;
    for (size_t i = 0; i < n; ++i) {
      const double sc = opt.abs_tol + opt.rel_tol * std::fabs(y[i]);
      const double df = (k2[i] - k1[i]) / sc;
      d2 += df * df;
    }
    d2 = std::sqrt(d2 / n) / h0;
    const double dmax = std::max(dd1, d2);
    const double h1 =
        (dmax <= 1e-15) ? std::max(1e-6, h0 * 1e-3)
                        : std::pow(0.01 / dmax, 0.2);
    h = std::min({100.0 * h0, h1, opt.max_step, t_end - t});
  }

  long steps = 0;
  bool rejected_last = false;
  while (t < t_end) {
    if (++steps > opt.max_steps)
      throw accuracy_error("step limit exceeded after " +
                           std::to_string(opt.max_steps) + " steps at t = " +
                           std::to_string(t));
    if (h < 16.0 * DBL_EPSILON * std::max(std::fabs(t), 1.0))
      throw accuracy_error("step size underflow at t = " + std::to_string(t));
    h = std::min(h, t_end - t);

    for (size_t i = 0; i < n; ++i) y_stage[i] = y[i] + h * a21 * k1[i];
    f(t + c2 * h, y_stage, k2);
    for (size_t i = 0; i < n; ++i)
      y_stage[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    f(t + c3 * h, y_stage, k3);
    for (size_t i = 0; i < n; ++i)
      y_stage[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    f(t + c4 * h, y_stage, k4);
    for (size_t i = 0; i < n; ++i)
      y_stage[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] +
                               a54 * k4[i]);
    f(t + c5 * h, y_stage, k5);
    for (size_t i = 0; i < n; ++i)
      y_stage[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] +
                               a64 * k4[i] + a65 * k5[i]);
    f(t + h, y_stage, k6);
    for (size_t i = 0; i < n; ++i)
      y_new[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] +
                             b5 * k5[i] + b6 * k6[i]);
    f(t + h, y_new, k7);  // FSAL stage

    double err = 0;
    for (size_t i = 0; i < n; ++i) {
      const double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] +
                            e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      const double sc = opt.abs_tol +
                        opt.rel_tol * std::max(std::fabs(y[i]),
                                               std::fabs(y_new[i]));
      err += (e / sc) * (e / sc);
    }
    err = std::sqrt(err / n);

    if (err <= 1.0) {
      // Dense coefficients for this step, then emit any grid times
      // inside (t, t+h].
      bool need_dense = next_obs < times.size() && times[next_obs] <= t + h;
      if (need_dense) {
        for (size_t i = 0; i < n; ++i) {
          const double ydiff = y_new[i] - y[i];
          const double bspl = h * k1[i] - ydiff;
          rc1[i] = y[i];
          rc2[i] = ydiff;
          rc3[i] = bspl;
          rc4[i] = ydiff - h * k7[i] - bspl;
          rc5[i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] +
                        d6 * k6[i] + d7 * k7[i]);
        }
        while (next_obs < times.size() && times[next_obs] <= t + h) {
          const double theta = (times[next_obs] - t) / h;
          const double om = 1.0 - theta;
          for (size_t i = 0; i < n; ++i)
            y_dense[i] =
                rc1[i] +
                theta * (rc2[i] + om * (rc3[i] + theta * (rc4[i] + om * rc5[i])));
          observe(next_obs, y_dense);
          ++next_obs;
        }
      }
      t += h;
      y.swap(y_new);
      k1.swap(k7);
      const double fac =
          std::clamp(0.9 * std::pow(err, -0.2), 0.2,
                     rejected_last ? 1.0 : 5.0);
      h = std::min(h * fac, opt.max_step);
      rejected_last = false;
      if (next_obs == times.size()) return;
    } else {
      h *= std::clamp(0.9 * std::pow(err, -0.2), 0.2, 1.0);
      rejected_last = true;
    }
  }
}

}  // namespace bdp
