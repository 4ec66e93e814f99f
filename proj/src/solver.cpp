#include "bdp/solver.hpp"

#include <cmath>
#include <numeric>

#include "bdp/csv.hpp"
#include "bdp/rk45.hpp"

namespace bdp {

namespace {

void check_rel_tol(double rel_tol) {
  if (!(rel_tol >= 1e-13 && rel_tol <= 1e-6))
    throw parameter_error("rel_tol must lie in [1e-13, 1e-6], got " +
                          csv::fmt(rel_tol));
}

void check_times(const std::vector<double>& times) {
  if (times.empty()) throw parameter_error("time grid is empty");
  if (times.front() != 0.0)
    throw parameter_error("time grid must start at 0, got " +
                          csv::fmt(times.front()));
  for (size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1]))
      throw parameter_error("time grid must be strictly increasing");
}

void check_validated(const ProcessSpec& spec, const StateWindow& window) {
  auto report = validate_spec(spec, window);
  if (!report.ok()) throw validation_error(report.to_string());
}

Rk45Options solver_options(double rel_tol) {
  Rk45Options opt;
  opt.rel_tol = rel_tol;
  // The absolute tolerance guards the near-zero tail states; it sits
  // four decades below rel_tol so that tail undershoot stays well
  // inside the 1e-12 mass-accounting budget.
  opt.abs_tol = std::max(1e-16, rel_tol * 1e-4);
  return opt;
}

}  // namespace

double TransitionSlice::mass_error(size_t ti) const {
  const double total =
      std::accumulate(values[ti].begin(), values[ti].end(), 0.0);
  return total + deficit[ti] - 1.0;
}

TridiagonalGenerator::TridiagonalGenerator(const ProcessSpec& spec,
                                           const StateWindow& window)
    : window_(window) {
  check_validated(spec, window);
  lambda_.resize(window.width());
  mu_.resize(window.width());
  for (int n = window.lo; n <= window.hi; ++n) {
    const Rates r = spec.rates_at(n);
    lambda_[window.index_of(n)] = r.lambda;
    mu_[window.index_of(n)] = r.mu;
  }
}

void TridiagonalGenerator::make_absorbing(int s) {
  if (!window_.contains(s))
    throw domain_error("absorbing state " + std::to_string(s) +
                       " outside the window");
  lambda_[window_.index_of(s)] = 0.0;
  mu_[window_.index_of(s)] = 0.0;
}

void TridiagonalGenerator::apply(const std::vector<double>& p,
                                 std::vector<double>& dpdt) const {
  const size_t n = lambda_.size();
  for (size_t i = 0; i < n; ++i) {
    double v = -(lambda_[i] + mu_[i]) * p[i];
    if (i > 0) v += lambda_[i - 1] * p[i - 1];
    if (i + 1 < n) v += mu_[i + 1] * p[i + 1];
    dpdt[i] = v;
  }
}

double TridiagonalGenerator::edge_outflux(const std::vector<double>& p) const {
  // p may carry trailing bookkeeping slots (deficit); index the window
  // states explicitly.
  return lambda_.back() * p[lambda_.size() - 1] + mu_.front() * p[0];
}

double TridiagonalGenerator::column_sum(int n) const {
  const int i = window_.index_of(n);
  double sum = -(lambda_[i] + mu_[i]);
  if (n + 1 <= window_.hi) sum += lambda_[i];  // flow into n+1
  if (n - 1 >= window_.lo) sum += mu_[i];      // flow into n-1
  return sum;
}

TridiagonalGenerator build_generator(const ProcessSpec& spec,
                                     const StateWindow& window) {
  return TridiagonalGenerator(spec, window);
}

TransitionSlice solve_forward(const ProcessSpec& spec,
                              const StateWindow& window, int k,
                              const std::vector<double>& times,
                              double rel_tol) {
  check_rel_tol(rel_tol);
  check_times(times);
  if (!window.interior(k))
    throw domain_error("initial state " + std::to_string(k) +
                       " must lie strictly inside the window [" +
                       std::to_string(window.lo) + "," +
                       std::to_string(window.hi) + "]");
  const TridiagonalGenerator gen(spec, window);
  const size_t width = static_cast<size_t>(window.width());

  // State layout: p over the window, then the accumulated deficit.
  // The extended system conserves total mass exactly, and Runge-Kutta
  // steps preserve that linear invariant to rounding.
  std::vector<double> y0(width + 1, 0.0);
  y0[window.index_of(k)] = 1.0;

  TransitionSlice slice{window, k, times, {}, {}, 0.0};
  slice.values.assign(times.size(), std::vector<double>(width, 0.0));
  slice.deficit.assign(times.size(), 0.0);

  // gen.apply touches only the first `width` entries of y and dydt;
  // the trailing slot carries the deficit.
  auto rhs = [&gen, width](double, const std::vector<double>& y,
                           std::vector<double>& dydt) {
    gen.apply(y, dydt);
    dydt[width] = gen.edge_outflux(y);
  };

  try {
    rk45_integrate(rhs, y0, times, solver_options(rel_tol),
                   [&](size_t ti, const std::vector<double>& y) {
                     for (size_t i = 0; i < width; ++i) {
                       double v = y[i];
                       if (v < 0.0) {
                         slice.min_undershoot =
                             std::min(slice.min_undershoot, v);
                         v = 0.0;
                       }
                       slice.values[ti][i] = v;
                     }
                     slice.deficit[ti] = std::max(y[width], 0.0);
                   });
  } catch (const accuracy_error& e) {
    throw accuracy_error(std::string(e.what()) +
                         "; the truncated system resisted integration - "
                         "widen the window or reduce the horizon");
  }
  return slice;
}

namespace {

// Sub-window between the truncation edge on k's side and s.
StateWindow absorbing_side(const StateWindow& window, int k, int s) {
  return (k < s) ? StateWindow(window.lo, s) : StateWindow(s, window.hi);
}

}  // namespace

FPTDensity fpt_numeric(const ProcessSpec& spec, const StateWindow& window,
                       int k, int s, const std::vector<double>& times,
                       double rel_tol) {
  check_rel_tol(rel_tol);
  check_times(times);
  if (k == s)
    throw domain_error(
        "first-passage problem needs distinct start and target states");
  if (!window.interior(k) || !window.interior(s))
    throw domain_error("states " + std::to_string(k) + " and " +
                       std::to_string(s) +
                       " must lie strictly inside the window");

  const StateWindow sub = absorbing_side(window, k, s);
  TridiagonalGenerator gen(spec, sub);
  gen.make_absorbing(s);
  const size_t width = static_cast<size_t>(sub.width());
  const size_t si = static_cast<size_t>(sub.index_of(s));
  // Inflow into s comes from its neighbour on k's side.
  const int feeder = (k < s) ? s - 1 : s + 1;
  const size_t fi = static_cast<size_t>(sub.index_of(feeder));
  const double feed_rate = (k < s) ? gen.lambda_at(feeder) : gen.mu_at(feeder);

  std::vector<double> y0(width + 1, 0.0);
  y0[sub.index_of(k)] = 1.0;

  FPTDensity out;
  out.k = k;
  out.s = s;
  out.times = times;
  out.density.assign(times.size(), 0.0);
  out.absorbed_mass.assign(times.size(), 0.0);

  auto rhs = [&gen, width](double, const std::vector<double>& y,
                           std::vector<double>& dydt) {
    gen.apply(y, dydt);
    dydt[width] = gen.edge_outflux(y);
  };

  double final_deficit = 0.0;
  try {
    rk45_integrate(rhs, y0, times, solver_options(rel_tol),
                   [&](size_t ti, const std::vector<double>& y) {
                     double feed = y[fi];
                     double absorbed = y[si];
                     if (feed < 0.0) {
                       out.min_undershoot = std::min(out.min_undershoot, feed);
                       feed = 0.0;
                     }
                     if (absorbed < 0.0) {
                       out.min_undershoot =
                           std::min(out.min_undershoot, absorbed);
                       absorbed = 0.0;
                     }
                     out.density[ti] = feed_rate * feed;
                     out.absorbed_mass[ti] = absorbed;
                     final_deficit = std::max(y[width], 0.0);
                   });
  } catch (const accuracy_error& e) {
    throw accuracy_error(std::string(e.what()) +
                         "; the truncated system resisted integration - "
                         "widen the window or reduce the horizon");
  }

  out.deficit = final_deficit;
  out.censored_mass = 1.0 - out.absorbed_mass.back();
  if (final_deficit > 10.0 * rel_tol)
    throw accuracy_error(
        "window too small for the first-passage solve: deficit " +
        csv::fmt(final_deficit) + " through the far edge exceeds 10*rel_tol " +
        "= " + csv::fmt(10.0 * rel_tol));
  return out;
}

namespace {

double uniform_step(const std::vector<double>& times, const char* what) {
  if (times.size() < 2)
    throw parameter_error(std::string(what) + " grid needs at least 2 points");
  const double dt = times[1] - times[0];
  for (size_t i = 1; i < times.size(); ++i) {
    const double step = times[i] - times[i - 1];
    if (std::fabs(step - dt) > 1e-9 * std::max(dt, 1.0))
      throw parameter_error(std::string(what) +
                            " grid must be uniform for the convolution");
  }
  return dt;
}

}  // namespace

double convolve_renewal(const FPTDensity& g, const TransitionSlice& p, int n,
                        double t) {
  const int k = g.k, s = g.s;
  if (p.k != s)
    throw parameter_error(
        "transition slice must start at the first-passage target state " +
        std::to_string(s) + ", got " + std::to_string(p.k));
  if (!p.window.contains(n))
    throw domain_error("state " + std::to_string(n) +
                       " outside the transition slice window");
  const bool upward = k < s && s <= n;
  const bool downward = n <= s && s < k;
  if (!upward && !downward)
    throw domain_error("renewal identity needs k < s <= n or n <= s < k; "
                       "got k=" + std::to_string(k) + " s=" +
                       std::to_string(s) + " n=" + std::to_string(n));

  const double dt = uniform_step(g.times, "first-passage");
  const double dtp = uniform_step(p.times, "transition");
  if (std::fabs(dt - dtp) > 1e-9 * std::max(dt, 1.0) ||
      g.times.size() != p.times.size())
    throw parameter_error("first-passage and transition grids do not match");

  const double idx_f = t / dt;
  const auto last = static_cast<size_t>(std::llround(idx_f));
  if (last >= g.times.size() ||
      std::fabs(idx_f - static_cast<double>(last)) > 1e-6)
    throw parameter_error("t = " + csv::fmt(t) +
                          " is not a grid time of the shared grid");

  double sum = 0.0;
  for (size_t j = 0; j <= last; ++j) {
    const double w = (j == 0 || j == last) ? 0.5 : 1.0;
    sum += w * g.density[j] * p.at(last - j, n);
  }
  return sum * dt;
}

StateWindow auto_window(const ProcessSpec& spec, int k, double t_max,
                        double rel_tol) {
  check_rel_tol(rel_tol);
  if (!(t_max > 0)) throw parameter_error("t_max must be > 0");
  if (spec.domain()) return *spec.domain();

  const double rate = spec.rates_at(k).lambda + spec.rates_at(k).mu;
  int m = static_cast<int>(std::ceil(8.0 + 3.0 * t_max * rate));
  // The jump-count bound is already conservative; the loop is a
  // deficit-validated safety net.
  for (int round = 0; round < 8; ++round) {
    const StateWindow w(k - m, k + m);
    const TransitionSlice probe =
        solve_forward(spec, w, k, {0.0, t_max}, rel_tol);
    if (probe.deficit.back() < rel_tol) return w;
    m = static_cast<int>(std::ceil(1.5 * m)) + 4;
  }
  throw accuracy_error(
      "auto window sizing failed to push the truncation deficit below "
      "rel_tol; supply an explicit window");
}

std::vector<double> uniform_grid(double t_max, int points) {
  if (!(t_max > 0)) throw parameter_error("t_max must be > 0");
  if (points < 2) throw parameter_error("grid needs at least 2 points");
  std::vector<double> times(points);
  for (int i = 0; i < points; ++i)
    times[i] = t_max * static_cast<double>(i) / (points - 1);
  return times;
}

}  // namespace bdp
