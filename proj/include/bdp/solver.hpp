#pragma once

#include <vector>

#include "bdp/model.hpp"

namespace bdp {

// Numerical solution of the truncated forward equations
//
//   dp_n/dt = lambda_{n-1} p_{n-1} - (lambda_n + mu_n) p_n
//             + mu_{n+1} p_{n+1}
//
// on a window. The truncation boundary is killing: probability flux
// through the outer edges leaves the system and is accumulated as
// `deficit`, so the mass identity sum_n p_n + deficit = 1 holds along
// the whole solve and bounds the truncation error explicitly.

struct TransitionSlice {
  StateWindow window;
  int k;  // initial state
  std::vector<double> times;
  // values[ti][window.index_of(n)] = p_{k,n}(times[ti])
  std::vector<std::vector<double>> values;
  std::vector<double> deficit;  // per time; nondecreasing
  // Most negative raw solver value seen before clamping to 0.
  double min_undershoot = 0.0;

  double at(size_t ti, int n) const {
    return values[ti][window.index_of(n)];
  }
  // sum_n p_n + deficit - 1 at grid time ti.
  double mass_error(size_t ti) const;
};

struct FPTDensity {
  int k;  // start state
  int s;  // target state
  std::vector<double> times;
  std::vector<double> density;        // g_{k,s} on the grid
  std::vector<double> absorbed_mass;  // P(T_s <= t), nondecreasing
  double censored_mass = 0.0;         // 1 - absorbed_mass at final time
  double deficit = 0.0;               // leak through the far edge
  double min_undershoot = 0.0;
};

// Tridiagonal action of the killed generator on a window. Column sums
// vanish at interior states (mass is only exchanged) and equal
// -lambda at the top edge and -mu at the bottom edge (mass leaves).
class TridiagonalGenerator {
 public:
  TridiagonalGenerator(const ProcessSpec& spec, const StateWindow& window);

  const StateWindow& window() const { return window_; }
  double lambda_at(int n) const { return lambda_[window_.index_of(n)]; }
  double mu_at(int n) const { return mu_[window_.index_of(n)]; }

  // Zeroes the outgoing rates of state s, making it absorbing.
  void make_absorbing(int s);

  // dpdt = L p (dpdt.size() == p.size() == window.width()).
  void apply(const std::vector<double>& p, std::vector<double>& dpdt) const;

  // Instantaneous flux through the killing edges.
  double edge_outflux(const std::vector<double>& p) const;

  // sum over in-window rows of column n; for tests of the
  // conservation structure.
  double column_sum(int n) const;

 private:
  StateWindow window_;
  std::vector<double> lambda_, mu_;
};

TridiagonalGenerator build_generator(const ProcessSpec& spec,
                                     const StateWindow& window);

// Integrates the truncated forward system from p(0) = delta_k with an
// adaptive embedded Runge-Kutta 5(4) pair and dense output on `times`
// (sorted, starting at 0). rel_tol must lie in [1e-13, 1e-6]; the
// absolute tolerance is rel_tol / 100.
TransitionSlice solve_forward(const ProcessSpec& spec,
                              const StateWindow& window, int k,
                              const std::vector<double>& times,
                              double rel_tol);

// First-passage density from k to s: s is made absorbing, the system
// is integrated on the sub-window between s and the truncation edge on
// k's side, and the density is read off the instantaneous inflow into
// s (lambda_{s-1} p_{s-1} or mu_{s+1} p_{s+1}), never by
// differentiating the absorbed mass. Throws accuracy_error when the
// far-edge deficit exceeds 10 * rel_tol (window too small).
FPTDensity fpt_numeric(const ProcessSpec& spec, const StateWindow& window,
                       int k, int s, const std::vector<double>& times,
                       double rel_tol);

// Trapezoid-rule convolution  int_0^t g_{k,s}(th) p_{s,n}(t-th) dth.
// Both inputs must share one uniform grid covering [0, t], p must
// start at state s, and the ordering k < s <= n or n <= s < k must
// hold (the renewal identity is false otherwise).
double convolve_renewal(const FPTDensity& g, const TransitionSlice& p, int n,
                        double t);

// Window sizing for unbounded (constant-rate) specs: [k-m, k+m] with
// m = ceil(8 + 3 t_max max_exit_rate), widened until the truncation
// deficit at t_max drops below rel_tol. Table-backed specs return
// their own domain.
StateWindow auto_window(const ProcessSpec& spec, int k, double t_max,
                        double rel_tol);

// Uniform grid of `points` times over [0, t_max].
std::vector<double> uniform_grid(double t_max, int points);

}  // namespace bdp
