#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "bdp/model.hpp"

namespace bdp {

// A positive, strictly monotone solution of the three-term recurrence
//
//   nu_{n+1} lambda_n - nu_n (lambda_n + mu_n) + nu_{n-1} mu_n = 0
//
// materialized on a state window. Positivity and monotonicity beyond
// the window are the caller's responsibility: the recurrence lives on
// all of Z mathematically, but only the window is ever checked here.
class NuSequence {
 public:
  enum class Direction { increasing, decreasing };

  struct RecurrenceOrigin {
    double nu0;
    double d0;
  };
  struct RatioOrigin {
    double beta;
    double c;
  };
  using Origin = std::variant<std::monostate, RecurrenceOrigin, RatioOrigin>;

  // Wraps precomputed values; validates positivity and strict
  // monotonicity only. Whether the values solve the recurrence for a
  // given process is checked when the pair is used (transform_process).
  NuSequence(const StateWindow& window, std::vector<double> values,
             Origin origin = std::monostate{});

  const StateWindow& window() const { return window_; }
  Direction direction() const { return direction_; }
  const Origin& origin() const { return origin_; }
  bool increasing() const { return direction_ == Direction::increasing; }

  double at(int n) const;
  // nu_to / nu_from; both states must lie in the window.
  double ratio(int to, int from) const;
  // d_n = nu_{n+1} - nu_n, defined for n in [lo, hi-1].
  double increment(int n) const;

 private:
  StateWindow window_;
  std::vector<double> values_;
  Direction direction_;
  Origin origin_;
};

// Builds nu by propagating increments d_n = nu_{n+1} - nu_n with
// d_n = (mu_n/lambda_n) d_{n-1} upward from d_0 and the inverse
// downward, starting from nu_0 at state 0. Increments switch to a
// log-magnitude representation when they leave the directly
// representable range, so strongly asymmetric rates cannot overflow a
// running product that would otherwise recover.
//
// Throws positivity_error naming the first offending state if nu drops
// to <= 0 or the increments fall below floating-point resolution (the
// sequence would stop being strictly monotone); parameter_error for
// d0 == 0 (a constant sequence is not strictly monotone).
NuSequence nu_from_recurrence(const ProcessSpec& spec,
                              const StateWindow& window, double nu0,
                              double d0);

// Closed-form family nu_n = 1 + beta * c^n, which solves the
// recurrence for any process with mu_n = c * lambda_n. Increasing iff
// c > 1. c == 1 is rejected: with equal rates the recurrence has no
// positive non-constant solution.
NuSequence nu_constant_ratio(double c, double beta, const StateWindow& window);

// Signed residual of the recurrence at interior state n, and the
// tolerance it is held to (8 ulp-scale units of nu_n (lambda_n+mu_n)).
double nu_residual(const ProcessSpec& spec, const NuSequence& nu, int n);
double nu_residual_bound(const ProcessSpec& spec, const NuSequence& nu, int n);

// The similarity-transformed process: rates
//
//   lambda~_n = lambda_n nu_{n+1}/nu_n,   mu~_n = mu_n nu_{n-1}/nu_n
//
// on the interior of the nu window (the transformed window shrinks by
// one state on each side; nu is never extrapolated). Total exit rate
// is preserved state by state: lambda~_n + mu~_n = lambda_n + mu_n.
struct TransformedProcess {
  ProcessSpec spec;    // table of transformed rates
  ProcessSpec source;  // the process it was derived from
  NuSequence nu;
};

// Throws incompatible_nu_error if nu fails the recurrence residual
// check against `spec` at any interior state.
TransformedProcess transform_process(const ProcessSpec& spec,
                                     const NuSequence& nu);

// Product-form predictions: given a quantity of the original process,
// the corresponding quantity of the transformed one.

// p~_{k,n}(t) = (nu_n/nu_k) p_{k,n}(t)
double predict_transition(const NuSequence& nu, int k, int n, double p_kn);

// g~_{k,s}(t) = (nu_s/nu_k) g_{k,s}(t); k == s is rejected (the
// first-passage density is undefined at the start state).
double predict_fpt(const NuSequence& nu, int k, int s, double g_ks);

// P~_{k,s} = (nu_s/nu_k) P_{k,s}. A result above 1 signals an invalid
// nu/process pairing or a wrong input and throws domain_error.
double predict_crossing(const NuSequence& nu, int k, int s, double P_ks);

}  // namespace bdp
