#pragma once

#include "bdp/model.hpp"

namespace bdp {

// Closed forms for the constant-rate bilateral process (lambda_n =
// lambda, mu_n = mu for all n) and for its similarity transform under
// nu_n = 1 + beta (mu/lambda)^n. All evaluations route through the
// exponentially scaled Bessel product e^{-x} I_k(x), so they stay
// finite for arbitrarily large t.

// p_{k,n}(t) = e^{-(l+m)t} (l/m)^{(n-k)/2} I_{n-k}(2t sqrt(lm))
double transition_prob_const(double lambda, double mu, int k, int n, double t);

// g_{k,s}(t) = (|s-k|/t) p_{k,s}(t); t must be > 0 and k != s.
double fpt_density_const(double lambda, double mu, int k, int s, double t);

// Continuity value of g_{k,s} at t = 0: lambda for s = k+1, mu for
// s = k-1, zero when |s-k| >= 2.
double fpt_density_const_at0(double lambda, double mu, int k, int s);

// Transition probabilities of the transformed process, with
// c = mu/lambda:
//   p~_{k,n}(t) = (1+beta c^n)/(1+beta c^k) e^{-(l+m)t} c^{(k-n)/2}
//                 I_{n-k}(2t sqrt(lm))
// lambda == mu is rejected: the rate recurrence has no positive
// non-constant solution there, so no transform exists.
double transformed_transition_const(double lambda, double mu, double beta,
                                    int k, int n, double t);

// First-passage density of the transformed process:
//   g~_{k,s}(t) = (1+beta c^s)/(1+beta c^k) (|s-k|/t) e^{-(l+m)t}
//                 c^{(k-s)/2} I_{s-k}(2t sqrt(lm))
double transformed_fpt_const(double lambda, double mu, double beta, int k,
                             int s, double t);

double transformed_fpt_const_at0(double lambda, double mu, double beta, int k,
                                 int s);

// Rates of the transformed process at one state, straight from the
// closed forms:
//   lambda~_n = lambda (1+beta c^{n+1})/(1+beta c^n)
//   mu~_n     = mu     (1+beta c^{n-1})/(1+beta c^n)
Rates transformed_rates_const(double lambda, double mu, double beta, int n);

// Dense rate table of the transformed process over a window. Unlike a
// materialized nu sequence, the rate ratios stay well-defined for
// arbitrarily deep states (they approach the original rates), so this
// is the way to build simulation tables far wider than the
// double-precision range of 1 + beta c^n differences.
ProcessSpec transformed_table_const(double lambda, double mu, double beta,
                                    const StateWindow& window);

// Ultimate crossing probability of the constant-rate walk: the
// classical ruin value min(1, (lambda/mu)^{s-k}) for s > k and
// min(1, (mu/lambda)^{k-s}) for s < k. Validation oracle; not part of
// the transform machinery.
double crossing_prob_const(double lambda, double mu, int k, int s);

// Numerical integral of g_{k,s} over (0, T] with the adaptive Gauss
// pair at absolute tolerance 1e-10, T = 50/(sqrt(l)-sqrt(m))^2 capped
// at 1e4 (the integrand tail decays like e^{-(sqrt(l)-sqrt(m))^2 t}).
double crossing_prob_quadrature(double lambda, double mu, int k, int s);

// Same integral for the transformed density.
double transformed_crossing_quadrature(double lambda, double mu, double beta,
                                       int k, int s);

}  // namespace bdp
