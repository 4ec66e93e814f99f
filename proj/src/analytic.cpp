#include "bdp/analytic.hpp"

#include <cmath>
#include <cstdlib>
#include <functional>

#include "bdp/bessel.hpp"
#include "bdp/csv.hpp"
#include "bdp/errors.hpp"
#include "bdp/quadrature.hpp"

namespace bdp {

namespace {

void check_rates(double lambda, double mu) {
  if (!(lambda > 0) || !std::isfinite(lambda))
    throw parameter_error("lambda must be > 0, got " + csv::fmt(lambda));
  if (!(mu > 0) || !std::isfinite(mu))
    throw parameter_error("mu must be > 0, got " + csv::fmt(mu));
}

void check_transform_params(double lambda, double mu, double beta) {
  check_rates(lambda, mu);
  if (lambda == mu)
    throw parameter_error(
        "lambda = mu: the rate recurrence has no positive non-constant "
        "solution, so the transformed process does not exist");
  if (!(beta > 0) || !std::isfinite(beta))
    throw parameter_error("beta must be > 0, got " + csv::fmt(beta));
}

// e^{log_prefactor} * scaled, guarding the inf * 0 corner when the
// two factors overflow and underflow together.
double combine(double log_prefactor, double scaled) {
  if (scaled == 0.0) return 0.0;
  if (log_prefactor < 600.0) return std::exp(log_prefactor) * scaled;
  return std::exp(log_prefactor + std::log(scaled));
}

// log of e^{-(l+m)t} (l/m)^{m_ord/2} e^{x} with x = 2t sqrt(lm);
// written via -t (sqrt(l)-sqrt(m))^2 to avoid cancellation at large t.
double log_prefactor_const(double lambda, double mu, int m_ord, double t) {
  const double drift = std::sqrt(lambda) - std::sqrt(mu);
  return -t * drift * drift + 0.5 * m_ord * std::log(lambda / mu);
}

}  // namespace

double transition_prob_const(double lambda, double mu, int k, int n,
                             double t) {
  check_rates(lambda, mu);
  if (!(t >= 0)) throw domain_error("time must be >= 0, got " + csv::fmt(t));
  const int m = n - k;
  const double x = 2.0 * t * std::sqrt(lambda * mu);
  const double scaled = bessel_i_scaled(m, x);
  const double p = combine(log_prefactor_const(lambda, mu, m, t), scaled);
  return std::min(p, 1.0);
}

double fpt_density_const(double lambda, double mu, int k, int s, double t) {
  if (k == s)
    throw domain_error(
        "first-passage density is undefined for equal start and target "
        "states");
  if (!(t > 0))
    throw domain_error("first-passage density needs t > 0, got " +
                       csv::fmt(t) + " (the t->0 limit is handled by "
                       "fpt_density_const_at0)");
  return (std::abs(s - k) / t) * transition_prob_const(lambda, mu, k, s, t);
}

double fpt_density_const_at0(double lambda, double mu, int k, int s) {
  check_rates(lambda, mu);
  if (k == s)
    throw domain_error(
        "first-passage density is undefined for equal start and target "
        "states");
  if (s == k + 1) return lambda;
  if (s == k - 1) return mu;
  return 0.0;
}

double transformed_transition_const(double lambda, double mu, double beta,
                                    int k, int n, double t) {
  check_transform_params(lambda, mu, beta);
  if (!(t >= 0)) throw domain_error("time must be >= 0, got " + csv::fmt(t));
  const double c = mu / lambda;
  const double nu_ratio =
      (1.0 + beta * std::pow(c, n)) / (1.0 + beta * std::pow(c, k));
  const int m = n - k;
  const double x = 2.0 * t * std::sqrt(lambda * mu);
  // c^{(k-n)/2} = (lambda/mu)^{(n-k)/2}: same prefactor as the
  // untransformed probability.
  const double p = combine(log_prefactor_const(lambda, mu, m, t),
                           bessel_i_scaled(m, x));
  return std::min(nu_ratio * p, 1.0);
}

double transformed_fpt_const(double lambda, double mu, double beta, int k,
                             int s, double t) {
  check_transform_params(lambda, mu, beta);
  if (k == s)
    throw domain_error(
        "first-passage density is undefined for equal start and target "
        "states");
  if (!(t > 0))
    throw domain_error("first-passage density needs t > 0, got " +
                       csv::fmt(t));
  const double c = mu / lambda;
  const double nu_ratio =
      (1.0 + beta * std::pow(c, s)) / (1.0 + beta * std::pow(c, k));
  return nu_ratio * fpt_density_const(lambda, mu, k, s, t);
}

double transformed_fpt_const_at0(double lambda, double mu, double beta, int k,
                                 int s) {
  check_transform_params(lambda, mu, beta);
  const double c = mu / lambda;
  const double nu_ratio =
      (1.0 + beta * std::pow(c, s)) / (1.0 + beta * std::pow(c, k));
  return nu_ratio * fpt_density_const_at0(lambda, mu, k, s);
}

Rates transformed_rates_const(double lambda, double mu, double beta, int n) {
  check_transform_params(lambda, mu, beta);
  const double c = mu / lambda;
  const double here = 1.0 + beta * std::pow(c, n);
  return {lambda * (1.0 + beta * std::pow(c, n + 1)) / here,
          mu * (1.0 + beta * std::pow(c, n - 1)) / here};
}

ProcessSpec transformed_table_const(double lambda, double mu, double beta,
                                    const StateWindow& window) {
  std::vector<double> lam(window.width()), m(window.width());
  for (int n = window.lo; n <= window.hi; ++n) {
    const Rates r = transformed_rates_const(lambda, mu, beta, n);
    lam[window.index_of(n)] = r.lambda;
    m[window.index_of(n)] = r.mu;
  }
  return ProcessSpec::table(window, std::move(lam), std::move(m));
}

double crossing_prob_const(double lambda, double mu, int k, int s) {
  check_rates(lambda, mu);
  if (k == s)
    throw domain_error(
        "crossing probability is undefined for equal start and target "
        "states");
  const double log_ratio =
      (s > k) ? (s - k) * std::log(lambda / mu) : (k - s) * std::log(mu / lambda);
  return std::min(1.0, std::exp(log_ratio));
}

namespace {

double crossing_quadrature_impl(double lambda, double mu,
                                const std::function<double(double)>& density) {
  const double drift = std::sqrt(lambda) - std::sqrt(mu);
  const double T = std::min(50.0 / (drift * drift), 1e4);
  return integrate_adaptive(density, 0.0, T, 1e-10).value;
}

}  // namespace

double crossing_prob_quadrature(double lambda, double mu, int k, int s) {
  check_rates(lambda, mu);
  if (k == s)
    throw domain_error(
        "crossing probability is undefined for equal start and target "
        "states");
  return crossing_quadrature_impl(lambda, mu, [=](double t) {
    return fpt_density_const(lambda, mu, k, s, t);
  });
}

double transformed_crossing_quadrature(double lambda, double mu, double beta,
                                       int k, int s) {
  check_transform_params(lambda, mu, beta);
  if (k == s)
    throw domain_error(
        "crossing probability is undefined for equal start and target "
        "states");
  return crossing_quadrature_impl(lambda, mu, [=](double t) {
    return transformed_fpt_const(lambda, mu, beta, k, s, t);
  });
}

}  // namespace bdp
