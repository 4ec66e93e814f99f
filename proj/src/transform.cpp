#include "bdp/transform.hpp"

#include <cfloat>
#include <cmath>
#include <limits>

#include "bdp/csv.hpp"

namespace bdp {

namespace {

// Increment d_n carried in two forms: the direct double, and a
// sign + log-magnitude pair that survives transient excursions past
// the representable range of the direct product.
struct Increment {
  double direct;
  double log_mag;
  double sign;

  explicit Increment(double d)
      : direct(d), log_mag(std::log(std::fabs(d))), sign(d > 0 ? 1.0 : -1.0) {}

  void scale(double ratio) {  // ratio > 0 always (rates are positive)
    direct *= ratio;
    log_mag += std::log(ratio);
  }

  // Materialize; 0.0 or +/-inf signal under/overflow past double range.
  double value() const {
    if (direct != 0.0 && std::isfinite(direct)) return direct;
    return sign * std::exp(log_mag);
  }
};

[[noreturn]] void monotonicity_break(int state) {
  throw positivity_error(
      "nu increment at state " + std::to_string(state) +
          " fell below floating-point resolution; the sequence cannot stay "
          "strictly monotone",
      state);
}

void check_step(double prev, double next, int state) {
  if (!std::isfinite(next))
    throw accuracy_error("nu overflows double range at state " +
                         std::to_string(state));
  if (!(next > 0.0))
    throw positivity_error("nu becomes non-positive at state " +
                               std::to_string(state) +
                               " (nu = " + csv::fmt(next) + ")",
                           state);
  if (next == prev) monotonicity_break(state);
}

}  // namespace

NuSequence::NuSequence(const StateWindow& window, std::vector<double> values,
                       Origin origin)
    : window_(window), values_(std::move(values)), origin_(origin) {
  if (values_.size() != static_cast<size_t>(window_.width()))
    throw parameter_error("nu sequence needs one value per window state");
  for (int n = window_.lo; n <= window_.hi; ++n) {
    const double v = values_[window_.index_of(n)];
    if (!(v > 0.0) || !std::isfinite(v))
      throw positivity_error(
          "nu_" + std::to_string(n) + " = " + csv::fmt(v) + " (must be > 0)",
          n);
  }
  const bool up = values_[1] > values_[0];
  direction_ = up ? Direction::increasing : Direction::decreasing;
  for (size_t i = 1; i < values_.size(); ++i) {
    const bool step_up = values_[i] > values_[i - 1];
    if (values_[i] == values_[i - 1] || step_up != up)
      throw positivity_error(
          "nu sequence is not strictly monotone at state " +
              std::to_string(window_.lo + static_cast<int>(i)),
          window_.lo + static_cast<int>(i));
  }
}

double NuSequence::at(int n) const {
  if (!window_.contains(n))
    throw domain_error("state " + std::to_string(n) +
                       " outside the nu window [" + std::to_string(window_.lo) +
                       "," + std::to_string(window_.hi) + "]");
  return values_[window_.index_of(n)];
}

double NuSequence::ratio(int to, int from) const { return at(to) / at(from); }

double NuSequence::increment(int n) const { return at(n + 1) - at(n); }

NuSequence nu_from_recurrence(const ProcessSpec& spec,
                              const StateWindow& window, double nu0,
                              double d0) {
  if (!window.contains(0))
    throw parameter_error("nu window must contain state 0");
  if (!(nu0 > 0) || !std::isfinite(nu0))
    throw parameter_error("nu_0 must be > 0, got " + csv::fmt(nu0));
  if (d0 == 0.0)
    throw parameter_error(
        "d_0 = 0 gives a constant nu sequence, which is not strictly "
        "monotone");
  if (!std::isfinite(d0))
    throw parameter_error("d_0 must be finite, got " + csv::fmt(d0));

  std::vector<double> values(window.width());
  values[window.index_of(0)] = nu0;

  // Upward sweep: d_n = (mu_n / lambda_n) d_{n-1}.
  Increment d(d0);
  double cur = nu0;
  for (int n = 1; n <= window.hi; ++n) {
    const double next = cur + d.value();
    check_step(cur, next, n);
    values[window.index_of(n)] = next;
    cur = next;
    if (n < window.hi) {
      const Rates r = spec.rates_at(n);
      d.scale(r.mu / r.lambda);
    }
  }

  // Downward sweep: d_{n-1} = (lambda_n / mu_n) d_n.
  d = Increment(d0);
  cur = nu0;
  for (int n = -1; n >= window.lo; --n) {
    const Rates r = spec.rates_at(n + 1);
    d.scale(r.lambda / r.mu);
    const double next = cur - d.value();
    check_step(cur, next, n);
    values[window.index_of(n)] = next;
    cur = next;
  }

  NuSequence nu(window, std::move(values),
                NuSequence::RecurrenceOrigin{nu0, d0});

  // The construction satisfies the recurrence by rearrangement; this
  // guards against rate tables so extreme that rounding breaks it.
  for (int n = window.lo + 1; n < window.hi; ++n) {
    const double r = nu_residual(spec, nu, n);
    if (std::fabs(r) > nu_residual_bound(spec, nu, n))
      throw accuracy_error("nu recurrence residual " + csv::fmt(r) +
                           " at state " + std::to_string(n) +
                           " exceeds its rounding bound");
  }
  return nu;
}

NuSequence nu_constant_ratio(double c, double beta,
                             const StateWindow& window) {
  if (!(c > 0) || !std::isfinite(c))
    throw parameter_error("ratio c must be > 0, got " + csv::fmt(c));
  if (c == 1.0)
    throw parameter_error(
        "c = 1 (equal birth and death rates): the recurrence has no positive "
        "non-constant solution, so no similarity transform exists");
  if (!(beta > 0) || !std::isfinite(beta))
    throw parameter_error("beta must be > 0, got " + csv::fmt(beta));

  std::vector<double> values(window.width());
  for (int n = window.lo; n <= window.hi; ++n) {
    const double v = 1.0 + beta * std::pow(c, n);
    if (!std::isfinite(v))
      throw accuracy_error("nu_n = 1 + beta c^n overflows at state " +
                           std::to_string(n) +
                           "; shrink the window or the parameters");
    values[window.index_of(n)] = v;
  }
  return NuSequence(window, std::move(values),
                    NuSequence::RatioOrigin{beta, c});
}

double nu_residual(const ProcessSpec& spec, const NuSequence& nu, int n) {
  if (!nu.window().interior(n))
    throw domain_error("recurrence residual needs both neighbours of state " +
                       std::to_string(n) + " inside the nu window");
  const Rates r = spec.rates_at(n);
  return nu.at(n + 1) * r.lambda - nu.at(n) * (r.lambda + r.mu) +
         nu.at(n - 1) * r.mu;
}

double nu_residual_bound(const ProcessSpec& spec, const NuSequence& nu,
                         int n) {
  const Rates r = spec.rates_at(n);
  return 8.0 * DBL_EPSILON * nu.at(n) * (r.lambda + r.mu);
}

TransformedProcess transform_process(const ProcessSpec& spec,
                                     const NuSequence& nu) {
  const StateWindow& w = nu.window();
  for (int n = w.lo + 1; n < w.hi; ++n) {
    const double res = nu_residual(spec, nu, n);
    const double bound = nu_residual_bound(spec, nu, n);
    if (std::fabs(res) > bound)
      throw incompatible_nu_error(
          "nu does not solve the rate recurrence at state " +
          std::to_string(n) + ": residual " + csv::fmt(res) + " exceeds " +
          csv::fmt(bound));
  }

  const StateWindow inner(w.lo + 1, w.hi - 1);
  std::vector<double> lambda_t(inner.width()), mu_t(inner.width());
  for (int n = inner.lo; n <= inner.hi; ++n) {
    const Rates r = spec.rates_at(n);
    lambda_t[inner.index_of(n)] = r.lambda * nu.ratio(n + 1, n);
    mu_t[inner.index_of(n)] = r.mu * nu.ratio(n - 1, n);
  }
  return TransformedProcess{
      ProcessSpec::table(inner, std::move(lambda_t), std::move(mu_t)), spec,
      nu};
}

double predict_transition(const NuSequence& nu, int k, int n, double p_kn) {
  if (!(p_kn >= 0.0 && p_kn <= 1.0))
    throw parameter_error("transition probability must lie in [0,1], got " +
                          csv::fmt(p_kn));
  return nu.ratio(n, k) * p_kn;
}

double predict_fpt(const NuSequence& nu, int k, int s, double g_ks) {
  if (k == s)
    throw domain_error(
        "first-passage density is undefined for equal start and target "
        "states");
  if (!(g_ks >= 0.0))
    throw parameter_error("density value must be >= 0, got " + csv::fmt(g_ks));
  return nu.ratio(s, k) * g_ks;
}

double predict_crossing(const NuSequence& nu, int k, int s, double P_ks) {
  if (k == s)
    throw domain_error(
        "crossing probability is undefined for equal start and target "
        "states");
  if (!(P_ks >= 0.0 && P_ks <= 1.0))
    throw parameter_error("crossing probability must lie in [0,1], got " +
                          csv::fmt(P_ks));
  const double predicted = nu.ratio(s, k) * P_ks;
  if (predicted > 1.0 + 1e-12)
    throw domain_error(
        "predicted crossing probability " + csv::fmt(predicted) +
        " exceeds 1; the nu sequence and crossing input are inconsistent");
  return std::min(predicted, 1.0);
}

}  // namespace bdp
