#include "bdp/simulate.hpp"

#include <cmath>
#include <thread>

#include "bdp/csv.hpp"
#include "bdp/philox.hpp"

namespace bdp {

namespace {

void check_trial_args(double t_end, long trials) {
  if (!(t_end > 0))
    throw parameter_error("t_end must be > 0, got " + csv::fmt(t_end));
  if (trials < 1)
    throw parameter_error("trials must be >= 1, got " +
                          std::to_string(trials));
}

int resolve_threads(int threads, long trials) {
  if (threads <= 0)
    threads = static_cast<int>(std::thread::hardware_concurrency());
  if (threads < 1) threads = 1;
  return static_cast<int>(
      std::min<long>(threads, std::max<long>(1, trials / 256)));
}

// Runs body(trial) for every trial index, chunked across threads.
// Exceptions (a walk leaving a table window) are rethrown on the
// caller's thread.
template <class Body>
void for_each_trial(long trials, int threads, const Body& body) {
  if (threads == 1) {
    for (long i = 0; i < trials; ++i) body(0, i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  const long chunk = (trials + threads - 1) / threads;
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&, w]() {
      const long begin = w * chunk;
      const long end = std::min(trials, begin + chunk);
      try {
        for (long i = begin; i < end; ++i) body(w, i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

[[noreturn]] void walk_left_table(int state) {
  throw domain_error("simulated walk left the rate table window at state " +
                     std::to_string(state) +
                     "; widen the table or shorten the horizon");
}

}  // namespace

Trajectory simulate_path(const ProcessSpec& spec, int k, double t_end,
                         std::uint64_t seed, std::uint64_t stream) {
  if (!(t_end > 0))
    throw parameter_error("t_end must be > 0, got " + csv::fmt(t_end));
  Philox4x32 rng(seed, stream);
  Trajectory traj{seed, {}, {k}, t_end};
  double t = 0.0;
  int state = k;
  while (true) {
    if (!spec.has_state(state)) walk_left_table(state);
    const Rates r = spec.rates_at(state);
    const double exit = r.lambda + r.mu;
    t += rng.next_exponential(exit);
    if (t > t_end) break;
    state += rng.next_bernoulli(r.lambda / exit) ? 1 : -1;
    traj.jump_times.push_back(t);
    traj.states.push_back(state);
  }
  return traj;
}

TransitionHistogram estimate_transition(const ProcessSpec& spec, int k,
                                        double t, long trials,
                                        std::uint64_t seed, int threads) {
  if (!(t >= 0)) throw parameter_error("t must be >= 0, got " + csv::fmt(t));
  if (trials < 1)
    throw parameter_error("trials must be >= 1, got " +
                          std::to_string(trials));
  TransitionHistogram hist{k, t, trials, {}};
  if (t == 0.0) {
    hist.counts[k] = trials;
    return hist;
  }

  const int nthreads = resolve_threads(threads, trials);
  std::vector<std::map<int, long>> partial(nthreads);
  for_each_trial(trials, nthreads, [&](int w, long trial) {
    Philox4x32 rng(seed, static_cast<std::uint64_t>(trial));
    double time = 0.0;
    int state = k;
    while (true) {
      if (!spec.has_state(state)) walk_left_table(state);
      const Rates r = spec.rates_at(state);
      time += rng.next_exponential(r.lambda + r.mu);
      if (time > t) break;
      state += rng.next_bernoulli(r.lambda / (r.lambda + r.mu)) ? 1 : -1;
    }
    ++partial[w][state];
  });
  // Integer counts: merge order cannot change the result.
  for (const auto& part : partial)
    for (const auto& [state, count] : part) hist.counts[state] += count;
  return hist;
}

FptEstimate estimate_fpt(const ProcessSpec& spec, int k, int s, double t_end,
                         long trials, int bins, std::uint64_t seed,
                         int threads) {
  check_trial_args(t_end, trials);
  if (k == s)
    throw domain_error(
        "first-passage estimation needs distinct start and target states");
  if (bins < 1)
    throw parameter_error("bins must be >= 1, got " + std::to_string(bins));

  const double bin_width = t_end / bins;
  const int nthreads = resolve_threads(threads, trials);
  std::vector<std::vector<long>> bin_counts(
      nthreads, std::vector<long>(bins, 0));
  std::vector<long> hit_counts(nthreads, 0);

  for_each_trial(trials, nthreads, [&](int w, long trial) {
    Philox4x32 rng(seed, static_cast<std::uint64_t>(trial));
    double time = 0.0;
    int state = k;
    while (true) {
      if (!spec.has_state(state)) walk_left_table(state);
      const Rates r = spec.rates_at(state);
      time += rng.next_exponential(r.lambda + r.mu);
      if (time > t_end) return;  // censored
      state += rng.next_bernoulli(r.lambda / (r.lambda + r.mu)) ? 1 : -1;
      if (state == s) {
        const int bin =
            std::min(bins - 1, static_cast<int>(time / bin_width));
        ++bin_counts[w][bin];
        ++hit_counts[w];
        return;
      }
    }
  });

  std::vector<long> total_bins(bins, 0);
  long hits = 0;
  for (int w = 0; w < nthreads; ++w) {
    hits += hit_counts[w];
    for (int b = 0; b < bins; ++b) total_bins[b] += bin_counts[w][b];
  }

  FptEstimate est;
  est.histogram.k = k;
  est.histogram.s = s;
  est.histogram.times.resize(bins);
  est.histogram.density.resize(bins);
  est.histogram.absorbed_mass.resize(bins);
  long cumulative = 0;
  for (int b = 0; b < bins; ++b) {
    cumulative += total_bins[b];
    est.histogram.times[b] = (b + 0.5) * bin_width;
    est.histogram.density[b] =
        static_cast<double>(total_bins[b]) / (trials * bin_width);
    est.histogram.absorbed_mass[b] =
        static_cast<double>(cumulative) / trials;
  }
  est.histogram.censored_mass =
      1.0 - static_cast<double>(hits) / trials;
  est.histogram.deficit = 0.0;

  const double point = static_cast<double>(hits) / trials;
  est.crossing = CrossingEstimate{
      k,
      s,
      hits,
      trials,
      t_end,
      point,
      1.96 * std::sqrt(point * (1.0 - point) / trials),
      hits < trials};
  return est;
}

}  // namespace bdp
