#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "bdp/model.hpp"
#include "bdp/solver.hpp"

namespace bdp {

// One exact jump skeleton: holding times are exponential with rate
// lambda_n + mu_n, each jump moves one state up or down.
struct Trajectory {
  std::uint64_t seed;
  std::vector<double> jump_times;  // strictly increasing, all <= t_end
  std::vector<int> states;         // jump_times.size() + 1 entries
  double t_end;
};

struct CrossingEstimate {
  int k, s;
  long hits, trials;
  double horizon;
  double point;          // hits / trials
  double ci_half_width;  // 1.96 sqrt(p(1-p)/trials)
  // Finite-horizon censoring makes the point estimate a lower bound on
  // the ultimate crossing probability.
  bool censored;
};

struct TransitionHistogram {
  int k;
  double t;
  long trials;
  std::map<int, long> counts;
  double frequency(int n) const {
    const auto it = counts.find(n);
    return it == counts.end() ? 0.0
                              : static_cast<double>(it->second) / trials;
  }
};

struct FptEstimate {
  FPTDensity histogram;  // times are bin centers; integrates to the
                         // hit fraction (defective densities stay
                         // defective)
  CrossingEstimate crossing;
};

// Exact simulation of one path, deterministic in (seed, stream).
// Table-backed specs throw domain_error if the walk leaves the table.
Trajectory simulate_path(const ProcessSpec& spec, int k, double t_end,
                         std::uint64_t seed, std::uint64_t stream = 0);

// Empirical distribution of X_t over `trials` independent paths.
// Trial i uses the Philox stream (seed, i); counts are aggregated as
// integers, so the result is bit-identical for any thread count.
TransitionHistogram estimate_transition(const ProcessSpec& spec, int k,
                                        double t, long trials,
                                        std::uint64_t seed, int threads = 0);

// First-hitting-time histogram (uniform bins on [0, t_end], density =
// count / (trials * bin_width)) plus the crossing estimate from the
// hit fraction. Paths that never reach s by t_end are censored.
FptEstimate estimate_fpt(const ProcessSpec& spec, int k, int s, double t_end,
                         long trials, int bins, std::uint64_t seed,
                         int threads = 0);

}  // namespace bdp
