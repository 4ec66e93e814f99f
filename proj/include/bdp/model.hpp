#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "bdp/errors.hpp"

namespace bdp {

// Inclusive integer lattice window [lo, hi].
struct StateWindow {
  int lo;
  int hi;

  StateWindow(int lo_, int hi_);

  int width() const { return hi - lo + 1; }
  bool contains(int n) const { return n >= lo && n <= hi; }
  // Interior states are those where the three-term recurrence can be
  // evaluated (both neighbours inside the window).
  bool interior(int n) const { return n > lo && n < hi; }
  int index_of(int n) const { return n - lo; }

  bool operator==(const StateWindow&) const = default;
};

struct Rates {
  double lambda;  // birth (up) rate
  double mu;      // death (down) rate
};

struct RateViolation {
  int state;
  std::string what;
};

struct ValidationReport {
  std::vector<RateViolation> violations;
  bool ok() const { return violations.empty(); }
  std::string to_string() const;
};

// A bilateral birth-and-death process: strictly positive birth and
// death rates on the integer lattice. Three representations:
//
//   constant         lambda_n = lambda, mu_n = mu everywhere
//   table            dense per-state rates over a window
//   geometric_ratio  per-state lambda table with mu_n = c * lambda_n
//
// Rates are validated at construction; an invalid table throws
// validation_error listing every offending state. Instances are
// immutable and safe to share across threads.
class ProcessSpec {
 public:
  enum class Kind { constant, table, geometric_ratio };

  static ProcessSpec constant(double lambda, double mu);
  static ProcessSpec table(const StateWindow& window,
                           std::vector<double> lambda,
                           std::vector<double> mu);
  static ProcessSpec geometric_ratio(const StateWindow& window,
                                     std::vector<double> lambda, double c);

  Kind kind() const { return kind_; }
  // The window where rates are defined; nullopt means all of Z.
  std::optional<StateWindow> domain() const { return domain_; }
  bool has_state(int n) const { return !domain_ || domain_->contains(n); }

  // Exact rate pair at state n. Throws domain_error outside the table
  // window; constant specs never throw.
  Rates rates_at(int n) const;

  double max_exit_rate(const StateWindow& window) const;

  // For geometric_ratio specs, the constant mu/lambda ratio; for
  // constant specs, mu/lambda. nullopt for general tables.
  std::optional<double> rate_ratio() const;

 private:
  ProcessSpec() = default;

  Kind kind_ = Kind::constant;
  std::optional<StateWindow> domain_;
  double const_lambda_ = 0, const_mu_ = 0;
  double ratio_c_ = 0;
  std::vector<double> lambda_, mu_;  // dense over domain_
};

// Strict-positivity check of raw table data; used by the table
// constructors before any spec exists.
ValidationReport validate_rates(const StateWindow& window,
                                const std::vector<double>& lambda,
                                const std::vector<double>& mu);

// Checks that `spec` defines strictly positive rates at every state of
// `window`. Constructed specs always pass on their own domain; the
// interesting failure mode is a window that sticks out of the table.
ValidationReport validate_spec(const ProcessSpec& spec,
                               const StateWindow& window);

// Plain-text process definition files. Grammar (one item per line,
// '#' starts a comment):
//
//   kind constant|table|geometric_ratio
//   lambda <x>        (constant)
//   mu <x>            (constant)
//   c <x>             (geometric_ratio)
//   <n> <lambda> <mu> (table row)
//   <n> <lambda>      (geometric_ratio row)
//
// Rows must cover a contiguous integer range. Unknown keys are errors.
ProcessSpec load_process(const std::string& path);
ProcessSpec parse_process(std::istream& in, const std::string& name);
void save_process(const ProcessSpec& spec, std::ostream& out);

}  // namespace bdp
