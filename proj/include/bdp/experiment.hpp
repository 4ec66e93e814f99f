#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "bdp/model.hpp"
#include "bdp/transform.hpp"

namespace bdp {

// One experiment: a process, a nu construction, a state/time layout,
// and tolerances. Parsed from a plain-text key/value file; unknown
// keys and out-of-range values are rejected with line numbers.
struct ExperimentConfig {
  enum class NuMode { recurrence, constant_ratio };

  std::optional<std::string> process_file;
  std::optional<double> inline_lambda, inline_mu;  // process.kind constant

  NuMode nu_mode = NuMode::constant_ratio;
  bool nu_mode_set = false;
  double nu0 = 1.0;
  std::optional<double> d0;    // required for recurrence mode
  std::optional<double> c;     // default: mu/lambda of the process
  double beta = 1.0;

  std::optional<StateWindow> window;  // default: auto-sized
  int k = 0;
  int s = 1;
  std::optional<int> n;  // renewal target; default s +/- 1 away from k

  double t_max = 1.0;
  int grid = 200;
  double rel_tol = 1e-10;
  long trials = 100000;
  int bins = 50;
  std::uint64_t seed = 42;
  int threads = 0;

  double tol_transition = 1e-8;
  double tol_fpt = 1e-6;
  double tol_crossing = 1e-6;
  double tol_renewal = 1e-6;

  std::optional<std::string> out;

  // Loads the process (file or inline constant).
  ProcessSpec resolve_process() const;
};

ExperimentConfig parse_config(const std::string& path);
ExperimentConfig parse_config_text(std::istream& in, const std::string& name);

struct VerifyCheck {
  std::string name;
  double max_residual;
  double tol;
  bool pass;
  std::string note;
};

struct VerifyReport {
  std::vector<VerifyCheck> checks;
  bool pass() const;
};

// The full cross-check pipeline: build nu, transform the process,
// solve both forward systems independently, and test the product-form
// identities for transition probabilities, first-passage densities and
// crossing masses, plus a renewal-equation spot check. One line per
// check goes to `log`; the report carries the residuals.
VerifyReport run_verify(const ExperimentConfig& config, std::ostream& log);

}  // namespace bdp
