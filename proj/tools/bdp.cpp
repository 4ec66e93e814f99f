// bdp: bilateral birth-death process toolkit.
//
// Subcommands: nu, transform, solve, fpt, simulate, example, verify.
// All tabular output is CSV with headers; floats carry 17 significant
// digits so files round-trip exactly.

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bdp/analytic.hpp"
#include "bdp/csv.hpp"
#include "bdp/errors.hpp"
#include "bdp/experiment.hpp"
#include "bdp/model.hpp"
#include "bdp/simulate.hpp"
#include "bdp/solver.hpp"
#include "bdp/transform.hpp"

namespace {

using bdp::csv::fmt;

struct SpecArgs {
  std::string spec_file;
  double lambda = 0, mu = 0;

  void attach(CLI::App* cmd) {
    auto* file = cmd->add_option("--spec", spec_file,
                                 "process definition file (see docs/config.md)");
    auto* lam = cmd->add_option("--lambda", lambda,
                                "birth rate of an inline constant process");
    auto* m = cmd->add_option("--mu", mu,
                              "death rate of an inline constant process");
    lam->needs(m);
    m->needs(lam);
    file->excludes(lam);
  }

  bdp::ProcessSpec resolve() const {
    if (!spec_file.empty()) return bdp::load_process(spec_file);
    if (lambda > 0 || mu > 0) return bdp::ProcessSpec::constant(lambda, mu);
    throw bdp::config_error("give --spec or --lambda/--mu");
  }
};

struct NuArgs {
  double nu0 = 1.0;
  double d0 = 0.0;
  double c = 0.0;
  double beta = 1.0;
  bool has_d0 = false, has_c = false;

  void attach(CLI::App* cmd) {
    cmd->add_option("--nu0", nu0, "nu at state 0 (recurrence mode)");
    cmd->add_option("--d0", d0, "first increment nu_1 - nu_0 (recurrence mode)")
        ->each([this](const std::string&) { has_d0 = true; });
    cmd->add_option("--c", c, "ratio c of the closed-form family 1 + beta c^n")
        ->each([this](const std::string&) { has_c = true; });
    cmd->add_option("--beta", beta, "beta of the closed-form family");
  }

  bdp::NuSequence build(const bdp::ProcessSpec& spec,
                        const bdp::StateWindow& window) const {
    if (has_d0 && has_c)
      throw bdp::config_error("give --d0 (recurrence) or --c (closed form), "
                              "not both");
    if (has_d0) return bdp::nu_from_recurrence(spec, window, nu0, d0);
    if (has_c) return bdp::nu_constant_ratio(c, beta, window);
    const auto ratio = spec.rate_ratio();
    if (ratio) return bdp::nu_constant_ratio(*ratio, beta, window);
    throw bdp::config_error(
        "general rate tables need --d0 (recurrence) or an explicit --c");
  }
};

struct OutArg {
  std::string path;
  std::ofstream file;

  void attach(CLI::App* cmd) {
    cmd->add_option("--out", path, "output file (default: stdout)");
  }

  std::ostream& stream() {
    if (path.empty()) return std::cout;
    file.open(path);
    if (!file) throw bdp::config_error("cannot open output file '" + path + "'");
    return file;
  }
};

bdp::StateWindow window_from(const std::vector<int>& w) {
  return bdp::StateWindow(w[0], w[1]);
}

int cmd_nu(const SpecArgs& spec_args, const NuArgs& nu_args,
           const std::vector<int>& window, OutArg& out_arg) {
  const bdp::ProcessSpec spec = spec_args.resolve();
  const bdp::StateWindow w = window_from(window);
  const bdp::NuSequence nu = nu_args.build(spec, w);
  std::ostream& out = out_arg.stream();
  out << "n,nu,d,residual\n";
  for (int n = w.lo; n <= w.hi; ++n) {
    out << n << "," << fmt(nu.at(n)) << ",";
    if (n < w.hi) out << fmt(nu.increment(n));
    out << ",";
    if (w.interior(n)) out << fmt(bdp::nu_residual(spec, nu, n));
    out << "\n";
  }
  return 0;
}

int cmd_transform(const SpecArgs& spec_args, const NuArgs& nu_args,
                  const std::vector<int>& window, OutArg& out_arg) {
  const bdp::ProcessSpec spec = spec_args.resolve();
  const bdp::NuSequence nu = nu_args.build(spec, window_from(window));
  const bdp::TransformedProcess tp = bdp::transform_process(spec, nu);
  bdp::save_process(tp.spec, out_arg.stream());
  return 0;
}

int cmd_solve(const SpecArgs& spec_args, int k, double t_max, int grid,
              double rel_tol, const std::vector<int>& window, OutArg& out_arg) {
  const bdp::ProcessSpec spec = spec_args.resolve();
  const bdp::StateWindow w = window.empty()
                                 ? bdp::auto_window(spec, k, t_max, rel_tol)
                                 : window_from(window);
  const auto times = bdp::uniform_grid(t_max, grid);
  const bdp::TransitionSlice slice =
      bdp::solve_forward(spec, w, k, times, rel_tol);
  std::ostream& out = out_arg.stream();
  out << "t,n,p\n";
  for (size_t ti = 0; ti < times.size(); ++ti)
    for (int n = w.lo; n <= w.hi; ++n)
      out << fmt(times[ti]) << "," << n << "," << fmt(slice.at(ti, n)) << "\n";
  std::cerr << "window [" << w.lo << "," << w.hi << "], final deficit "
            << fmt(slice.deficit.back()) << "\n";
  return 0;
}

int cmd_fpt(const SpecArgs& spec_args, int k, int s, double t_max, int grid,
            double rel_tol, const std::vector<int>& window, OutArg& out_arg) {
  const bdp::ProcessSpec spec = spec_args.resolve();
  const bdp::StateWindow w = window.empty()
                                 ? bdp::auto_window(spec, k, t_max, rel_tol)
                                 : window_from(window);
  const auto times = bdp::uniform_grid(t_max, grid);
  const bdp::FPTDensity g = bdp::fpt_numeric(spec, w, k, s, times, rel_tol);
  std::ostream& out = out_arg.stream();
  out << "t,g,absorbed_mass\n";
  for (size_t ti = 0; ti < times.size(); ++ti)
    out << fmt(times[ti]) << "," << fmt(g.density[ti]) << ","
        << fmt(g.absorbed_mass[ti]) << "\n";
  std::cerr << "censored mass " << fmt(g.censored_mass) << ", far-edge deficit "
            << fmt(g.deficit) << "\n";
  return 0;
}

int cmd_simulate(const SpecArgs& spec_args, int k, std::optional<int> s,
                 std::optional<double> t_opt, long trials, int bins,
                 std::uint64_t seed, int threads, OutArg& out_arg) {
  const bdp::ProcessSpec spec = spec_args.resolve();
  double t;
  if (t_opt) {
    t = *t_opt;
  } else if (s) {
    // Default crossing horizon for constant-ratio rates: long enough
    // that the censored tail is negligible against Monte Carlo noise.
    const auto ratio = spec.rate_ratio();
    if (!ratio || *ratio == 1.0)
      throw bdp::config_error(
          "--t is required (no default horizon without a constant "
          "rate ratio away from 1)");
    t = 50.0 / std::fabs(std::log(*ratio));
    std::cerr << "horizon defaulted to " << fmt(t) << "\n";
  } else {
    throw bdp::config_error("--t is required for transition estimation");
  }
  std::ostream& out = out_arg.stream();
  if (!s) {
    const bdp::TransitionHistogram hist =
        bdp::estimate_transition(spec, k, t, trials, seed, threads);
    out << "n,frequency\n";
    for (const auto& [state, count] : hist.counts)
      out << state << "," << fmt(static_cast<double>(count) / trials) << "\n";
    return 0;
  }
  const bdp::FptEstimate est =
      bdp::estimate_fpt(spec, k, *s, t, trials, bins, seed, threads);
  out << "bin_center,density\n";
  for (size_t b = 0; b < est.histogram.times.size(); ++b)
    out << fmt(est.histogram.times[b]) << "," << fmt(est.histogram.density[b])
        << "\n";
  const auto& ce = est.crossing;
  std::cerr << "crossing estimate: point " << fmt(ce.point) << ", ci95 +/- "
            << fmt(ce.ci_half_width) << ", censored_fraction "
            << fmt(est.histogram.censored_mass) << " (" << ce.hits << "/"
            << ce.trials << " hits by t = " << fmt(ce.horizon) << ")\n";
  return 0;
}

int cmd_example(double lambda, double mu, double beta, int k, int n,
                double t_max, int grid, OutArg& out_arg) {
  const auto times = bdp::uniform_grid(t_max, grid);
  std::ostream& out = out_arg.stream();
  out << "t,p,p_tilde,g,g_tilde,ratio\n";
  for (const double t : times) {
    const double p = bdp::transition_prob_const(lambda, mu, k, n, t);
    const double pt =
        bdp::transformed_transition_const(lambda, mu, beta, k, n, t);
    const double g = (t > 0) ? bdp::fpt_density_const(lambda, mu, k, n, t)
                             : bdp::fpt_density_const_at0(lambda, mu, k, n);
    const double gt =
        (t > 0) ? bdp::transformed_fpt_const(lambda, mu, beta, k, n, t)
                : bdp::transformed_fpt_const_at0(lambda, mu, beta, k, n);
    const double c = mu / lambda;
    const double ratio = (p > 0)
                             ? pt / p
                             : (1.0 + beta * std::pow(c, n)) /
                                   (1.0 + beta * std::pow(c, k));
    out << fmt(t) << "," << fmt(p) << "," << fmt(pt) << "," << fmt(g) << ","
        << fmt(gt) << "," << fmt(ratio) << "\n";
  }
  return 0;
}

int cmd_verify(const std::string& config_path, OutArg& out_arg) {
  const bdp::ExperimentConfig cfg = bdp::parse_config(config_path);
  if (out_arg.path.empty() && cfg.out) out_arg.path = *cfg.out;
  const bdp::VerifyReport report = bdp::run_verify(cfg, out_arg.stream());
  return report.pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bilateral birth-death process toolkit"};
  app.require_subcommand(1);

  SpecArgs spec_args;
  NuArgs nu_args;
  OutArg out_arg;
  std::vector<int> window;
  int k = 0, s = 1, n = 1, grid = 200, bins = 50, threads = 0;
  std::optional<int> opt_s;
  std::optional<double> opt_t;
  double t_max = 1.0, rel_tol = 1e-10, lambda = 1.0, mu = 2.0, beta = 1.0;
  long trials = 100000;
  std::uint64_t seed = 42;
  std::string config_path;

  auto* nu_cmd = app.add_subcommand(
      "nu", "build a nu sequence and print (n, nu, d, residual) rows");
  spec_args.attach(nu_cmd);
  nu_args.attach(nu_cmd);
  nu_cmd->add_option("--window", window, "window lo hi")
      ->expected(2)
      ->required();
  out_arg.attach(nu_cmd);

  auto* tr_cmd = app.add_subcommand(
      "transform", "emit the similarity-transformed rate table");
  spec_args.attach(tr_cmd);
  nu_args.attach(tr_cmd);
  tr_cmd->add_option("--window", window, "window lo hi")
      ->expected(2)
      ->required();
  out_arg.attach(tr_cmd);

  auto* solve_cmd = app.add_subcommand(
      "solve", "integrate the forward equations; CSV (t, n, p)");
  spec_args.attach(solve_cmd);
  solve_cmd->add_option("--k", k, "initial state")->required();
  solve_cmd->add_option("--t-max", t_max, "time horizon")->required();
  solve_cmd->add_option("--grid", grid, "number of grid times");
  solve_cmd->add_option("--rel-tol", rel_tol, "integrator tolerance");
  solve_cmd->add_option("--window", window, "window lo hi (default: auto)")
      ->expected(2);
  out_arg.attach(solve_cmd);

  auto* fpt_cmd = app.add_subcommand(
      "fpt", "first-passage density via an absorbing state; CSV "
             "(t, g, absorbed_mass)");
  spec_args.attach(fpt_cmd);
  fpt_cmd->add_option("--k", k, "start state")->required();
  fpt_cmd->add_option("--s", s, "target state")->required();
  fpt_cmd->add_option("--t-max", t_max, "time horizon")->required();
  fpt_cmd->add_option("--grid", grid, "number of grid times");
  fpt_cmd->add_option("--rel-tol", rel_tol, "integrator tolerance");
  fpt_cmd->add_option("--window", window, "window lo hi (default: auto)")
      ->expected(2);
  out_arg.attach(fpt_cmd);

  auto* sim_cmd = app.add_subcommand(
      "simulate", "exact path simulation: transition frequencies, or with "
                  "--s a first-passage histogram and crossing estimate");
  spec_args.attach(sim_cmd);
  sim_cmd->add_option("--k", k, "start state")->required();
  sim_cmd->add_option("--s", opt_s, "first-passage target state");
  sim_cmd->add_option("--t", opt_t,
                      "horizon / observation time (first-passage runs on "
                      "constant-ratio rates default to 50/|ln(mu/lambda)|)");
  sim_cmd->add_option("--trials", trials, "number of independent paths");
  sim_cmd->add_option("--bins", bins, "histogram bins over [0, t]");
  sim_cmd->add_option("--seed", seed, "master seed");
  sim_cmd->add_option("--threads", threads, "worker threads (0 = hardware)");
  out_arg.attach(sim_cmd);

  auto* ex_cmd = app.add_subcommand(
      "example", "closed forms for the constant-rate process and its "
                 "transform; CSV (t, p, p_tilde, g, g_tilde, ratio)");
  ex_cmd->add_option("--lambda", lambda, "birth rate")->required();
  ex_cmd->add_option("--mu", mu, "death rate")->required();
  ex_cmd->add_option("--beta", beta, "beta of nu_n = 1 + beta (mu/lambda)^n");
  ex_cmd->add_option("--n", n, "target state (used as both n and s)")
      ->required();
  ex_cmd->add_option("--k", k, "initial state");
  ex_cmd->add_option("--t-max", t_max, "time horizon")->required();
  ex_cmd->add_option("--grid", grid, "number of grid times");
  out_arg.attach(ex_cmd);

  auto* ver_cmd = app.add_subcommand(
      "verify", "run the product-form identity cross-checks from a config "
                "file; exit 0 iff all pass");
  ver_cmd->add_option("config", config_path, "experiment config file")
      ->required();
  out_arg.attach(ver_cmd);

  CLI11_PARSE(app, argc, argv);

  try {
    if (nu_cmd->parsed()) return cmd_nu(spec_args, nu_args, window, out_arg);
    if (tr_cmd->parsed())
      return cmd_transform(spec_args, nu_args, window, out_arg);
    if (solve_cmd->parsed())
      return cmd_solve(spec_args, k, t_max, grid, rel_tol, window, out_arg);
    if (fpt_cmd->parsed())
      return cmd_fpt(spec_args, k, s, t_max, grid, rel_tol, window, out_arg);
    if (sim_cmd->parsed())
      return cmd_simulate(spec_args, k, opt_s, opt_t, trials, bins, seed,
                          threads, out_arg);
    if (ex_cmd->parsed())
      return cmd_example(lambda, mu, beta, k, n, t_max, grid, out_arg);
    if (ver_cmd->parsed()) return cmd_verify(config_path, out_arg);
  } catch (const bdp::config_error& e) {
    std::cerr << "config error";
    if (e.line > 0) std::cerr << " (line " << e.line << ")";
    std::cerr << ": " << e.what() << "\n";
    return 2;
  } catch (const bdp::error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
