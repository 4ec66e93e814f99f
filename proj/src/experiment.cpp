#include "bdp/experiment.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>

#include "bdp/analytic.hpp"
#include "bdp/csv.hpp"
#include "bdp/solver.hpp"
#include "kv_config.hpp"

namespace bdp {

namespace {

std::uint64_t parse_seed(const std::string& tok, int line) {
  // stoull wraps negative input silently; reject it up front.
  if (tok.empty() || tok[0] == '-')
    throw config_error("expected a non-negative integer seed, got '" + tok +
                           "'",
                       line);
  try {
    size_t pos = 0;
    const std::uint64_t v = std::stoull(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw config_error("expected a non-negative integer seed, got '" + tok +
                           "'",
                       line);
  }
}

}  // namespace

ProcessSpec ExperimentConfig::resolve_process() const {
  if (process_file) return load_process(*process_file);
  if (inline_lambda && inline_mu)
    return ProcessSpec::constant(*inline_lambda, *inline_mu);
  throw config_error(
      "no process given: set process.file or process.kind constant with "
      "process.lambda and process.mu");
}

ExperimentConfig parse_config_text(std::istream& in, const std::string& name) {
  ExperimentConfig cfg;
  std::optional<int> window_lo, window_hi;
  std::optional<std::string> inline_kind;
  std::filesystem::path dir = std::filesystem::path(name).parent_path();

  for (const kv::Line& line : kv::tokenize(in)) {
    if (line.tokens.size() != 2)
      throw config_error("expected 'key value'", line.number);
    const std::string& key = line.tokens[0];
    const std::string& val = line.tokens[1];
    const int ln = line.number;

    if (key == "process.file") {
      std::filesystem::path p(val);
      cfg.process_file = (p.is_absolute() || dir.empty())
                             ? p.string()
                             : (dir / p).string();
    } else if (key == "process.kind") {
      if (val != "constant")
        throw config_error(
            "only 'constant' processes can be defined inline; use "
            "process.file for tables",
            ln);
      inline_kind = val;
    } else if (key == "process.lambda") {
      cfg.inline_lambda = kv::parse_number(val, ln);
      if (!(*cfg.inline_lambda > 0))
        throw config_error("process.lambda must be > 0", ln);
    } else if (key == "process.mu") {
      cfg.inline_mu = kv::parse_number(val, ln);
      if (!(*cfg.inline_mu > 0))
        throw config_error("process.mu must be > 0", ln);
    } else if (key == "nu.mode") {
      if (val == "recurrence")
        cfg.nu_mode = ExperimentConfig::NuMode::recurrence;
      else if (val == "constant_ratio")
        cfg.nu_mode = ExperimentConfig::NuMode::constant_ratio;
      else
        throw config_error(
            "nu.mode must be 'recurrence' or 'constant_ratio', got '" + val +
                "'",
            ln);
      cfg.nu_mode_set = true;
    } else if (key == "nu.nu0") {
      cfg.nu0 = kv::parse_number(val, ln);
      if (!(cfg.nu0 > 0)) throw config_error("nu.nu0 must be > 0", ln);
    } else if (key == "nu.d0") {
      cfg.d0 = kv::parse_number(val, ln);
    } else if (key == "nu.c") {
      cfg.c = kv::parse_number(val, ln);
      if (!(*cfg.c > 0)) throw config_error("nu.c must be > 0", ln);
    } else if (key == "nu.beta") {
      cfg.beta = kv::parse_number(val, ln);
      if (!(cfg.beta > 0)) throw config_error("nu.beta must be > 0", ln);
    } else if (key == "window.lo") {
      window_lo = kv::parse_int(val, ln);
    } else if (key == "window.hi") {
      window_hi = kv::parse_int(val, ln);
    } else if (key == "k") {
      cfg.k = kv::parse_int(val, ln);
    } else if (key == "s") {
      cfg.s = kv::parse_int(val, ln);
    } else if (key == "n") {
      cfg.n = kv::parse_int(val, ln);
    } else if (key == "t_max") {
      cfg.t_max = kv::parse_number(val, ln);
      if (!(cfg.t_max > 0)) throw config_error("t_max must be > 0", ln);
    } else if (key == "grid") {
      cfg.grid = kv::parse_int(val, ln);
      if (cfg.grid < 2) throw config_error("grid must be >= 2", ln);
    } else if (key == "rel_tol") {
      cfg.rel_tol = kv::parse_number(val, ln);
      if (!(cfg.rel_tol >= 1e-13 && cfg.rel_tol <= 1e-6))
        throw config_error("rel_tol must lie in [1e-13, 1e-6]", ln);
    } else if (key == "trials") {
      cfg.trials = kv::parse_long(val, ln);
      if (cfg.trials < 1) throw config_error("trials must be >= 1", ln);
    } else if (key == "bins") {
      cfg.bins = kv::parse_int(val, ln);
      if (cfg.bins < 1) throw config_error("bins must be >= 1", ln);
    } else if (key == "seed") {
      cfg.seed = parse_seed(val, ln);
    } else if (key == "threads") {
      cfg.threads = kv::parse_int(val, ln);
      if (cfg.threads < 0) throw config_error("threads must be >= 0", ln);
    } else if (key == "tol.transition") {
      cfg.tol_transition = kv::parse_number(val, ln);
      if (!(cfg.tol_transition > 0))
        throw config_error("tol.transition must be > 0", ln);
    } else if (key == "tol.fpt") {
      cfg.tol_fpt = kv::parse_number(val, ln);
      if (!(cfg.tol_fpt > 0)) throw config_error("tol.fpt must be > 0", ln);
    } else if (key == "tol.crossing") {
      cfg.tol_crossing = kv::parse_number(val, ln);
      if (!(cfg.tol_crossing > 0))
        throw config_error("tol.crossing must be > 0", ln);
    } else if (key == "tol.renewal") {
      cfg.tol_renewal = kv::parse_number(val, ln);
      if (!(cfg.tol_renewal > 0))
        throw config_error("tol.renewal must be > 0", ln);
    } else if (key == "out") {
      cfg.out = val;
    } else {
      throw config_error("unknown key '" + key + "' in " + name, ln);
    }
  }

  if (inline_kind && (!cfg.inline_lambda || !cfg.inline_mu))
    throw config_error(
        "inline constant process needs process.lambda and process.mu");
  if (cfg.process_file && inline_kind)
    throw config_error("give either process.file or an inline process, "
                       "not both");
  if (window_lo.has_value() != window_hi.has_value())
    throw config_error("window.lo and window.hi must be given together");
  if (window_lo) {
    try {
      cfg.window = StateWindow(*window_lo, *window_hi);
    } catch (const error& e) {
      throw config_error(e.what());
    }
  }
  if (cfg.k == cfg.s)
    throw config_error("k and s must differ (first-passage target)");
  if (cfg.nu_mode_set &&
      cfg.nu_mode == ExperimentConfig::NuMode::recurrence && !cfg.d0)
    throw config_error("nu.mode recurrence requires nu.d0");
  return cfg;
}

ExperimentConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config file '" + path + "'");
  return parse_config_text(in, path);
}

bool VerifyReport::pass() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

namespace {

NuSequence build_nu(const ExperimentConfig& cfg, const ProcessSpec& spec,
                    const StateWindow& window) {
  if (!cfg.nu_mode_set)
    throw config_error("nu.mode is required (recurrence or constant_ratio)");
  if (cfg.nu_mode == ExperimentConfig::NuMode::recurrence)
    return nu_from_recurrence(spec, window, cfg.nu0, *cfg.d0);
  double c;
  if (cfg.c) {
    c = *cfg.c;
  } else {
    const auto ratio = spec.rate_ratio();
    if (!ratio)
      throw config_error(
          "nu.c is required for general rate tables (no constant mu/lambda "
          "ratio to infer it from)");
    c = *ratio;
  }
  return nu_constant_ratio(c, cfg.beta, window);
}

StateWindow resolve_window(const ExperimentConfig& cfg,
                           const ProcessSpec& spec, int n_renewal) {
  if (cfg.window) return *cfg.window;
  if (spec.domain()) return *spec.domain();
  const Rates r = spec.rates_at(cfg.k);
  const int m =
      static_cast<int>(std::ceil(8.0 + 3.0 * cfg.t_max * (r.lambda + r.mu)));
  const int lo = std::min({cfg.k, cfg.s, n_renewal}) - m;
  const int hi = std::max({cfg.k, cfg.s, n_renewal}) + m;
  return StateWindow(lo, hi);
}

void log_check(std::ostream& log, const VerifyCheck& c) {
  log << (c.pass ? "PASS " : "FAIL ") << c.name << ": max residual "
      << csv::fmt(c.max_residual) << " (tol " << csv::fmt(c.tol) << ")";
  if (!c.note.empty()) log << " [" << c.note << "]";
  log << "\n";
}

}  // namespace

VerifyReport run_verify(const ExperimentConfig& cfg, std::ostream& log) {
  VerifyReport report;
  const ProcessSpec spec = cfg.resolve_process();

  const int n_renewal =
      cfg.n.value_or(cfg.k < cfg.s ? cfg.s + 1 : cfg.s - 1);
  const bool upward = cfg.k < cfg.s && cfg.s <= n_renewal;
  const bool downward = n_renewal <= cfg.s && cfg.s < cfg.k;
  if (!upward && !downward)
    throw config_error(
        "renewal check needs k < s <= n or n <= s < k; adjust k, s, n");

  const StateWindow nu_window = resolve_window(cfg, spec, n_renewal);
  const NuSequence nu = build_nu(cfg, spec, nu_window);
  const TransformedProcess transformed = transform_process(spec, nu);
  const StateWindow inner = *transformed.spec.domain();

  if (!inner.interior(cfg.k) || !inner.interior(cfg.s) ||
      !inner.contains(n_renewal))
    throw config_error(
        "k, s and n must lie strictly inside the transformed window [" +
        std::to_string(inner.lo) + "," + std::to_string(inner.hi) + "]");

  const std::vector<double> times = uniform_grid(cfg.t_max, cfg.grid);

  // Transition product form: independent solves of both processes.
  {
    const TransitionSlice p =
        solve_forward(spec, inner, cfg.k, times, cfg.rel_tol);
    const TransitionSlice pt =
        solve_forward(transformed.spec, inner, cfg.k, times, cfg.rel_tol);
    double max_res = 0.0;
    for (size_t ti = 0; ti < times.size(); ++ti)
      for (int n = inner.lo; n <= inner.hi; ++n)
        max_res = std::max(
            max_res, std::fabs(pt.at(ti, n) - predict_transition(
                                                  nu, cfg.k, n, p.at(ti, n))));
    report.checks.push_back({"transition-identity", max_res,
                             cfg.tol_transition, max_res <= cfg.tol_transition,
                             ""});
    log_check(log, report.checks.back());
  }

  // First-passage product form and the crossing-mass relation.
  {
    const FPTDensity g =
        fpt_numeric(spec, inner, cfg.k, cfg.s, times, cfg.rel_tol);
    const FPTDensity gt = fpt_numeric(transformed.spec, inner, cfg.k, cfg.s,
                                      times, cfg.rel_tol);
    double max_res = 0.0;
    for (size_t ti = 0; ti < times.size(); ++ti)
      max_res = std::max(
          max_res, std::fabs(gt.density[ti] -
                             predict_fpt(nu, cfg.k, cfg.s, g.density[ti])));
    report.checks.push_back(
        {"fpt-identity", max_res, cfg.tol_fpt, max_res <= cfg.tol_fpt, ""});
    log_check(log, report.checks.back());

    const double P = g.absorbed_mass.back();
    const double Pt = gt.absorbed_mass.back();
    const double res =
        std::fabs(Pt - predict_crossing(nu, cfg.k, cfg.s, P));
    report.checks.push_back(
        {"crossing-relation", res, cfg.tol_crossing, res <= cfg.tol_crossing,
         "absorbed mass by t_max: " + csv::fmt(P) + " vs " + csv::fmt(Pt)});
    log_check(log, report.checks.back());
  }

  // For the constant-rate closed-form family, cross the quadrature of
  // the analytic densities against the ruin oracle and the ratio.
  if (spec.kind() == ProcessSpec::Kind::constant &&
      std::holds_alternative<NuSequence::RatioOrigin>(nu.origin())) {
    const auto origin = std::get<NuSequence::RatioOrigin>(nu.origin());
    const Rates r = spec.rates_at(0);
    const double Pq = crossing_prob_quadrature(r.lambda, r.mu, cfg.k, cfg.s);
    const double Ptq = transformed_crossing_quadrature(
        r.lambda, r.mu, origin.beta, cfg.k, cfg.s);
    const double res = std::fabs(Ptq - nu.ratio(cfg.s, cfg.k) * Pq);
    const double oracle = crossing_prob_const(r.lambda, r.mu, cfg.k, cfg.s);
    report.checks.push_back(
        {"crossing-quadrature", res, cfg.tol_crossing,
         res <= cfg.tol_crossing,
         "quadrature " + csv::fmt(Pq) + ", ruin oracle " + csv::fmt(oracle)});
    log_check(log, report.checks.back());
  }

  // Renewal spot check on a fine internal grid, both processes. The
  // trapezoid-rule error scales like t_max^3 / points^2, so the grid
  // grows with the horizon.
  {
    const int fine_points = static_cast<int>(std::min(
        20001.0, 2000.0 * std::ceil(std::max(1.0, cfg.t_max)) + 1.0));
    const std::vector<double> fine = uniform_grid(cfg.t_max, fine_points);
    const double t_spot = fine[(fine_points - 1) / 2];
    double max_res = 0.0;
    for (const ProcessSpec* proc : {&spec, &transformed.spec}) {
      const FPTDensity g =
          fpt_numeric(*proc, inner, cfg.k, cfg.s, fine, cfg.rel_tol);
      const TransitionSlice from_s =
          solve_forward(*proc, inner, cfg.s, fine, cfg.rel_tol);
      const TransitionSlice from_k =
          solve_forward(*proc, inner, cfg.k, fine, cfg.rel_tol);
      const double conv = convolve_renewal(g, from_s, n_renewal, t_spot);
      const size_t spot_index = (fine_points - 1) / 2;
      max_res = std::max(
          max_res, std::fabs(conv - from_k.at(spot_index, n_renewal)));
    }
    report.checks.push_back({"renewal-identity", max_res, cfg.tol_renewal,
                             max_res <= cfg.tol_renewal,
                             "t = " + csv::fmt(t_spot)});
    log_check(log, report.checks.back());
  }

  log << (report.pass() ? "PASS" : "FAIL") << " overall ("
      << report.checks.size() << " checks)\n";
  return report;
}

}  // namespace bdp
