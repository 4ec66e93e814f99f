#include "bdp/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "bdp/csv.hpp"
#include "kv_config.hpp"

namespace bdp {

StateWindow::StateWindow(int lo_, int hi_) : lo(lo_), hi(hi_) {
  if (lo >= hi)
    throw parameter_error("state window [" + std::to_string(lo) + "," +
                          std::to_string(hi) + "] is empty or reversed");
  if (width() < 3)
    throw parameter_error("state window must span at least 3 states, got " +
                          std::to_string(width()));
}

std::string ValidationReport::to_string() const {
  if (ok()) return "ok";
  std::string s = "invalid rates at " + std::to_string(violations.size()) +
                  " state(s):";
  for (const auto& v : violations)
    s += "\n  state " + std::to_string(v.state) + ": " + v.what;
  return s;
}

ValidationReport validate_rates(const StateWindow& window,
                                const std::vector<double>& lambda,
                                const std::vector<double>& mu) {
  ValidationReport report;
  if (lambda.size() != static_cast<size_t>(window.width()) ||
      mu.size() != static_cast<size_t>(window.width()))
    throw parameter_error("rate tables must have one entry per window state");
  for (int n = window.lo; n <= window.hi; ++n) {
    const double l = lambda[window.index_of(n)];
    const double m = mu[window.index_of(n)];
    if (!(l > 0) || !std::isfinite(l))
      report.violations.push_back(
          {n, "lambda = " + csv::fmt(l) + " (must be > 0)"});
    if (!(m > 0) || !std::isfinite(m))
      report.violations.push_back({n, "mu = " + csv::fmt(m) + " (must be > 0)"});
  }
  return report;
}

ProcessSpec ProcessSpec::constant(double lambda, double mu) {
  if (!(lambda > 0) || !std::isfinite(lambda))
    throw validation_error("constant birth rate must be > 0, got " +
                           csv::fmt(lambda));
  if (!(mu > 0) || !std::isfinite(mu))
    throw validation_error("constant death rate must be > 0, got " +
                           csv::fmt(mu));
  ProcessSpec s;
  s.kind_ = Kind::constant;
  s.const_lambda_ = lambda;
  s.const_mu_ = mu;
  return s;
}

ProcessSpec ProcessSpec::table(const StateWindow& window,
                               std::vector<double> lambda,
                               std::vector<double> mu) {
  auto report = validate_rates(window, lambda, mu);
  if (!report.ok()) throw validation_error(report.to_string());
  ProcessSpec s;
  s.kind_ = Kind::table;
  s.domain_ = window;
  s.lambda_ = std::move(lambda);
  s.mu_ = std::move(mu);
  return s;
}

ProcessSpec ProcessSpec::geometric_ratio(const StateWindow& window,
                                         std::vector<double> lambda,
                                         double c) {
  if (!(c > 0) || !std::isfinite(c))
    throw parameter_error("rate ratio c must be > 0, got " + csv::fmt(c));
  std::vector<double> mu(lambda.size());
  for (size_t i = 0; i < lambda.size(); ++i) mu[i] = c * lambda[i];
  auto report = validate_rates(window, lambda, mu);
  if (!report.ok()) throw validation_error(report.to_string());
  ProcessSpec s;
  s.kind_ = Kind::geometric_ratio;
  s.domain_ = window;
  s.ratio_c_ = c;
  s.lambda_ = std::move(lambda);
  s.mu_ = std::move(mu);
  return s;
}

Rates ProcessSpec::rates_at(int n) const {
  if (kind_ == Kind::constant) return {const_lambda_, const_mu_};
  if (!domain_->contains(n))
    throw domain_error("state " + std::to_string(n) +
                       " outside the rate table window [" +
                       std::to_string(domain_->lo) + "," +
                       std::to_string(domain_->hi) + "]");
  const int i = domain_->index_of(n);
  return {lambda_[i], mu_[i]};
}

double ProcessSpec::max_exit_rate(const StateWindow& window) const {
  double r = 0;
  for (int n = window.lo; n <= window.hi; ++n) {
    const Rates rt = rates_at(n);
    r = std::max(r, rt.lambda + rt.mu);
  }
  return r;
}

std::optional<double> ProcessSpec::rate_ratio() const {
  if (kind_ == Kind::constant) return const_mu_ / const_lambda_;
  if (kind_ == Kind::geometric_ratio) return ratio_c_;
  return std::nullopt;
}

ValidationReport validate_spec(const ProcessSpec& spec,
                               const StateWindow& window) {
  ValidationReport report;
  for (int n = window.lo; n <= window.hi; ++n) {
    if (!spec.has_state(n)) {
      report.violations.push_back({n, "no rates defined at this state"});
      continue;
    }
    const Rates r = spec.rates_at(n);
    if (!(r.lambda > 0))
      report.violations.push_back(
          {n, "lambda = " + csv::fmt(r.lambda) + " (must be > 0)"});
    if (!(r.mu > 0))
      report.violations.push_back(
          {n, "mu = " + csv::fmt(r.mu) + " (must be > 0)"});
  }
  return report;
}

using kv::Line;
using kv::looks_like_int;
using kv::parse_int;
using kv::parse_number;
using kv::tokenize;

ProcessSpec parse_process(std::istream& in, const std::string& name) {
  std::optional<std::string> kind;
  std::optional<double> lambda, mu, c;
  struct Row {
    int n;
    double lambda;
    std::optional<double> mu;
    int line;
  };
  std::vector<Row> rows;

  for (const Line& line : tokenize(in)) {
    const std::string& key = line.tokens[0];
    if (looks_like_int(key)) {
      if (line.tokens.size() != 2 && line.tokens.size() != 3)
        throw config_error(
            "table row must be '<n> <lambda> <mu>' or '<n> <lambda>'",
            line.number);
      Row row{parse_int(key, line.number),
              parse_number(line.tokens[1], line.number), std::nullopt,
              line.number};
      if (line.tokens.size() == 3)
        row.mu = parse_number(line.tokens[2], line.number);
      rows.push_back(row);
      continue;
    }
    if (line.tokens.size() != 2)
      throw config_error("expected 'key value'", line.number);
    const std::string& val = line.tokens[1];
    if (key == "kind") {
      kind = val;
      if (val != "constant" && val != "table" && val != "geometric_ratio")
        throw config_error("unknown process kind '" + val + "'", line.number);
    } else if (key == "lambda") {
      lambda = parse_number(val, line.number);
    } else if (key == "mu") {
      mu = parse_number(val, line.number);
    } else if (key == "c") {
      c = parse_number(val, line.number);
    } else {
      throw config_error("unknown key '" + key + "' in " + name, line.number);
    }
  }

  if (!kind) throw config_error("missing 'kind' in " + name);
  try {
    if (*kind == "constant") {
      if (!lambda || !mu)
        throw config_error("constant kind needs 'lambda' and 'mu'");
      if (!rows.empty())
        throw config_error("constant kind takes no table rows", rows[0].line);
      return ProcessSpec::constant(*lambda, *mu);
    }

    if (rows.empty()) throw config_error("no table rows in " + name);
    std::sort(rows.begin(), rows.end(),
              [](const Row& a, const Row& b) { return a.n < b.n; });
    for (size_t i = 1; i < rows.size(); ++i) {
      if (rows[i].n == rows[i - 1].n)
        throw config_error("duplicate row for state " +
                               std::to_string(rows[i].n),
                           rows[i].line);
      if (rows[i].n != rows[i - 1].n + 1)
        throw config_error("gap in table rows between states " +
                               std::to_string(rows[i - 1].n) + " and " +
                               std::to_string(rows[i].n),
                           rows[i].line);
    }
    StateWindow window(rows.front().n, rows.back().n);

    std::vector<double> lam, m;
    lam.reserve(rows.size());
    m.reserve(rows.size());
    if (*kind == "table") {
      for (const Row& r : rows) {
        if (!r.mu)
          throw config_error("table rows need '<n> <lambda> <mu>'", r.line);
        lam.push_back(r.lambda);
        m.push_back(*r.mu);
      }
      return ProcessSpec::table(window, std::move(lam), std::move(m));
    }

    // geometric_ratio
    if (!c) throw config_error("geometric_ratio kind needs 'c'");
    for (const Row& r : rows) {
      if (r.mu)
        throw config_error(
            "geometric_ratio rows are '<n> <lambda>' (mu is c*lambda)",
            r.line);
      lam.push_back(r.lambda);
    }
    return ProcessSpec::geometric_ratio(window, std::move(lam), *c);
  } catch (const config_error&) {
    throw;
  } catch (const error& e) {
    throw config_error(std::string(e.what()) + " in " + name);
  }
}

ProcessSpec load_process(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open process file '" + path + "'");
  return parse_process(in, path);
}

void save_process(const ProcessSpec& spec, std::ostream& out) {
  switch (spec.kind()) {
    case ProcessSpec::Kind::constant: {
      const Rates r = spec.rates_at(0);
      out << "kind constant\n";
      out << "lambda " << csv::fmt(r.lambda) << "\n";
      out << "mu " << csv::fmt(r.mu) << "\n";
      return;
    }
    case ProcessSpec::Kind::geometric_ratio: {
      out << "kind geometric_ratio\n";
      out << "c " << csv::fmt(*spec.rate_ratio()) << "\n";
      const StateWindow w = *spec.domain();
      for (int n = w.lo; n <= w.hi; ++n)
        out << n << " " << csv::fmt(spec.rates_at(n).lambda) << "\n";
      return;
    }
    case ProcessSpec::Kind::table: {
      out << "kind table\n";
      const StateWindow w = *spec.domain();
      for (int n = w.lo; n <= w.hi; ++n) {
        const Rates r = spec.rates_at(n);
        out << n << " " << csv::fmt(r.lambda) << " " << csv::fmt(r.mu) << "\n";
      }
      return;
    }
  }
}

}  // namespace bdp
