#include "cli/commands.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>

#include "contest/design.hpp"
#include "contest/errors.hpp"
#include "contest/metrics.hpp"
#include "contest/montecarlo.hpp"
#include "contest/numerics.hpp"

namespace contest::cli {
namespace {

using nlohmann::json;

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

// Plot-ready table written as CSV.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add(std::vector<std::string> row) { rows.push_back(std::move(row)); }

  void write(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw UsageError("cannot write CSV file '" + path + "'");
    auto line = [&](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
      out << '\n';
    };
    line(header);
    for (const auto& r : rows) line(r);
  }
};

std::string num(double v) { return format_number(v); }
std::string num(std::size_t v) { return std::to_string(v); }
std::string num(int v) { return std::to_string(v); }
std::string flag(bool v) { return v ? "true" : "false"; }

json estimate(const montecarlo::Estimate& e) { return {{"mean", e.mean}, {"stderr", e.std_error}}; }

std::vector<double> values(const RewardVector& r) { return {r.values().begin(), r.values().end()}; }

DesignSettings design_settings(const CommandOptions& options, const InstanceSpec& spec) {
  DesignSettings s;
  s.solver = spec.solver;
  s.relative_step = options.relative_step;
  s.threads = options.threads;
  return s;
}

json design_echo(const DesignSettings& s) {
  return {{"relative_step", s.relative_step},
          {"budget_tolerance", s.budget_tolerance},
          {"max_iterations", s.max_iterations},
          {"quadrature",
           {{"panels", s.metrics.quadrature.panels},
            {"tolerance", s.metrics.quadrature.tolerance},
            {"path", std::string(to_string(s.metrics.path))}}}};
}

json solve_command(const CommandOptions& options, const InstanceSpec& spec, Table& table) {
  const auto sol = EquilibriumSolution::solve(spec.build_rewards(), spec.cost, spec.solver);
  table.header = {"q", "G", "x", "payoff_residual"};
  double residual_max = 0.0;
  if (sol.regime() != Regime::no_entry) {
    const std::size_t m = std::max<std::size_t>(options.grid_points, 2);
    for (std::size_t j = 0; j < m; ++j) {
      const double q = std::min(sol.support_end() * static_cast<double>(j) / static_cast<double>(m - 1),
                                sol.support_end());
      const double r = sol.payoff_residual(q);
      residual_max = std::max(residual_max, std::abs(r));
      table.add({num(q), num(sol.cdf(q)), num(sol.pressure(q)), num(r)});
    }
  }
  return {{"rewards", values(sol.rewards())},
          {"p", sol.participation()},
          {"qbar", sol.support_end()},
          {"regime", std::string(to_string(sol.regime()))},
          {"shift", sol.shift()},
          {"residual_max", residual_max},
          {"participation_residual", sol.participation_residual()},
          {"hazard_class", std::string(to_string(spec.cost.hazard_class()))},
          {"grid_points", options.grid_points}};
}

json metrics_command(const CommandOptions&, const InstanceSpec& spec, Table& table) {
  const auto sol = EquilibriumSolution::solve(spec.build_rewards(), spec.cost, spec.solver);
  const auto m = evaluate(sol, spec.metrics);
  table.header = {"rank", "W"};
  for (std::size_t k = 0; k < m.rank_prob.size(); ++k) table.add({num(k + 1), num(m.rank_prob[k])});
  return {{"rewards", values(sol.rewards())},
          {"p", sol.participation()},
          {"qbar", sol.support_end()},
          {"regime", std::string(to_string(sol.regime()))},
          {"budget", m.budget},
          {"eq_max", m.eq_max},
          {"eq_avg", m.eq_avg},
          {"eq_total", m.eq_total},
          {"W", m.rank_prob},
          {"error_estimate", m.quadrature_error_estimate}};
}

json simulate_command(const CommandOptions& options, const InstanceSpec& spec, Table& table) {
  const auto sol = EquilibriumSolution::solve(spec.build_rewards(), spec.cost, spec.solver);
  const auto report = montecarlo::run(sol, spec.trials, spec.seed, {options.threads, true});
  const auto m = evaluate(sol, spec.metrics);
  const auto fit = montecarlo::entrant_count_fit(report, sol.n(), sol.participation());
  table.header = {"entrants", "observed", "expected"};
  for (std::size_t j = 0; j <= sol.n(); ++j) {
    const double expected = static_cast<double>(spec.trials) *
                            numerics::binomial_pmf(static_cast<unsigned>(sol.n()), static_cast<unsigned>(j),
                                                   sol.participation());
    table.add({num(j), num(report.entrant_histogram[j]), num(expected)});
  }
  auto z = [](double observed, const montecarlo::Estimate& e, double analytic) {
    return e.std_error > 0.0 ? (observed - analytic) / e.std_error : 0.0;
  };
  json ks = nullptr;
  if (!report.samples.empty()) {
    const double d = montecarlo::ks_distance(report.samples, sol);
    const double crit = montecarlo::kolmogorov_critical(0.001, report.samples.size());
    ks = {{"distance", d}, {"critical_0999", crit}, {"samples", report.samples.size()}, {"passed", d <= crit}};
  }
  return {{"trials", report.trials},
          {"seed", report.seed},
          {"empirical_eq_max", estimate(report.eq_max)},
          {"empirical_eq_avg", estimate(report.eq_avg)},
          {"empirical_payout", estimate(report.payout)},
          {"entrant_histogram", report.entrant_histogram},
          {"analytic", {{"eq_max", m.eq_max}, {"eq_avg", m.eq_avg}, {"budget", m.budget}, {"p", sol.participation()}}},
          {"z_scores",
           {{"eq_max", z(report.eq_max.mean, report.eq_max, m.eq_max)},
            {"eq_avg", z(report.eq_avg.mean, report.eq_avg, m.eq_avg)},
            {"payout", z(report.payout.mean, report.payout, m.budget)}}},
          {"entrant_fit", {{"statistic", fit.statistic}, {"dof", fit.dof}, {"p_value", fit.p_value}}},
          {"ks", ks}};
}

json deviate_command(const CommandOptions& options, const InstanceSpec& spec, Table& table) {
  const auto sol = EquilibriumSolution::solve(spec.build_rewards(), spec.cost, spec.solver);
  std::vector<double> grid = options.q_grid;
  if (grid.empty()) {
    const std::size_t m = std::max<std::size_t>(options.grid_points, 2);
    for (std::size_t j = 0; j < m; ++j) {
      grid.push_back(sol.support_end() * static_cast<double>(j) / static_cast<double>(m - 1));
    }
    if (options.margin > 0.0) grid.push_back(sol.support_end() + options.margin);
  }
  for (double q : grid) {
    if (!(q >= 0.0)) throw DomainError("deviate: grid qualities must be >= 0");
  }
  const auto curve = montecarlo::deviation_check(sol, grid, spec.trials, spec.seed, {options.threads, false});
  table.header = {"q", "mean_payoff", "stderr", "n_trials"};
  json points = json::array();
  double worst_z = 0.0;
  bool flat = true;
  for (const auto& pt : curve) {
    table.add({num(pt.quality), num(pt.mean_payoff), num(pt.std_error), num(pt.trials)});
    const bool inside = pt.quality <= sol.support_end();
    const double gap = pt.mean_payoff - sol.shift();
    if (inside) {
      if (pt.std_error > 0.0) worst_z = std::max(worst_z, std::abs(gap) / pt.std_error);
      flat = flat && std::abs(gap) <= std::max(4.0 * pt.std_error, 1e-9);
    }
    points.push_back({{"q", pt.quality},
                      {"mean_payoff", pt.mean_payoff},
                      {"stderr", pt.std_error},
                      {"n_trials", pt.trials},
                      {"in_support", inside}});
  }
  return {{"trials", spec.trials},
          {"seed", spec.seed},
          {"shift", sol.shift()},
          {"qbar", sol.support_end()},
          {"curve", points},
          {"max_abs_z_on_support", worst_z},
          {"flat_within_4se", flat}};
}

json attention_command(const CommandOptions& options, const InstanceSpec& spec, Table& table) {
  if (spec.constructor != Constructor::attention) throw UsageError("design-attention needs --caps");
  const auto settings = design_settings(options, spec);
  const auto cert =
      optimal_attention(AttentionCaps::validate(spec.caps), spec.cost, settings, options.max_candidates);
  table.header = {"rank", "cap", "reward"};
  for (std::size_t i = 0; i < spec.caps.size(); ++i) {
    table.add({num(i + 1), num(spec.caps[i]), num(cert.schedule.values()[i])});
  }
  return {{"schedule", values(cert.schedule)},
          {"eq_max", cert.eq_max},
          {"eq_avg", cert.eq_avg},
          {"lattice_size", cert.lattice_size},
          {"truncated", cert.truncated},
          {"max_candidates", options.max_candidates},
          {"best_lattice_eq_max", cert.best_lattice_eq_max},
          {"best_lattice_eq_avg", cert.best_lattice_eq_avg},
          {"ties_max", cert.ties_max},
          {"ties_avg", cert.ties_avg},
          {"passed", cert.passed},
          {"design", design_echo(settings)}};
}

json perturb_command(const CommandOptions& options, const InstanceSpec& spec, Table& table) {
  const auto rewards = spec.build_rewards();
  const auto settings = design_settings(options, spec);
  std::vector<std::size_t> ranks = options.ranks;
  if (ranks.empty()) {
    for (std::size_t s = 2; s <= rewards.size(); ++s) ranks.push_back(s);
  }
  table.header = {"s", "scheme", "delta", "da1_per_das_at_B", "d_eqmax", "d_eqavg", "bound", "budget_mismatch"};
  json rows = json::array();
  for (std::size_t s : ranks) {
    const auto r = budget_matched_derivative(rewards, spec.cost, s, options.delta, settings);
    table.add({num(s), std::string(to_string(r.scheme)), num(r.delta), num(r.da1_per_das_at_B), num(r.d_eqmax),
               num(r.d_eqavg), num(r.bound), num(r.budget_mismatch)});
    rows.push_back({{"s", s},
                    {"scheme", std::string(to_string(r.scheme))},
                    {"delta", r.delta},
                    {"da1_per_das_at_B", r.da1_per_das_at_B},
                    {"d_eqmax", r.d_eqmax},
                    {"d_eqavg", r.d_eqavg},
                    {"bound", r.bound},
                    {"budget_mismatch", r.budget_mismatch}});
  }
  json sensitivity = json::array();
  const double step = options.delta > 0.0 ? options.delta : options.relative_step * std::abs(rewards.first());
  for (Rank i = 1; i <= rewards.size(); ++i) {
    try {
      const auto rep = reward_sensitivity(rewards, spec.cost, i, step, 50, spec.solver);
      std::size_t resolved = 0;
      for (bool b : rep.resolved) resolved += b;
      sensitivity.push_back({{"rank", i},
                             {"sign", std::string(to_string(rep.sign))},
                             {"participation_derivative", rep.participation_derivative},
                             {"resolved_points", resolved},
                             {"error", nullptr}});
    } catch (const ValidationError& e) {
      sensitivity.push_back({{"rank", i},
                             {"sign", nullptr},
                             {"participation_derivative", nullptr},
                             {"resolved_points", 0},
                             {"error", e.what()}});
    }
  }
  return {{"rewards", values(rewards)},
          {"budget_matched", rows},
          {"sensitivity", sensitivity},
          {"design", design_echo(settings)}};
}

json tax_command(const CommandOptions& options, const InstanceSpec& spec, Table& table) {
  if (spec.constructor != Constructor::wta) throw UsageError("tax-sweep needs --wta <prize> and --n");
  const auto settings = design_settings(options, spec);
  const auto rows = tax_sweep(spec.n, spec.prize, spec.cost, options.taxes, settings);
  table.header = {"tax", "feasible", "winner_prize", "p", "eq_max", "eq_avg", "B"};
  json out = json::array();
  double lo = INFINITY, hi = -INFINITY;
  for (const auto& r : rows) {
    table.add({num(r.tax), flag(r.feasible), num(r.winner_prize), num(r.participation), num(r.eq_max),
               num(r.eq_avg), num(r.budget)});
    out.push_back({{"tax", r.tax},
                   {"feasible", r.feasible},
                   {"error", r.feasible ? json(nullptr) : json(r.error)},
                   {"winner_prize", r.winner_prize},
                   {"p", r.participation},
                   {"eq_max", r.eq_max},
                   {"eq_avg", r.eq_avg},
                   {"B", r.budget}});
    if (r.feasible) lo = std::min(lo, r.budget), hi = std::max(hi, r.budget);
  }
  return {{"rows", out}, {"budget_spread", hi >= lo ? hi - lo : 0.0}, {"design", design_echo(settings)}};
}

json avg_sign_command(const CommandOptions& options, const InstanceSpec& spec, Table& table) {
  const auto settings = design_settings(options, spec);
  std::vector<double> budgets = options.budgets;
  if (budgets.empty()) {
    for (int i = 0; i <= 24; ++i) budgets.push_back(0.05 * std::pow(400.0, i / 24.0));
  }
  const auto sweep = avg_sign_vs_budget(spec.n, spec.cost, budgets, options.rank, settings);
  table.header = {"B", "ok", "prize", "p", "d_eqavg", "sign"};
  json rows = json::array();
  for (const auto& r : sweep.rows) {
    table.add({num(r.budget), flag(r.ok), num(r.prize), num(r.participation), num(r.d_eqavg), num(r.sign)});
    rows.push_back({{"B", r.budget},
                    {"ok", r.ok},
                    {"error", r.ok ? json(nullptr) : json(r.error)},
                    {"prize", r.prize},
                    {"p", r.participation},
                    {"d_eqavg", r.d_eqavg},
                    {"sign", r.sign}});
  }
  return {{"n", spec.n},
          {"s", options.rank},
          {"rows", rows},
          {"sign_changes", sweep.sign_changes},
          {"crossover", sweep.crossover ? json(*sweep.crossover) : json(nullptr)},
          {"design", design_echo(settings)}};
}

json wta_trial_command(const CommandOptions& options, const InstanceSpec& spec, Table& table) {
  const auto settings = design_settings(options, spec);
  double budget = 0.0;
  if (options.budget) {
    budget = *options.budget;
  } else if (spec.constructor == Constructor::wta) {
    budget = expected_budget(EquilibriumSolution::solve(winner_take_all(spec.n, spec.prize), spec.cost, spec.solver));
  } else {
    throw UsageError("wta-trial needs --budget or --wta <prize>");
  }
  const auto rep = wta_dominance_trial(spec.n, budget, spec.cost, options.draws, spec.seed, settings);
  table.header = {"trial", "eq_max", "gap"};
  for (std::size_t t = 0; t < rep.trial_eq_max.size(); ++t) {
    table.add({num(t), num(rep.trial_eq_max[t]), num(rep.wta_eq_max - rep.trial_eq_max[t])});
  }
  json trials = json::array();
  for (double v : rep.trial_eq_max) trials.push_back(std::isfinite(v) ? json(v) : json(nullptr));
  return {{"n", rep.n},
          {"budget", rep.budget},
          {"claim_applies", rep.claim_applies},
          {"hazard_class", std::string(to_string(spec.cost.hazard_class()))},
          {"wta_prize", rep.wta_prize},
          {"wta_eq_max", rep.wta_eq_max},
          {"draws", rep.trials},
          {"evaluated", rep.evaluated},
          {"rescale_failures", rep.rescale_failures},
          {"best_trial_eq_max", rep.best_trial_eq_max},
          {"worst_gap", rep.worst_gap},
          {"violations", rep.violations},
          {"trial_eq_max", trials},
          {"design", design_echo(settings)}};
}

// --- verify -----------------------------------------------------------------

struct Check {
  std::string suite;
  std::string name;
  double value;
  double expected;
  double tolerance;
  bool passed;
};

void close_to(std::vector<Check>& out, const std::string& suite, const std::string& name, double value,
              double expected, double tol) {
  out.push_back({suite, name, value, expected, tol, std::abs(value - expected) <= tol});
}

void identity_suite(std::vector<Check>& out) {
  double worst_identity = 0.0, worst_gap = 0.0, worst_sum = 0.0;
  for (std::size_t n = 1; n <= 12; ++n) {
    for (int j = 1; j <= 19; ++j) {
      const double p = 0.05 * j;
      double sum = 0.0;
      for (Rank k = 1; k <= n; ++k) {
        const double c = static_cast<double>(n) * numerics::binomial(static_cast<unsigned>(n - 1),
                                                                     static_cast<unsigned>(k - 1));
        const double integral = numerics::gauss_legendre(
            [&](double x) {
              return numerics::binomial_pmf(static_cast<unsigned>(n - 1), static_cast<unsigned>(k - 1), x) /
                     numerics::binomial(static_cast<unsigned>(n - 1), static_cast<unsigned>(k - 1));
            },
            0.0, p, 4);
        worst_identity = std::max(worst_identity, std::abs(binomial_tail(n, k, p) - c * integral));
        worst_gap = std::min(worst_gap, rank_tail_gap(n, k, p));
        sum += binomial_tail(n, k, p) / static_cast<double>(n);
      }
      worst_sum = std::max(worst_sum, std::abs(sum - p));
    }
  }
  out.push_back({"identities", "tail_equals_beta_integral", worst_identity, 0.0, 1e-10, worst_identity <= 1e-10});
  out.push_back({"identities", "redistribution_gap_nonnegative", worst_gap, 0.0, 1e-12, worst_gap >= -1e-12});
  out.push_back({"identities", "rank_probabilities_sum_to_p", worst_sum, 0.0, 1e-12, worst_sum <= 1e-12});
}

void golden_suite(std::vector<Check>& out) {
  const auto cost = CostModel::linear(0.25, 1.0);
  const auto a = EquilibriumSolution::solve(RewardVector::validate({1, 0}), cost);
  const auto ma = evaluate(a);
  close_to(out, "golden", "interior_p", a.participation(), 0.75, 1e-8);
  close_to(out, "golden", "interior_qbar", a.support_end(), 0.75, 1e-8);
  close_to(out, "golden", "interior_G_0.3", a.cdf(0.3), 0.4, 1e-8);
  close_to(out, "golden", "interior_budget", ma.budget, 0.9375, 1e-8);
  close_to(out, "golden", "interior_eq_max", ma.eq_max, 0.421875, 1e-8);
  close_to(out, "golden", "interior_eq_avg", ma.eq_avg, 0.28125, 1e-8);
  close_to(out, "golden", "interior_W1", ma.rank_prob[0], 0.46875, 1e-8);
  close_to(out, "golden", "interior_W2", ma.rank_prob[1], 0.28125, 1e-8);
  const auto b = EquilibriumSolution::solve(RewardVector::validate({1, 0.5}), cost);
  const auto mb = evaluate(b);
  close_to(out, "golden", "full_p", b.participation(), 1.0, 1e-8);
  close_to(out, "golden", "full_qbar", b.support_end(), 0.5, 1e-8);
  close_to(out, "golden", "full_G_0.25", b.cdf(0.25), 0.5, 1e-8);
  close_to(out, "golden", "full_shift", b.shift(), 0.25, 1e-8);
  close_to(out, "golden", "full_eq_max", mb.eq_max, 1.0 / 3.0, 1e-8);
  close_to(out, "golden", "full_eq_avg", mb.eq_avg, 0.25, 1e-8);
  close_to(out, "golden", "binomial_tail_4_2_0.3", binomial_tail(4, 2, 0.3), 0.3483, 1e-12);
  close_to(out, "golden", "redistribution_gap_2_2_0.75", rank_tail_gap(2, 2, 0.75), 2.25, 1e-12);
  const auto e = EquilibriumSolution::solve(winner_take_all(3, 4.0), CostModel::exponential(1.0));
  close_to(out, "golden", "exp_wta_budget_n3_A4", expected_budget(e), 4.0 - 0.5, 1e-10);
}

json verify_command(const CommandOptions& options, Table& table, int& exit_code) {
  std::vector<Check> checks;
  if (options.suite == "identities" || options.suite == "all") identity_suite(checks);
  if (options.suite == "golden" || options.suite == "all") golden_suite(checks);
  if (checks.empty()) throw UsageError("unknown suite '" + options.suite + "' (identities, golden, all)");
  table.header = {"suite", "check", "value", "expected", "tolerance", "passed"};
  json rows = json::array();
  bool all = true;
  for (const auto& c : checks) {
    table.add({c.suite, c.name, num(c.value), num(c.expected), num(c.tolerance), flag(c.passed)});
    rows.push_back({{"suite", c.suite},
                    {"check", c.name},
                    {"value", c.value},
                    {"expected", c.expected},
                    {"tolerance", c.tolerance},
                    {"passed", c.passed}});
    all = all && c.passed;
  }
  if (!all) exit_code = kExitVerification;
  return {{"suite", options.suite}, {"checks", rows}, {"passed", all}};
}

}  // namespace

bool needs_instance(const std::string& command) { return command != "verify"; }

bool needs_schedule(const std::string& command) {
  return command != "verify" && command != "avg-sign-sweep" && command != "wta-trial";
}

Outcome run_command(const CommandOptions& options, const std::optional<InstanceSpec>& instance) {
  using Handler = std::function<json(const CommandOptions&, const InstanceSpec&, Table&)>;
  static const std::map<std::string, Handler> handlers{
      {"solve", solve_command},          {"metrics", metrics_command},
      {"simulate", simulate_command},    {"deviate", deviate_command},
      {"design-attention", attention_command}, {"perturb", perturb_command},
      {"tax-sweep", tax_command},        {"avg-sign-sweep", avg_sign_command},
      {"wta-trial", wta_trial_command}};

  const auto start = std::chrono::steady_clock::now();
  Outcome outcome;
  Table table;
  json result;
  if (options.command == "verify") {
    result = verify_command(options, table, outcome.exit_code);
  } else {
    const auto it = handlers.find(options.command);
    if (it == handlers.end()) throw UsageError("unknown command '" + options.command + "'");
    if (!instance) throw UsageError(options.command + " needs an instance");
    result = it->second(options, *instance, table);
  }
  if (options.csv) table.write(*options.csv);
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  json& record = outcome.record;
  record["tool"] = "contest";
  record["version"] = kToolVersion;
  record["command"] = options.command;
  record["instance"] = instance ? instance->echo() : json(nullptr);
  record["options"] = {{"threads", options.threads},
                       {"csv", options.csv ? json(*options.csv) : json(nullptr)},
                       {"grid_points", options.grid_points},
                       {"q_grid", options.q_grid},
                       {"margin", options.margin},
                       {"ranks", options.ranks},
                       {"delta", options.delta},
                       {"relative_step", options.relative_step},
                       {"taxes", options.taxes},
                       {"budgets", options.budgets},
                       {"s", options.rank},
                       {"budget", options.budget ? json(*options.budget) : json(nullptr)},
                       {"draws", options.draws},
                       {"max_candidates", options.max_candidates},
                       {"suite", options.suite}};
  record["result"] = result;
  record["wall_time_seconds"] = options.timing ? json(elapsed) : json(nullptr);
  return outcome;
}

int exit_code_for(const std::exception& error) {
  if (dynamic_cast<const UsageError*>(&error)) return kExitUsage;
  if (dynamic_cast<const ConvergenceError*>(&error)) return kExitNumeric;
  if (dynamic_cast<const Error*>(&error)) return kExitValidation;
  return kExitNumeric;
}

}  // namespace contest::cli
