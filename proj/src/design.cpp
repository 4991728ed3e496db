#include "contest/design.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "contest/numerics.hpp"
#include "contest/parallel.hpp"
#include "contest/random.hpp"

namespace contest {
namespace {

constexpr double kBudgetMatchLimit = 1e-8;
constexpr double kEps = std::numeric_limits<double>::epsilon();

double above(double x) { return std::nextafter(x, std::numeric_limits<double>::infinity()); }

double budget_of(const RewardVector& rewards, const CostModel& cost, const SolverSettings& solver) {
  return expected_budget(rewards, solve_participation(rewards, cost, solver));
}

double budget_tolerance(double target, const DesignSettings& settings) {
  return settings.budget_tolerance * std::max(1.0, std::abs(target));
}

void require_rank(const RewardVector& rewards, Rank s, Rank lowest) {
  if (s < lowest || s > rewards.size()) {
    throw DomainError("rank " + std::to_string(s) + " outside " + std::to_string(lowest) + ".." +
                      std::to_string(rewards.size()));
  }
}

// Solves a_1 in `raw` so that the expected budget equals `target`.
RewardVector match_winner_prize(std::vector<double> raw, const CostModel& cost, double target,
                                double guess0, double guess1, const DesignSettings& settings) {
  const double floor = above(raw[1]);
  auto excess = [&](double a1) {
    raw[0] = a1;
    return budget_of(RewardVector::validate(raw), cost, settings.solver) - target;
  };
  double a1 = 0.0;
  try {
    a1 = numerics::secant_increasing(excess, floor, guess0, guess1,
                                     budget_tolerance(target, settings), settings.max_iterations);
  } catch (const MechanismError&) {
    throw;
  } catch (const ValidationError&) {
    throw ValidationError("budget match infeasible: the required a_1 is below a_2");
  }
  raw[0] = a1;
  auto matched = RewardVector::validate(std::move(raw));
  const double mismatch = std::abs(budget_of(matched, cost, settings.solver) - target);
  if (mismatch > kBudgetMatchLimit) {
    throw ConvergenceError("budget match: |dB| above 1e-8", mismatch);
  }
  return matched;
}

struct Evaluation {
  double a1 = 0.0;
  double eq_max = 0.0;
  double eq_avg = 0.0;
  double budget = 0.0;
};

Evaluation evaluate_vector(const RewardVector& rewards, const CostModel& cost,
                           const DesignSettings& settings) {
  const auto sol = EquilibriumSolution::solve(rewards, cost, settings.solver);
  return {rewards.first(), expected_max_quality(sol, settings),
          expected_avg_quality(sol, settings), expected_budget(sol)};
}

}  // namespace

double expected_max_quality(const EquilibriumSolution& sol, const DesignSettings& settings) {
  return expected_max_quality(sol, settings.metrics).value;
}

double expected_avg_quality(const EquilibriumSolution& sol, const DesignSettings& settings) {
  return expected_avg_quality(sol, settings.metrics).value;
}

std::string_view to_string(SignSummary sign) {
  switch (sign) {
    case SignSummary::positive: return "positive";
    case SignSummary::negative: return "negative";
    case SignSummary::mixed: return "mixed";
    case SignSummary::boundary: return "boundary";
  }
  return "?";
}

std::string_view to_string(DifferenceScheme scheme) {
  switch (scheme) {
    case DifferenceScheme::central: return "central";
    case DifferenceScheme::forward: return "forward";
    case DifferenceScheme::backward: return "backward";
    case DifferenceScheme::implicit: return "implicit";
  }
  return "?";
}

SensitivityReport reward_sensitivity(const RewardVector& rewards, const CostModel& cost, Rank i,
                                     double delta, std::size_t grid_points,
                                     const SolverSettings& settings) {
  require_rank(rewards, i, 1);
  if (!(delta > 0.0)) throw DomainError("sensitivity: delta must be > 0");
  if (grid_points == 0) throw DomainError("sensitivity: need at least one grid point");
  auto perturbed = [&](double sign) {
    try {
      return RewardVector::validate(rewards.with(i, rewards.at(i) + sign * delta));
    } catch (const MechanismError& e) {
      throw ValidationError(std::string("sensitivity: perturbed rewards invalid (") + e.what() +
                            "); use a smaller delta");
    }
  };
  const auto plus = perturbed(1.0);
  const auto minus = perturbed(-1.0);
  for (const auto* v : {&rewards, &plus, &minus}) {
    if (classify(*v, cost) == Regime::no_entry) {
      throw ValidationError("sensitivity: perturbation reaches the no-entry regime");
    }
  }

  SensitivityReport report;
  report.rank = i;
  report.delta = delta;
  report.participation_derivative = (solve_participation(plus, cost, settings) -
                                     solve_participation(minus, cost, settings)) /
                                    (2.0 * delta);

  const double c0 = cost.entry_cost();
  const bool straddles = i == rewards.size() && minus.last() <= c0 && plus.last() >= c0;

  const double top = std::min({support_endpoint(rewards, cost), support_endpoint(plus, cost),
                               support_endpoint(minus, cost)});
  double scale = 1.0;
  for (double a : plus.values()) scale = std::max(scale, std::abs(a));
  std::size_t positive = 0, negative = 0;
  for (std::size_t j = 1; j <= grid_points; ++j) {
    const double q = top * static_cast<double>(j) / static_cast<double>(grid_points + 1);
    const double d = (competitor_pressure(plus, cost, q, settings) -
                      competitor_pressure(minus, cost, q, settings)) /
                     (2.0 * delta);
    const double x = competitor_pressure(rewards, cost, q, settings);
    const double slope = std::abs(benefit_slope(rewards, x));
    const double floor = 64.0 * kEps * scale / (slope * delta);
    const bool resolved = std::abs(d) > floor;
    report.quality.push_back(q);
    report.derivative.push_back(d);
    report.resolved.push_back(resolved);
    if (resolved) (d > 0.0 ? positive : negative) += 1;
  }
  if (straddles) {
    report.sign = SignSummary::boundary;
  } else if (positive > 0 && negative == 0) {
    report.sign = SignSummary::positive;
  } else if (negative > 0 && positive == 0) {
    report.sign = SignSummary::negative;
  } else {
    report.sign = SignSummary::mixed;
  }
  return report;
}

AttentionCertificate optimal_attention(const AttentionCaps& caps, const CostModel& cost,
                                       const DesignSettings& settings,
                                       std::size_t max_candidates) {
  const double c0 = cost.entry_cost();
  if (!(caps.at(1) > c0)) {
    throw ValidationError("attention: A_1 must exceed c(0) or nobody enters");
  }
  AttentionCertificate cert{.schedule = attention_schedule(caps, c0)};
  const auto best = evaluate_vector(cert.schedule, cost, settings);
  cert.eq_max = best.eq_max;
  cert.eq_avg = best.eq_avg;

  constexpr double levels[] = {0.0, 0.25, 0.5, 0.75, 1.0};
  const std::size_t n = caps.size();
  std::vector<std::size_t> digits(n, 0);
  std::vector<double> candidate(n);
  const double tol = 1e-9 * std::max(1.0, cert.eq_max);
  bool done = false;
  while (!done) {
    for (std::size_t i = 0; i < n; ++i) candidate[i] = levels[digits[i]] * caps.values()[i];
    bool monotone = true;
    for (std::size_t i = 1; i < n; ++i) monotone = monotone && candidate[i] <= candidate[i - 1];
    if (monotone && candidate.front() > candidate.back()) {
      if (cert.lattice_size == max_candidates) {
        cert.truncated = true;
        break;
      }
      ++cert.lattice_size;
      const auto v = RewardVector::validate(candidate);
      double eq_max = 0.0, eq_avg = 0.0;
      if (classify(v, cost) != Regime::no_entry) {
        const auto e = evaluate_vector(v, cost, settings);
        eq_max = e.eq_max;
        eq_avg = e.eq_avg;
      }
      cert.best_lattice_eq_max = std::max(cert.best_lattice_eq_max, eq_max);
      cert.best_lattice_eq_avg = std::max(cert.best_lattice_eq_avg, eq_avg);
      if (std::abs(eq_max - cert.eq_max) <= tol) ++cert.ties_max;
      if (std::abs(eq_avg - cert.eq_avg) <= tol) ++cert.ties_avg;
    }
    // next base-5 digit string
    std::size_t i = 0;
    while (i < n && ++digits[i] == std::size(levels)) digits[i++] = 0;
    done = i == n;
  }
  cert.passed = cert.best_lattice_eq_max <= cert.eq_max + tol &&
                cert.best_lattice_eq_avg <= cert.eq_avg + tol;
  return cert;
}

RewardVector hold_budget(const RewardVector& rewards, const CostModel& cost, Rank s,
                         double new_value, const DesignSettings& settings) {
  require_rank(rewards, s, 2);
  if (!std::isfinite(new_value)) throw DomainError("hold_budget: new reward must be finite");
  if (new_value == rewards.at(s)) return rewards;
  if (classify(rewards, cost) == Regime::no_entry) {
    throw ValidationError("hold_budget: nobody enters, there is no budget to hold");
  }
  auto raw = rewards.with(s, new_value);
  for (std::size_t i = 1; i + 1 < raw.size(); ++i) {
    if (raw[i] < raw[i + 1]) {
      throw MechanismError(MechanismClause::monotonicity, i + 2,
                           "hold_budget: a_" + std::to_string(s) + " = " +
                               std::to_string(new_value) + " breaks monotonicity of ranks 2..n");
    }
  }
  const double p = solve_participation(rewards, cost, settings.solver);
  const double target = expected_budget(rewards, p);
  // first guess from the secant bound: da_1/da_s ~ -W(s)/W(1).
  const double ratio = binomial_tail(rewards.size(), s, p) / binomial_tail(rewards.size(), 1, p);
  const double guess = rewards.first() - (new_value - rewards.at(s)) * ratio;
  return match_winner_prize(std::move(raw), cost, target, rewards.first(), guess, settings);
}

double prize_for_budget(std::size_t n, const CostModel& cost, double budget,
                        const DesignSettings& settings) {
  if (n < 2) throw DomainError("prize_for_budget: n must be >= 2");
  if (!(budget > 0.0) || !std::isfinite(budget)) {
    throw DomainError("prize_for_budget: budget must be > 0");
  }
  const double c0 = cost.entry_cost();
  auto excess = [&](double prize) {
    return budget_of(winner_take_all(n, prize), cost, settings.solver) - budget;
  };
  const double floor = above(c0);
  return numerics::secant_increasing(excess, floor, c0 + budget, 1.1 * (c0 + budget),
                                     budget_tolerance(budget, settings), settings.max_iterations);
}

RewardVector taxed_wta(std::size_t n, double prize, double tax, const CostModel& cost) {
  if (!(tax >= 0.0) || !std::isfinite(tax)) throw DomainError("taxed_wta: tax must be >= 0");
  if (tax == 0.0) return winner_take_all(n, prize);
  if (!cost.has_entry_cost()) {
    throw ValidationError("taxed_wta: taxing entry needs a positive entry cost c(0)");
  }
  const auto base = winner_take_all(n, prize);
  if (classify(base, cost) == Regime::no_entry) {
    throw ValidationError("taxed_wta: prize does not exceed c(0), nobody participates");
  }
  const DesignSettings settings;
  const double target = budget_of(base, cost, settings.solver);
  std::vector<double> raw(n, -tax);
  raw[0] = prize;
  return match_winner_prize(std::move(raw), cost, target, prize, prize + tax, settings);
}

PerturbationResult implicit_budget_matched_derivative(const RewardVector& rewards,
                                                      const CostModel& cost, Rank s,
                                                      const DesignSettings& settings) {
  require_rank(rewards, s, 2);
  const auto sol = EquilibriumSolution::solve(rewards, cost, settings.solver);
  if (sol.regime() == Regime::no_entry) {
    throw StateError("implicit derivative: nobody enters");
  }
  const std::size_t n = rewards.size();
  const double p = sol.participation();
  const bool full = sol.regime() == Regime::full;

  // dH/da_k at pressure x.
  auto dh = [&](Rank k, double x) {
    const double w = rank_weight(n, k, x);
    return full && k == n ? w - 1.0 : w;
  };
  // Total derivative of the expected budget in a_k.
  auto dbudget = [&](Rank k) {
    if (full) return 1.0;
    const double dp = rank_weight(n, k, p) / -benefit_slope(rewards, p);
    return binomial_tail(n, k, p) + static_cast<double>(n) * benefit(rewards, p) * dp;
  };

  PerturbationResult r;
  r.s = s;
  r.scheme = DifferenceScheme::implicit;
  r.da1_per_das_at_B = -dbudget(s) / dbudget(1);
  r.bound = -binomial_tail(n, s, p) / binomial_tail(n, 1, p);

  const double c0 = cost.entry_cost();
  const double top = rewards.first() - sol.shift();
  auto slope_of_cost = [&](double x) {
    const double v = std::clamp(benefit(rewards, x) - sol.shift(), c0, top);
    return cost.derivative(cost.inverse(v));
  };
  const double ratio = r.da1_per_das_at_B;
  auto direction = [&](double x) { return (dh(s, x) + ratio * dh(1, x)) / slope_of_cost(x); };
  const auto nn = static_cast<double>(n);
  const auto& quad = settings.metrics.quadrature;
  auto run = [&](auto&& f) { return numerics::integrate(f, 0.0, p, quad).value; };
  r.d_eqmax = run([&](double x) { return nn * std::pow(1.0 - x, nn - 1.0) * direction(x); });
  r.d_eqavg = run([&](double x) { return direction(x); });
  return r;
}

PerturbationResult budget_matched_derivative(const RewardVector& rewards, const CostModel& cost,
                                             Rank s, double delta,
                                             const DesignSettings& settings) {
  require_rank(rewards, s, 2);
  if (!(delta > 0.0)) delta = settings.relative_step * std::abs(rewards.first());
  const std::size_t n = rewards.size();
  const double as = rewards.at(s);
  auto room_up = [&](double step) { return s == 2 || rewards.at(s - 1) >= as + step; };
  auto room_down = [&](double step) { return s == n || as - step >= rewards.at(s + 1); };

  DifferenceScheme scheme;
  if (room_up(delta) && room_down(delta)) {
    scheme = DifferenceScheme::central;
  } else if (room_up(2.0 * delta)) {
    scheme = DifferenceScheme::forward;
  } else if (room_down(2.0 * delta)) {
    scheme = DifferenceScheme::backward;
  } else {
    auto r = implicit_budget_matched_derivative(rewards, cost, s, settings);
    r.delta = 0.0;
    return r;
  }

  const auto base = evaluate_vector(rewards, cost, settings);
  double mismatch = 0.0;
  auto at = [&](double offset) {
    const auto v = hold_budget(rewards, cost, s, as + offset, settings);
    const auto e = evaluate_vector(v, cost, settings);
    mismatch = std::max(mismatch, std::abs(e.budget - base.budget));
    return e;
  };
  // Stencil weights on offsets {0, +-h, +-2h}, divided by h.
  auto combine = [&](const std::vector<std::pair<double, Evaluation>>& terms) {
    Evaluation d;
    for (const auto& [w, e] : terms) {
      d.a1 += w * e.a1;
      d.eq_max += w * e.eq_max;
      d.eq_avg += w * e.eq_avg;
    }
    d.a1 /= delta;
    d.eq_max /= delta;
    d.eq_avg /= delta;
    return d;
  };
  Evaluation d;
  switch (scheme) {
    case DifferenceScheme::central:
      d = combine({{0.5, at(delta)}, {-0.5, at(-delta)}});
      break;
    case DifferenceScheme::forward:
      d = combine({{-1.5, base}, {2.0, at(delta)}, {-0.5, at(2.0 * delta)}});
      break;
    case DifferenceScheme::backward:
      d = combine({{1.5, base}, {-2.0, at(-delta)}, {0.5, at(-2.0 * delta)}});
      break;
    case DifferenceScheme::implicit:
      break;
  }
  const double p = solve_participation(rewards, cost, settings.solver);
  PerturbationResult r;
  r.s = s;
  r.delta = delta;
  r.scheme = scheme;
  r.da1_per_das_at_B = d.a1;
  r.d_eqmax = d.eq_max;
  r.d_eqavg = d.eq_avg;
  r.bound = -binomial_tail(n, s, p) / binomial_tail(n, 1, p);
  r.budget_mismatch = mismatch;
  return r;
}

std::vector<TaxRow> tax_sweep(std::size_t n, double prize, const CostModel& cost,
                              const std::vector<double>& taxes, const DesignSettings& settings) {
  if (!cost.has_entry_cost()) {
    throw ValidationError("tax sweep: needs a positive entry cost c(0)");
  }
  std::vector<TaxRow> rows(taxes.size());
  parallel_for(taxes.size(), settings.threads, [&](std::size_t i) {
    TaxRow& row = rows[i];
    row.tax = taxes[i];
    try {
      const auto v = taxed_wta(n, prize, taxes[i], cost);
      const auto sol = EquilibriumSolution::solve(v, cost, settings.solver);
      row.winner_prize = v.first();
      row.participation = sol.participation();
      row.eq_max = expected_max_quality(sol, settings);
      row.eq_avg = expected_avg_quality(sol, settings);
      row.budget = expected_budget(sol);
      row.feasible = true;
    } catch (const Error& e) {
      row.error = e.what();
    }
  });
  return rows;
}

AvgSignSweep avg_sign_vs_budget(std::size_t n, const CostModel& cost,
                                const std::vector<double>& budgets, Rank s,
                                const DesignSettings& settings) {
  if (cost.family() != CostFamily::exponential) {
    throw ValidationError("avg-sign sweep: needs an exponential cost");
  }
  if (s < 2 || s > n) throw DomainError("avg-sign sweep: rank s must lie in 2..n");
  auto derivative_at = [&](double budget, AvgSignRow& row) {
    row.budget = budget;
    row.prize = prize_for_budget(n, cost, budget, settings);
    const auto wta = winner_take_all(n, row.prize);
    row.participation = solve_participation(wta, cost, settings.solver);
    row.d_eqavg =
        budget_matched_derivative(wta, cost, s, settings.relative_step * row.prize, settings)
            .d_eqavg;
    row.sign = row.d_eqavg > 0.0 ? 1 : (row.d_eqavg < 0.0 ? -1 : 0);
    row.ok = true;
  };

  AvgSignSweep sweep;
  sweep.rows.resize(budgets.size());
  parallel_for(budgets.size(), settings.threads, [&](std::size_t i) {
    try {
      derivative_at(budgets[i], sweep.rows[i]);
    } catch (const Error& e) {
      sweep.rows[i].budget = budgets[i];
      sweep.rows[i].error = e.what();
    }
  });

  const AvgSignRow* prev = nullptr;
  std::optional<std::pair<double, double>> bracket;
  int first_sign = 0;
  for (const auto& row : sweep.rows) {
    if (!row.ok || row.sign == 0) continue;
    if (prev != nullptr && row.sign != prev->sign) {
      ++sweep.sign_changes;
      if (!bracket) {
        bracket = {prev->budget, row.budget};
        first_sign = prev->sign;
      }
    }
    prev = &row;
  }
  if (bracket) {
    auto [lo, hi] = *bracket;
    for (int it = 0; it < 60 && hi - lo > 1e-12 * std::max(1.0, std::abs(hi)); ++it) {
      const double mid = lo > 0.0 && hi > 0.0 ? std::sqrt(lo * hi) : 0.5 * (lo + hi);
      AvgSignRow probe;
      derivative_at(mid, probe);
      (probe.sign == first_sign ? lo : hi) = mid;
    }
    sweep.crossover = 0.5 * (lo + hi);
  }
  return sweep;
}

std::vector<double> random_monotone_rewards(std::size_t n, std::uint64_t seed,
                                            std::uint64_t index) {
  CounterRng rng(seed, index);
  std::vector<double> spacing(n);
  for (auto& e : spacing) e = rng.exponential();
  std::vector<double> a(n);
  std::partial_sum(spacing.rbegin(), spacing.rend(), a.rbegin());
  return a;
}

DominanceReport wta_dominance_trial(std::size_t n, double budget, const CostModel& cost,
                                    std::size_t trials, std::uint64_t seed,
                                    const DesignSettings& settings) {
  if (!cost.has_entry_cost()) {
    throw ValidationError("wta trial: needs a positive entry cost c(0)");
  }
  DominanceReport report;
  report.n = n;
  report.budget = budget;
  report.trials = trials;
  report.claim_applies = cost.hazard_class() != HazardClass::other;
  report.wta_prize = prize_for_budget(n, cost, budget, settings);
  report.wta_eq_max =
      evaluate_vector(winner_take_all(n, report.wta_prize), cost, settings).eq_max;

  report.trial_eq_max.assign(trials, std::numeric_limits<double>::quiet_NaN());
  parallel_for(trials, settings.threads, [&](std::size_t t) {
    const auto shape = random_monotone_rewards(n, seed, t);
    const auto base = RewardVector::validate(shape);
    auto scaled = [&](double m) {
      std::vector<double> v(shape);
      for (auto& a : v) a *= m;
      return RewardVector::validate(std::move(v));
    };
    try {
      const double m0 = budget / base.total();
      const double m = numerics::secant_increasing(
          [&](double m) { return budget_of(scaled(m), cost, settings.solver) - budget; },
          std::numeric_limits<double>::min(), m0, 1.1 * m0, budget_tolerance(budget, settings),
          settings.max_iterations);
      report.trial_eq_max[t] = evaluate_vector(scaled(m), cost, settings).eq_max;
    } catch (const Error&) {
    }
  });

  const double tol = 1e-9 * std::max(1.0, report.wta_eq_max);
  report.best_trial_eq_max = -std::numeric_limits<double>::infinity();
  for (double v : report.trial_eq_max) {
    if (std::isnan(v)) {
      ++report.rescale_failures;
      continue;
    }
    ++report.evaluated;
    report.best_trial_eq_max = std::max(report.best_trial_eq_max, v);
    if (v > report.wta_eq_max + tol) ++report.violations;
  }
  report.worst_gap = report.wta_eq_max - report.best_trial_eq_max;
  return report;
}

}  // namespace contest
