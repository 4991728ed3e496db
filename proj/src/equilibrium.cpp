#include "contest/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "contest/numerics.hpp"

namespace contest {
namespace {

void require_pressure(double x) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw DomainError("benefit: x must lie in [0, 1], got " + std::to_string(x));
  }
}

double max_abs_reward(const RewardVector& rewards) {
  double m = 1.0;
  for (double a : rewards.values()) m = std::max(m, std::abs(a));
  return m;
}

}  // namespace

std::string_view to_string(Regime regime) {
  switch (regime) {
    case Regime::no_entry: return "no_entry";
    case Regime::interior: return "interior";
    case Regime::full: return "full";
  }
  return "?";
}

double benefit(const RewardVector& rewards, double x) {
  require_pressure(x);
  return numerics::bernstein(rewards.values(), x);
}

double benefit_slope(const RewardVector& rewards, double x) {
  require_pressure(x);
  const auto a = rewards.values();
  std::vector<double> steps(a.size() - 1);
  for (std::size_t i = 0; i + 1 < a.size(); ++i) steps[i] = a[i + 1] - a[i];
  return static_cast<double>(a.size() - 1) * numerics::bernstein(steps, x);
}

double rank_weight(std::size_t n, Rank rank, double x) {
  if (rank < 1 || rank > n) throw DomainError("rank " + std::to_string(rank) + " out of range");
  require_pressure(x);
  return numerics::binomial_pmf(static_cast<unsigned>(n - 1), static_cast<unsigned>(rank - 1), x);
}

Regime classify(const RewardVector& rewards, const CostModel& cost) {
  const double c0 = cost.entry_cost();
  if (rewards.first() <= c0) return Regime::no_entry;
  if (rewards.last() >= c0) return Regime::full;
  return Regime::interior;
}

double payoff_shift(const RewardVector& rewards, const CostModel& cost) {
  return std::max(rewards.last() - cost.entry_cost(), 0.0);
}

double solve_participation(const RewardVector& rewards, const CostModel& cost,
                           const SolverSettings& settings) {
  switch (classify(rewards, cost)) {
    case Regime::no_entry: return 0.0;
    case Regime::full: return 1.0;
    case Regime::interior: break;
  }
  const double c0 = cost.entry_cost();
  const double p = numerics::bisect_decreasing(
      [&](double x) { return numerics::bernstein(rewards.values(), x); }, c0, 0.0, 1.0,
      settings.arg_tolerance);
  const double residual = std::abs(benefit(rewards, p) - c0);
  if (residual > settings.residual_tolerance * max_abs_reward(rewards)) {
    throw ConvergenceError("participation: residual above tolerance", residual);
  }
  return p;
}

double support_endpoint(const RewardVector& rewards, const CostModel& cost) {
  if (classify(rewards, cost) == Regime::no_entry) return 0.0;
  return cost.inverse(rewards.first() - payoff_shift(rewards, cost));
}

double competitor_pressure(const RewardVector& rewards, const CostModel& cost, double q,
                           const SolverSettings& settings) {
  if (!(q >= 0.0)) throw DomainError("pressure: quality must be >= 0");
  if (classify(rewards, cost) == Regime::no_entry) return 0.0;
  const double target = cost.eval(q) + payoff_shift(rewards, cost);
  if (target >= rewards.first()) return 0.0;
  return numerics::bisect_decreasing(
      [&](double x) { return numerics::bernstein(rewards.values(), x); }, target, 0.0, 1.0,
      settings.arg_tolerance);
}

EquilibriumSolution EquilibriumSolution::solve(RewardVector rewards, CostModel cost,
                                               SolverSettings settings) {
  if (cost.entry_cost() == 0.0 && rewards.last() < 0.0) {
    throw ValidationError("equilibrium: negative rewards need a positive entry cost c(0)");
  }
  EquilibriumSolution sol(std::move(rewards), cost, settings);
  sol.regime_ = classify(sol.rewards_, sol.cost_);
  sol.shift_ = payoff_shift(sol.rewards_, sol.cost_);
  if (sol.regime_ == Regime::no_entry) return sol;

  sol.p_ = solve_participation(sol.rewards_, sol.cost_, settings);
  sol.qbar_ = support_endpoint(sol.rewards_, sol.cost_);
  sol.residual_ = std::abs(benefit(sol.rewards_, sol.p_) - sol.cost_.entry_cost() - sol.shift_);

  const std::size_t nodes = std::max<std::size_t>(2, settings.grid_nodes);
  sol.grid_q_.resize(nodes);
  sol.grid_x_.resize(nodes);
  for (std::size_t j = 0; j < nodes; ++j) {
    const double angle = std::numbers::pi * static_cast<double>(j) / static_cast<double>(nodes - 1);
    sol.grid_q_[j] = sol.qbar_ * 0.5 * (1.0 - std::cos(angle));
  }
  sol.grid_q_.front() = 0.0;
  sol.grid_q_.back() = sol.qbar_;
  sol.grid_x_.front() = sol.p_;
  sol.grid_x_.back() = 0.0;
  for (std::size_t j = 1; j + 1 < nodes; ++j) {
    const double target = sol.cost_.eval(sol.grid_q_[j]) + sol.shift_;
    sol.grid_x_[j] = sol.solve_pressure(target, 0.0, sol.grid_x_[j - 1]);
  }
  return sol;
}

double EquilibriumSolution::solve_pressure(double target, double lo, double hi) const {
  return numerics::bisect_decreasing(
      [&](double x) { return numerics::bernstein(rewards_.values(), x); }, target, lo, hi,
      settings_.arg_tolerance);
}

double EquilibriumSolution::pressure(double q) const {
  if (!(q >= 0.0)) throw DomainError("pressure: quality must be >= 0");
  if (regime_ == Regime::no_entry || q >= qbar_) return 0.0;
  const auto it = std::upper_bound(grid_q_.begin(), grid_q_.end(), q);
  const auto j = static_cast<std::size_t>(it - grid_q_.begin()) - 1;
  if (q == grid_q_[j]) return grid_x_[j];
  return solve_pressure(cost_.eval(q) + shift_, grid_x_[j + 1], grid_x_[j]);
}

double EquilibriumSolution::cdf(double q) const {
  if (regime_ == Regime::no_entry) {
    throw StateError("equilibrium: nobody enters, the quality distribution is undefined");
  }
  if (!(q >= 0.0) || q > qbar_) {
    throw DomainError("cdf: quality " + std::to_string(q) + " outside the support [0, " +
                      std::to_string(qbar_) + "]");
  }
  return std::clamp(1.0 - pressure(q) / p_, 0.0, 1.0);
}

double EquilibriumSolution::density(double q) const {
  if (regime_ == Regime::no_entry) {
    throw StateError("equilibrium: nobody enters, the quality distribution is undefined");
  }
  if (!(q >= 0.0) || q > qbar_) throw DomainError("density: quality outside the support");
  return cost_.derivative(q) / (-p_ * benefit_slope(rewards_, pressure(q)));
}

double EquilibriumSolution::quantile(double u) const {
  if (regime_ == Regime::no_entry) {
    throw StateError("equilibrium: nobody enters, nothing to sample");
  }
  if (!(u >= 0.0 && u <= 1.0)) throw DomainError("quantile: u must lie in [0, 1]");
  if (u == 0.0) return 0.0;
  if (u == 1.0) return qbar_;
  const double c0 = cost_.entry_cost();
  const double v = numerics::bernstein(rewards_.values(), p_ * (1.0 - u)) - shift_;
  return std::min(cost_.inverse(std::clamp(v, c0, rewards_.first() - shift_)), qbar_);
}

double EquilibriumSolution::payoff_residual(double q) const {
  const double cost = cost_.eval(q);
  if (regime_ == Regime::no_entry || q > qbar_) return rewards_.first() - cost - shift_;
  return numerics::bernstein(rewards_.values(), pressure(q)) - cost - shift_;
}

}  // namespace contest
