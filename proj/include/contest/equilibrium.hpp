#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "contest/cost_model.hpp"
#include "contest/mechanism.hpp"

namespace contest {

enum class Regime { no_entry, interior, full };

std::string_view to_string(Regime regime);

struct SolverSettings {
  // Bisection stops once the bracket is narrower than this (or cannot be
  // split further).
  double arg_tolerance = 1e-15;
  // Accepted |U(p) - c(0)|, scaled by max(1, max |a_i|).
  double residual_tolerance = 1e-10;
  // Chebyshev-spaced nodes on [0, qbar] that seed the bisection brackets.
  std::size_t grid_nodes = 512;
};

// Expected prize U(x) = sum_i a_{i+1} C(n-1, i) x^i (1-x)^(n-1-i) of an
// entrant when each rival independently beats it with probability x.
double benefit(const RewardVector& rewards, double x);

// dU/dx = (n-1) sum_i (a_{i+2} - a_{i+1}) C(n-2, i) x^i (1-x)^(n-2-i). Never
// positive for a monotone schedule.
double benefit_slope(const RewardVector& rewards, double x);

// dU/da_rank at x, i.e. the probability of finishing at `rank`.
double rank_weight(std::size_t n, Rank rank, double x);

Regime classify(const RewardVector& rewards, const CostModel& cost);

// max{a_n - c(0), 0}: the equilibrium profit of an entrant.
double payoff_shift(const RewardVector& rewards, const CostModel& cost);

// Entry probability p: 0 when a_1 <= c(0), 1 when a_n >= c(0), otherwise the
// root of U(p) = c(0).
double solve_participation(const RewardVector& rewards, const CostModel& cost,
                           const SolverSettings& settings = {});

// qbar with c(qbar) = a_1 - shift; 0 in the no-entry regime.
double support_endpoint(const RewardVector& rewards, const CostModel& cost);

// x(q) = p (1 - G(q)), the root of U(x) = c(q) + shift, computed without
// building a full solution. Zero at and above qbar.
double competitor_pressure(const RewardVector& rewards, const CostModel& cost, double q,
                           const SolverSettings& settings = {});

// The symmetric mixed equilibrium (p, G) on the support [0, qbar].
// Immutable after construction; safe to query from several threads.
class EquilibriumSolution {
 public:
  // Throws ValidationError for a negative last prize with zero entry cost.
  static EquilibriumSolution solve(RewardVector rewards, CostModel cost,
                                   SolverSettings settings = {});

  const RewardVector& rewards() const noexcept { return rewards_; }
  const CostModel& cost() const noexcept { return cost_; }
  const SolverSettings& settings() const noexcept { return settings_; }
  std::size_t n() const noexcept { return rewards_.size(); }

  double participation() const noexcept { return p_; }
  double support_end() const noexcept { return qbar_; }
  double shift() const noexcept { return shift_; }
  Regime regime() const noexcept { return regime_; }
  // |U(p) - c(0) - shift| at the solved p (0 in the no-entry regime).
  double participation_residual() const noexcept { return residual_; }

  // x(q) = p (1 - G(q)) for q >= 0; zero above qbar.
  double pressure(double q) const;
  // G(q) on [0, qbar]. Throws DomainError outside, StateError when nobody enters.
  double cdf(double q) const;
  // G'(q) = c'(q) / (-p U'(x(q))) on [0, qbar].
  double density(double q) const;
  // Inverse CDF: q(u) = c^{-1}(U(p (1 - u)) - shift).
  double quantile(double u) const;
  // pi(q) - shift where pi is the payoff of entering with quality q.
  double payoff_residual(double q) const;

  // Memoized bracketing grid (ascending q, descending x).
  std::span<const double> grid_quality() const noexcept { return grid_q_; }
  std::span<const double> grid_pressure() const noexcept { return grid_x_; }

 private:
  EquilibriumSolution(RewardVector rewards, CostModel cost, SolverSettings settings)
      : rewards_(std::move(rewards)), cost_(cost), settings_(settings) {}

  double solve_pressure(double target, double lo, double hi) const;

  RewardVector rewards_;
  CostModel cost_;
  SolverSettings settings_;
  double p_ = 0.0;
  double qbar_ = 0.0;
  double shift_ = 0.0;
  double residual_ = 0.0;
  Regime regime_ = Regime::no_entry;
  std::vector<double> grid_q_;
  std::vector<double> grid_x_;
};

}  // namespace contest
