#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "contest/cost_model.hpp"
#include "contest/equilibrium.hpp"
#include "contest/mechanism.hpp"
#include "contest/metrics.hpp"

namespace contest {

struct DesignSettings {
  SolverSettings solver{};
  // Quality integrals for finite differences use a fixed substitution rule so
  // neighbouring evaluations share one smooth discretization.
  MetricsSettings metrics{{.panels = 64, .tolerance = 0.0, .max_panels = 64},
                          QualityPath::substitution};
  // Default finite-difference step, relative to a_1.
  double relative_step = 1e-4;
  // Budget match: stop when |B - target| <= budget_tolerance * max(1, target).
  double budget_tolerance = 1e-15;
  int max_iterations = 100;
  unsigned threads = 1;
};

// Quality integrals under `settings.metrics`; a zero tolerance means a single
// composite rule with the configured panels.
double expected_max_quality(const EquilibriumSolution& sol, const DesignSettings& settings);
double expected_avg_quality(const EquilibriumSolution& sol, const DesignSettings& settings);

// --- comparative statics ----------------------------------------------------

enum class SignSummary { positive, negative, mixed, boundary };
std::string_view to_string(SignSummary sign);

struct SensitivityReport {
  Rank rank = 1;
  double delta = 0.0;
  std::vector<double> quality;      // interior grid
  std::vector<double> derivative;   // d[p(1-G(q))]/da_i at each grid point
  std::vector<bool> resolved;       // |derivative| above the rounding floor
  SignSummary sign = SignSummary::mixed;
  double participation_derivative = 0.0;  // dp/da_i
};

// Central differences of x(q) = p(1 - G(q)) with respect to a_i on an
// interior q-grid. Points whose magnitude is below the propagated rounding
// floor are marked unresolved and do not vote in the sign summary. Perturbing
// a_n across a_n = c(0) reports `boundary`.
SensitivityReport reward_sensitivity(const RewardVector& rewards, const CostModel& cost, Rank i,
                                     double delta, std::size_t grid_points = 50,
                                     const SolverSettings& settings = {});

// --- attention rewards --------------------------------------------------------

struct AttentionCertificate {
  RewardVector schedule;
  double eq_max = 0.0;
  double eq_avg = 0.0;
  std::size_t lattice_size = 0;   // admissible lattice points evaluated
  bool truncated = false;         // hit the candidate cap
  double best_lattice_eq_max = 0.0;
  double best_lattice_eq_avg = 0.0;
  std::size_t ties_max = 0;       // lattice points within tolerance of eq_max
  std::size_t ties_avg = 0;
  bool passed = false;
};

// Capped schedule a_i = A_i (i < n), a_n = min(A_n, c(0)) plus a certificate:
// every monotone lattice point a_i in {0, 1/4, 1/2, 3/4, 1} * A_i must do no
// better on Eq_max and Eq_avg.
AttentionCertificate optimal_attention(const AttentionCaps& caps, const CostModel& cost,
                                       const DesignSettings& settings = {},
                                       std::size_t max_candidates = 4000);

// --- budget-preserving redistribution ----------------------------------------

// Sets a_s = new_value and re-solves a_1 so the expected payout is unchanged.
// Throws MechanismError if ranks 2..n lose monotonicity, ValidationError if the
// required a_1 falls below a_2, ConvergenceError if the budget cannot be held
// to 1e-8.
RewardVector hold_budget(const RewardVector& rewards, const CostModel& cost, Rank s,
                         double new_value, const DesignSettings& settings = {});

// Prize A such that winner_take_all(n, A) has expected payout `budget`.
double prize_for_budget(std::size_t n, const CostModel& cost, double budget,
                        const DesignSettings& settings = {});

enum class DifferenceScheme { central, forward, backward, implicit };
std::string_view to_string(DifferenceScheme scheme);

struct PerturbationResult {
  Rank s = 2;
  double delta = 0.0;
  DifferenceScheme scheme = DifferenceScheme::central;
  double da1_per_das_at_B = 0.0;
  double d_eqmax = 0.0;
  double d_eqavg = 0.0;
  double bound = 0.0;            // -W(s)/W(1)
  double budget_mismatch = 0.0;  // max |B(perturbed) - B(base)|
};

// Derivatives of Eq_max and Eq_avg along a_s with a_1 adjusted to hold the
// expected budget. Central differences when a_s +/- delta stay monotone,
// otherwise a second-order one-sided stencil on the admissible side; when no
// monotone neighbour exists (ties on both sides of rank s) the implicit
// derivative is returned.
PerturbationResult budget_matched_derivative(const RewardVector& rewards, const CostModel& cost,
                                             Rank s, double delta,
                                             const DesignSettings& settings = {});

// The same derivatives from implicit differentiation of the equilibrium
// condition: dx/da_k = (dH/da_k) / (-U'(x)), integrated in x so U' cancels.
PerturbationResult implicit_budget_matched_derivative(const RewardVector& rewards,
                                                      const CostModel& cost, Rank s,
                                                      const DesignSettings& settings = {});

// --- experiments --------------------------------------------------------------

struct TaxRow {
  double tax = 0.0;
  bool feasible = false;
  std::string error;
  double winner_prize = 0.0;
  double participation = 0.0;
  double eq_max = 0.0;
  double eq_avg = 0.0;
  double budget = 0.0;
};

// One row per tax level: taxed_wta(n, prize, t), its equilibrium and metrics.
std::vector<TaxRow> tax_sweep(std::size_t n, double prize, const CostModel& cost,
                              const std::vector<double>& taxes,
                              const DesignSettings& settings = {});

struct AvgSignRow {
  double budget = 0.0;
  bool ok = false;
  std::string error;
  double prize = 0.0;
  double participation = 0.0;
  double d_eqavg = 0.0;
  int sign = 0;
};

struct AvgSignSweep {
  std::vector<AvgSignRow> rows;
  int sign_changes = 0;
  std::optional<double> crossover;  // budget where d_eqavg changes sign
};

// At winner-take-all with an exponential cost, the sign of the budget-matched
// dEq_avg/da_s for each budget. The first sign change is refined by bisection.
AvgSignSweep avg_sign_vs_budget(std::size_t n, const CostModel& cost,
                                const std::vector<double>& budgets, Rank s,
                                const DesignSettings& settings = {});

struct DominanceReport {
  std::size_t n = 0;
  double budget = 0.0;
  bool claim_applies = false;  // c'/c nonincreasing
  double wta_prize = 0.0;
  double wta_eq_max = 0.0;
  std::size_t trials = 0;
  std::size_t evaluated = 0;
  std::size_t rescale_failures = 0;
  double best_trial_eq_max = 0.0;
  double worst_gap = 0.0;  // wta_eq_max - best_trial_eq_max
  std::size_t violations = 0;
  std::vector<double> trial_eq_max;  // NaN where the rescale failed
};

// Random monotone nonnegative schedules rescaled to the same expected budget,
// compared against winner-take-all on Eq_max.
DominanceReport wta_dominance_trial(std::size_t n, double budget, const CostModel& cost,
                                    std::size_t trials, std::uint64_t seed,
                                    const DesignSettings& settings = {});

// Random schedule with exponential spacings, suffix-summed so it is
// nonincreasing (the draw used by wta_dominance_trial).
std::vector<double> random_monotone_rewards(std::size_t n, std::uint64_t seed,
                                            std::uint64_t index);

}  // namespace contest
