#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "contest/equilibrium.hpp"
#include "contest/numerics.hpp"

namespace contest {

// How the quality integrals are evaluated.
//   direct        integrate over q in [0, qbar], solving x(q) at every node
//   substitution  integrate over x in [0, p] with q(x) = c^{-1}(U(x) - shift);
//                 after integrating by parts the integrand is smooth
enum class QualityPath { direct, substitution };

std::string_view to_string(QualityPath path);

struct MetricsSettings {
  numerics::QuadratureSettings quadrature{};
  QualityPath path = QualityPath::direct;
};

struct ContestMetrics {
  double budget = 0.0;
  double eq_max = 0.0;
  double eq_avg = 0.0;
  double eq_total = 0.0;
  std::vector<double> rank_prob;  // W(1..n)
  double quadrature_error_estimate = 0.0;
};

// sum_{j>=k} C(n, j) p^j (1-p)^(n-j): probability that at least k of n
// independent agents enter.
double binomial_tail(std::size_t n, Rank k, double p);

// (1 - (1-p)^n) C(n-1, s-1) p^(s-1) (1-p)^(1-s) - binomial_tail(n, s, p).
// Nonnegative; p must lie strictly inside (0, 1).
double rank_tail_gap(std::size_t n, Rank s, double p);

// Expected total payout sum_k a_k * binomial_tail(n, k, p).
double expected_budget(const RewardVector& rewards, double participation);
double expected_budget(const EquilibriumSolution& sol);

// Expected best quality, counting "no contribution" as quality 0.
numerics::QuadratureResult expected_max_quality(const EquilibriumSolution& sol,
                                                const MetricsSettings& settings = {});
// Expected quality of a single agent (0 when it stays out).
numerics::QuadratureResult expected_avg_quality(const EquilibriumSolution& sol,
                                                const MetricsSettings& settings = {});

// Probability that an entrant with quality q finishes at rank k.
double rank_density(const EquilibriumSolution& sol, Rank k, double q);
// Probability that a given agent finishes at rank k: binomial_tail(n, k, p) / n.
double rank_probability(const EquilibriumSolution& sol, Rank k);

ContestMetrics evaluate(const EquilibriumSolution& sol, const MetricsSettings& settings = {});

}  // namespace contest
