#include "contest/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace contest {
namespace {

void require_rank(std::size_t n, Rank k) {
  if (k < 1 || k > n) {
    throw DomainError("rank " + std::to_string(k) + " outside 1.." + std::to_string(n));
  }
}

void require_probability(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("probability must lie in [0, 1]");
}

// Both paths integrate a function phi of the pressure with phi(0) = 0.
//   direct:       int_0^qbar phi(x(q)) dq
//   substitution: int_0^p q(x) phi'(x) dx
template <class Phi, class DPhi>
numerics::QuadratureResult quality_integral(const EquilibriumSolution& sol,
                                            const MetricsSettings& settings, Phi phi,
                                            DPhi dphi) {
  if (sol.regime() == Regime::no_entry) return {};
  if (settings.path == QualityPath::direct) {
    // q = qbar (3t^2 - 2t^3) flattens the square-root behaviour of x(q) at an
    // end of the support where U'(x) vanishes (tied top or bottom prizes).
    const double qbar = sol.support_end();
    return numerics::integrate(
        [&](double t) {
          const double q = std::min(qbar * t * t * (3.0 - 2.0 * t), qbar);
          return phi(sol.pressure(q)) * 6.0 * qbar * t * (1.0 - t);
        },
        0.0, 1.0, settings.quadrature);
  }
  const auto& cost = sol.cost();
  const double c0 = cost.entry_cost();
  const double top = sol.rewards().first() - sol.shift();
  auto quality_at = [&](double x) {
    const double v = numerics::bernstein(sol.rewards().values(), x) - sol.shift();
    return cost.inverse(std::clamp(v, c0, top));
  };
  return numerics::integrate([&](double x) { return quality_at(x) * dphi(x); }, 0.0,
                             sol.participation(), settings.quadrature);
}

}  // namespace

std::string_view to_string(QualityPath path) {
  return path == QualityPath::direct ? "direct" : "substitution";
}

double binomial_tail(std::size_t n, Rank k, double p) {
  require_rank(n, k);
  require_probability(p);
  std::vector<double> indicator(n + 1, 0.0);
  for (std::size_t j = k; j <= n; ++j) indicator[j] = 1.0;
  return numerics::bernstein(indicator, p);
}

double rank_tail_gap(std::size_t n, Rank s, double p) {
  require_rank(n, s);
  if (!(p > 0.0 && p < 1.0)) throw DomainError("rank_tail_gap: p must lie in (0, 1)");
  const double lead = -std::expm1(static_cast<double>(n) * std::log1p(-p));
  const double odds = std::pow(p / (1.0 - p), static_cast<double>(s - 1));
  return lead * numerics::binomial(static_cast<unsigned>(n - 1), static_cast<unsigned>(s - 1)) *
             odds -
         binomial_tail(n, s, p);
}

double expected_budget(const RewardVector& rewards, double participation) {
  require_probability(participation);
  const std::size_t n = rewards.size();
  if (participation == 0.0) return 0.0;
  if (participation == 1.0) return rewards.total();
  // Payout when j agents enter is a_1 + ... + a_j.
  std::vector<double> payout(n + 1, 0.0);
  for (std::size_t j = 1; j <= n; ++j) payout[j] = payout[j - 1] + rewards.at(j);
  return numerics::bernstein(payout, participation);
}

double expected_budget(const EquilibriumSolution& sol) {
  return expected_budget(sol.rewards(), sol.participation());
}

numerics::QuadratureResult expected_max_quality(const EquilibriumSolution& sol,
                                                const MetricsSettings& settings) {
  const auto n = static_cast<double>(sol.n());
  return quality_integral(
      sol, settings, [n](double x) { return -std::expm1(n * std::log1p(-x)); },
      [n](double x) { return n * std::pow(1.0 - x, n - 1.0); });
}

numerics::QuadratureResult expected_avg_quality(const EquilibriumSolution& sol,
                                                const MetricsSettings& settings) {
  return quality_integral(
      sol, settings, [](double x) { return x; }, [](double) { return 1.0; });
}

double rank_density(const EquilibriumSolution& sol, Rank k, double q) {
  require_rank(sol.n(), k);
  if (!(q >= 0.0) || q > sol.support_end()) {
    throw DomainError("rank_density: quality outside the support");
  }
  return rank_weight(sol.n(), k, sol.pressure(q));
}

double rank_probability(const EquilibriumSolution& sol, Rank k) {
  require_rank(sol.n(), k);
  return binomial_tail(sol.n(), k, sol.participation()) / static_cast<double>(sol.n());
}

ContestMetrics evaluate(const EquilibriumSolution& sol, const MetricsSettings& settings) {
  ContestMetrics m;
  m.budget = expected_budget(sol);
  const auto best = expected_max_quality(sol, settings);
  const auto avg = expected_avg_quality(sol, settings);
  m.eq_max = best.value;
  m.eq_avg = avg.value;
  m.eq_total = static_cast<double>(sol.n()) * avg.value;
  m.quadrature_error_estimate = std::max(best.error_estimate, avg.error_estimate);
  m.rank_prob.reserve(sol.n());
  for (Rank k = 1; k <= sol.n(); ++k) m.rank_prob.push_back(rank_probability(sol, k));
  return m;
}

}  // namespace contest
