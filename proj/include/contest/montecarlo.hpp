#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "contest/equilibrium.hpp"

namespace contest::montecarlo {

// Inverse-CDF draw from G: q(u) = c^{-1}(U(p (1 - u)) - shift).
double sample_quality(const EquilibriumSolution& sol, double u);

// One play of the contest. Entrants are listed best first.
struct RoundOutcome {
  std::vector<std::size_t> agent;  // agent id per rank
  std::vector<double> quality;     // quality per rank
  std::vector<double> payment;     // a_rank per rank
  double total_payment = 0.0;
  double max_quality = 0.0;        // 0 when nobody enters
  double total_quality = 0.0;      // non-entrants count as quality 0
};

// Agent k of round `trial` draws from the stream (seed, trial, k): entry,
// quality, then a tie-break key. Equal qualities are ordered by the key.
RoundOutcome play_round(const EquilibriumSolution& sol, std::uint64_t seed, std::uint64_t trial);

struct Estimate {
  double mean = 0.0;
  double std_error = 0.0;
};

struct SimulationOptions {
  unsigned threads = 1;
  bool keep_samples = false;  // retain entrant qualities for distribution tests
};

struct SimulationReport {
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  Estimate eq_max;
  Estimate eq_avg;
  Estimate payout;
  std::vector<std::size_t> entrant_histogram;  // index = number of entrants
  std::vector<double> samples;                 // entrant qualities, trial order
};

// Deterministic in (sol, trials, seed) for any thread count: trials are cut
// into fixed blocks that are reduced in block order.
SimulationReport run(const EquilibriumSolution& sol, std::size_t trials, std::uint64_t seed,
                     const SimulationOptions& options = {});

struct PayoffPoint {
  double quality = 0.0;
  double mean_payoff = 0.0;
  double std_error = 0.0;
  std::size_t trials = 0;
};

// Payoff of one agent that always enters with quality q while the other n-1
// play the equilibrium. All grid points share the opponents' draws.
std::vector<PayoffPoint> deviation_check(const EquilibriumSolution& sol,
                                         std::span<const double> quality_grid,
                                         std::size_t trials, std::uint64_t seed,
                                         const SimulationOptions& options = {});

struct GoodnessOfFit {
  double statistic = 0.0;
  std::size_t dof = 0;
  double p_value = 1.0;
};

// Pearson chi-square of the entrant histogram against Binomial(n, p); bins
// with expected count below 5 are pooled with their neighbours.
GoodnessOfFit entrant_count_fit(const SimulationReport& report, std::size_t n, double p);

// Kolmogorov-Smirnov distance between samples and the equilibrium G.
double ks_distance(std::vector<double> samples, const EquilibriumSolution& sol);

// Critical KS distance at level alpha for m samples (Kolmogorov limit law with
// Stephens' small-sample correction).
double kolmogorov_critical(double alpha, std::size_t m);

}  // namespace contest::montecarlo
