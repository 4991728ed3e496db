#include "contest/montecarlo.hpp"

#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "contest/numerics.hpp"
#include "contest/parallel.hpp"
#include "contest/random.hpp"

namespace contest::montecarlo {
namespace {

constexpr std::size_t kBlock = 4096;

struct Moments {
  double sum = 0.0;
  double sum_sq = 0.0;
  void add(double v) {
    sum += v;
    sum_sq += v * v;
  }
  void merge(const Moments& o) {
    sum += o.sum;
    sum_sq += o.sum_sq;
  }
  Estimate estimate(std::size_t count) const {
    if (count == 0) return {};
    const double m = static_cast<double>(count);
    const double mean = sum / m;
    const double var = count > 1 ? std::max(0.0, (sum_sq - m * mean * mean) / (m - 1.0)) : 0.0;
    return {mean, std::sqrt(var / m)};
  }
};

struct Draw {
  std::size_t agent;
  double quality;
  std::uint64_t key;
};

// Descending quality; ties by the random key.
bool better(const Draw& x, const Draw& y) {
  if (x.quality != y.quality) return x.quality > y.quality;
  return x.key < y.key;
}

double kolmogorov_cdf(double x) {
  if (x <= 0.0) return 0.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * x * x);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-18) break;
  }
  return 1.0 - 2.0 * sum;
}

}  // namespace

double sample_quality(const EquilibriumSolution& sol, double u) { return sol.quantile(u); }

RoundOutcome play_round(const EquilibriumSolution& sol, std::uint64_t seed, std::uint64_t trial) {
  const std::size_t n = sol.n();
  const double p = sol.participation();
  std::vector<Draw> draws;
  draws.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    CounterRng rng(seed, trial, k);
    const double enter = rng.uniform();
    const double u = rng.uniform();
    const std::uint64_t key = rng.next();
    if (enter < p) draws.push_back({k, sample_quality(sol, u), key});
  }
  std::sort(draws.begin(), draws.end(), better);

  RoundOutcome out;
  const auto& rewards = sol.rewards();
  for (std::size_t r = 0; r < draws.size(); ++r) {
    out.agent.push_back(draws[r].agent);
    out.quality.push_back(draws[r].quality);
    out.payment.push_back(rewards.at(r + 1));
    out.total_payment += rewards.at(r + 1);
    out.total_quality += draws[r].quality;
  }
  out.max_quality = draws.empty() ? 0.0 : draws.front().quality;
  return out;
}

SimulationReport run(const EquilibriumSolution& sol, std::size_t trials, std::uint64_t seed,
                     const SimulationOptions& options) {
  if (trials == 0) throw DomainError("simulation: trials must be >= 1");
  const std::size_t n = sol.n();
  struct Block {
    Moments best, avg, payout;
    std::vector<std::size_t> histogram;
    std::vector<double> samples;
  };
  const std::size_t blocks = (trials + kBlock - 1) / kBlock;
  std::vector<Block> partial(blocks);
  parallel_for(blocks, options.threads, [&](std::size_t b) {
    Block& block = partial[b];
    block.histogram.assign(n + 1, 0);
    const std::size_t end = std::min(trials, (b + 1) * kBlock);
    for (std::size_t t = b * kBlock; t < end; ++t) {
      const auto round = play_round(sol, seed, t);
      block.best.add(round.max_quality);
      block.avg.add(round.total_quality / static_cast<double>(n));
      block.payout.add(round.total_payment);
      ++block.histogram[round.agent.size()];
      if (options.keep_samples) {
        block.samples.insert(block.samples.end(), round.quality.begin(), round.quality.end());
      }
    }
  });

  SimulationReport report;
  report.trials = trials;
  report.seed = seed;
  report.entrant_histogram.assign(n + 1, 0);
  Moments best, avg, payout;
  for (const auto& block : partial) {
    best.merge(block.best);
    avg.merge(block.avg);
    payout.merge(block.payout);
    for (std::size_t j = 0; j <= n; ++j) report.entrant_histogram[j] += block.histogram[j];
    report.samples.insert(report.samples.end(), block.samples.begin(), block.samples.end());
  }
  report.eq_max = best.estimate(trials);
  report.eq_avg = avg.estimate(trials);
  report.payout = payout.estimate(trials);
  return report;
}

std::vector<PayoffPoint> deviation_check(const EquilibriumSolution& sol,
                                         std::span<const double> quality_grid,
                                         std::size_t trials, std::uint64_t seed,
                                         const SimulationOptions& options) {
  if (trials == 0) throw DomainError("deviation check: trials must be >= 1");
  const std::size_t n = sol.n();
  const double p = sol.participation();
  const auto& rewards = sol.rewards();
  const auto& cost = sol.cost();
  std::vector<double> cost_at(quality_grid.size());
  for (std::size_t g = 0; g < quality_grid.size(); ++g) cost_at[g] = cost.eval(quality_grid[g]);

  const std::size_t blocks = (trials + kBlock - 1) / kBlock;
  std::vector<std::vector<Moments>> partial(blocks, std::vector<Moments>(quality_grid.size()));
  parallel_for(blocks, options.threads, [&](std::size_t b) {
    std::vector<double> rivals;
    const std::size_t end = std::min(trials, (b + 1) * kBlock);
    for (std::size_t t = b * kBlock; t < end; ++t) {
      // Agent 0 deviates; agents 1..n-1 follow (p, G).
      rivals.clear();
      for (std::size_t k = 1; k < n; ++k) {
        CounterRng rng(seed, t, k);
        const double enter = rng.uniform();
        const double u = rng.uniform();
        if (enter < p) rivals.push_back(sample_quality(sol, u));
      }
      CounterRng own(seed, t, 0);
      for (std::size_t g = 0; g < quality_grid.size(); ++g) {
        const double q = quality_grid[g];
        std::size_t above = 0, tied = 0;
        for (double r : rivals) {
          above += r > q;
          tied += r == q;
        }
        std::size_t rank = above + 1;
        if (tied > 0) rank += static_cast<std::size_t>(own.uniform() * static_cast<double>(tied + 1));
        partial[b][g].add(rewards.at(rank) - cost_at[g]);
      }
    }
  });

  std::vector<PayoffPoint> curve(quality_grid.size());
  for (std::size_t g = 0; g < quality_grid.size(); ++g) {
    Moments total;
    for (const auto& block : partial) total.merge(block[g]);
    const auto e = total.estimate(trials);
    curve[g] = {quality_grid[g], e.mean, e.std_error, trials};
  }
  return curve;
}

GoodnessOfFit entrant_count_fit(const SimulationReport& report, std::size_t n, double p) {
  if (report.entrant_histogram.size() != n + 1) {
    throw DomainError("goodness of fit: histogram does not match n");
  }
  const double m = static_cast<double>(report.trials);
  struct Group {
    double expected = 0.0;
    double observed = 0.0;
  };
  std::vector<Group> groups;
  Group current;
  for (std::size_t j = 0; j <= n; ++j) {
    current.expected += m * numerics::binomial_pmf(static_cast<unsigned>(n), static_cast<unsigned>(j), p);
    current.observed += static_cast<double>(report.entrant_histogram[j]);
    if (current.expected >= 5.0) {
      groups.push_back(current);
      current = {};
    }
  }
  if (current.expected > 0.0 || current.observed > 0.0) {
    if (groups.empty()) {
      groups.push_back(current);
    } else {
      groups.back().expected += current.expected;
      groups.back().observed += current.observed;
    }
  }
  GoodnessOfFit fit;
  if (groups.size() < 2) return fit;
  for (const auto& g : groups) {
    fit.statistic += (g.observed - g.expected) * (g.observed - g.expected) / g.expected;
  }
  fit.dof = groups.size() - 1;
  boost::math::chi_squared dist(static_cast<double>(fit.dof));
  fit.p_value = boost::math::cdf(boost::math::complement(dist, fit.statistic));
  return fit;
}

double ks_distance(std::vector<double> samples, const EquilibriumSolution& sol) {
  if (samples.empty()) return 0.0;
  std::sort(samples.begin(), samples.end());
  const double m = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = sol.cdf(std::min(samples[i], sol.support_end()));
    d = std::max({d, f - static_cast<double>(i) / m, static_cast<double>(i + 1) / m - f});
  }
  return d;
}

double kolmogorov_critical(double alpha, std::size_t m) {
  if (!(alpha > 0.0 && alpha < 1.0) || m == 0) {
    throw DomainError("kolmogorov_critical: need 0 < alpha < 1 and m >= 1");
  }
  double lo = 0.0, hi = 5.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (kolmogorov_cdf(mid) < 1.0 - alpha ? lo : hi) = mid;
  }
  const double root = std::sqrt(static_cast<double>(m));
  return 0.5 * (lo + hi) / (root + 0.12 + 0.11 / root);
}

}  // namespace contest::montecarlo
