#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "contest/equilibrium.hpp"
#include "doctest.h"
#include "instances.hpp"
#include "oracle.hpp"

using namespace contest;
using testing_support::random_instance;

namespace {

const CostModel kLinear = CostModel::linear(0.25, 1.0);

std::vector<double> values(const RewardVector& r) { return {r.values().begin(), r.values().end()}; }

}  // namespace

TEST_CASE("benefit function") {
  const auto a = RewardVector::validate({1, 0});
  CHECK(benefit(a, 0.0) == 1.0);
  CHECK(benefit(a, 1.0) == 0.0);
  CHECK(benefit(a, 0.75) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(benefit_slope(a, 0.2) == doctest::Approx(-1.0));
  CHECK(benefit_slope(RewardVector::validate({1, 1, 0}), 0.0) == 0.0);
  CHECK_THROWS_AS(benefit(a, -0.1), DomainError);
  CHECK_THROWS_AS(benefit_slope(a, 1.1), DomainError);

  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const auto r = RewardVector::validate(testing_support::random_rewards(rng, 5, 0.3));
    const double h = 1e-6;
    const double fd = (benefit(r, 0.3 + h) - benefit(r, 0.3 - h)) / (2 * h);
    CHECK(std::abs(fd - benefit_slope(r, 0.3)) <= 1e-6);
    CHECK(benefit(r, 0.3) == doctest::Approx(oracle::benefit(values(r), 0.3)).epsilon(1e-13));
    for (double x : {0.0, 0.1, 0.5, 0.9, 1.0}) CHECK(benefit_slope(r, x) <= 0.0);
  }
}

TEST_CASE("participation examples") {
  CHECK(solve_participation(RewardVector::validate({1, 0}), kLinear) ==
        doctest::Approx(0.75).epsilon(1e-14));
  CHECK(solve_participation(RewardVector::validate({1, 0.5}), kLinear) == 1.0);
  CHECK(solve_participation(RewardVector::validate({0.2, 0}), kLinear) == 0.0);
  CHECK(classify(RewardVector::validate({0.25, 0}), kLinear) == Regime::no_entry);
  CHECK(classify(RewardVector::validate({1, 0.25}), kLinear) == Regime::full);
}

TEST_CASE("golden interior instance") {
  const auto sol = EquilibriumSolution::solve(RewardVector::validate({1, 0}), kLinear);
  CHECK(sol.regime() == Regime::interior);
  CHECK(std::abs(sol.participation() - 0.75) <= 1e-12);
  CHECK(std::abs(sol.support_end() - 0.75) <= 1e-12);
  CHECK(sol.shift() == 0.0);
  CHECK(std::abs(sol.cdf(0.3) - 0.4) <= 1e-10);
  CHECK(sol.cdf(0.0) == doctest::Approx(0.0));
  CHECK(std::abs(sol.cdf(sol.support_end()) - 1.0) <= 1e-12);
  CHECK(std::abs(sol.density(0.4) - 1.0 / 0.75) <= 1e-10);
  CHECK(std::abs(sol.payoff_residual(sol.support_end() + 0.1) + 0.1) <= 1e-12);
  CHECK(std::abs(sol.payoff_residual(0.0)) <= 1e-10);
  CHECK(std::abs(sol.quantile(0.4) - 0.3) <= 1e-10);
  CHECK(sol.quantile(0.0) == 0.0);
  CHECK(std::abs(sol.quantile(1.0) - 0.75) <= 1e-12);
  CHECK_THROWS_AS(sol.cdf(0.8), DomainError);
  CHECK_THROWS_AS(sol.cdf(-0.1), DomainError);
  CHECK_THROWS_AS(sol.quantile(1.5), DomainError);
}

TEST_CASE("golden full-regime instance") {
  const auto sol = EquilibriumSolution::solve(RewardVector::validate({1, 0.5}), kLinear);
  CHECK(sol.regime() == Regime::full);
  CHECK(sol.participation() == 1.0);
  CHECK(std::abs(sol.support_end() - 0.5) <= 1e-12);
  CHECK(std::abs(sol.shift() - 0.25) <= 1e-15);
  CHECK(std::abs(sol.cdf(0.25) - 0.5) <= 1e-10);
  for (double q : {0.0, 0.1, 0.3, 0.5}) CHECK(std::abs(sol.payoff_residual(q)) <= 1e-10);
}

TEST_CASE("no-entry regime refuses distribution queries") {
  const auto sol = EquilibriumSolution::solve(RewardVector::validate({0.2, 0}), kLinear);
  CHECK(sol.regime() == Regime::no_entry);
  CHECK(sol.participation() == 0.0);
  CHECK(sol.support_end() == 0.0);
  CHECK_THROWS_AS(sol.cdf(0.0), StateError);
  CHECK_THROWS_AS(sol.quantile(0.5), StateError);
  CHECK_THROWS_AS(sol.density(0.0), StateError);
  CHECK(sol.payoff_residual(0.1) < 0.0);
}

TEST_CASE("negative rewards need an entry cost") {
  CHECK_THROWS_AS(EquilibriumSolution::solve(RewardVector::validate({1, -0.1}),
                                             CostModel::linear(0.0, 1.0)),
                  ValidationError);
  CHECK_NOTHROW(EquilibriumSolution::solve(RewardVector::validate({1, -0.1}), kLinear));
}

TEST_CASE("support endpoint") {
  CHECK(support_endpoint(RewardVector::validate({1, 0}), kLinear) == doctest::Approx(0.75));
  CHECK(support_endpoint(RewardVector::validate({1, 0.5}), kLinear) == doctest::Approx(0.5));
  const double tiny = support_endpoint(RewardVector::validate({0.25 + 1e-9, 0}), kLinear);
  CHECK(tiny >= 0.0);
  CHECK(tiny < 1e-8);
}

TEST_CASE("pressure agrees with an independent solver") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 30; ++trial) {
    const auto inst = random_instance(rng, 8);
    const auto sol = EquilibriumSolution::solve(inst.rewards, inst.cost);
    const oracle::Equilibrium ref(values(inst.rewards), testing_support::as_function(inst.cost));
    CHECK(sol.participation() == doctest::Approx(ref.p).epsilon(1e-10));
    CHECK(sol.support_end() == doctest::Approx(ref.qbar).epsilon(1e-10));
    for (int j = 0; j <= 20; ++j) {
      const double q = sol.support_end() * j / 20.0;
      CHECK(std::abs(sol.pressure(q) - ref.pressure(q)) <= 1e-9);
      CHECK(std::abs(competitor_pressure(inst.rewards, inst.cost, q) - ref.pressure(q)) <= 1e-9);
    }
  }
}

TEST_CASE("indifference, regime law and support endpoint on 200 random instances") {
  std::mt19937_64 rng(2024);
  int regimes[3] = {0, 0, 0};
  for (int trial = 0; trial < 200; ++trial) {
    const auto inst = random_instance(rng);
    const auto sol = EquilibriumSolution::solve(inst.rewards, inst.cost);
    const double c0 = inst.cost.entry_cost();
    ++regimes[static_cast<int>(sol.regime())];
    CHECK((sol.regime() == Regime::full) == (inst.rewards.last() >= c0));
    CHECK((sol.regime() == Regime::no_entry) == (inst.rewards.first() <= c0));
    CHECK(std::abs(inst.cost.eval(sol.support_end()) - (inst.rewards.first() - sol.shift())) <= 1e-8);
    CHECK(sol.shift() == std::max(inst.rewards.last() - c0, 0.0));
    if (sol.regime() == Regime::interior) CHECK(sol.shift() == 0.0);
    double worst = 0.0;
    for (int j = 0; j < 100; ++j) {
      const double q = sol.support_end() * j / 99.0;
      worst = std::max(worst, std::abs(sol.payoff_residual(q)));
    }
    CHECK(worst <= 1e-6);
    for (double extra : {1e-3, 0.1, 1.0}) {
      CHECK(sol.payoff_residual(sol.support_end() + extra) < 0.0);
    }
  }
  CHECK(regimes[static_cast<int>(Regime::interior)] > 50);
  CHECK(regimes[static_cast<int>(Regime::full)] > 20);
}

TEST_CASE("G is monotone and continuous") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 40; ++trial) {
    const auto inst = random_instance(rng);
    const auto sol = EquilibriumSolution::solve(inst.rewards, inst.cost);
    const int m = 400;
    const double h = sol.support_end() / m;
    double prev = sol.cdf(0.0);
    CHECK(prev == doctest::Approx(0.0));
    for (int j = 1; j <= m; ++j) {
      const double q = std::min(h * j, sol.support_end());
      const double g = sol.cdf(q);
      CHECK(g >= prev);
      // mean value bound with the density sampled on the step
      const double lipschitz = std::max({sol.density(q - h), sol.density(q - 0.5 * h), sol.density(q)});
      CHECK(g - prev <= 1.01 * lipschitz * h + 1e-12);
      prev = g;
    }
    CHECK(prev == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("regime continuity at a_n = c(0)") {
  std::mt19937_64 rng(313);
  for (int trial = 0; trial < 30; ++trial) {
    std::uniform_int_distribution<int> family(0, 2);
    const auto cost = testing_support::random_cost(rng, family(rng));
    const double c0 = cost.entry_cost();
    auto a = testing_support::random_rewards(rng, 2 + trial % 6, c0);
    a.front() = std::max(a.front(), 1.5 * c0);
    for (std::size_t i = 1; i + 1 < a.size(); ++i) a[i] = std::max(a[i], 1.2 * c0);
    auto below = a, above = a;
    below.back() = c0 - 1e-10;
    above.back() = c0 + 1e-10;
    const auto lo = EquilibriumSolution::solve(RewardVector::validate(below), cost);
    const auto hi = EquilibriumSolution::solve(RewardVector::validate(above), cost);
    CHECK(lo.regime() == Regime::interior);
    CHECK(hi.regime() == Regime::full);
    CHECK(std::abs(lo.participation() - hi.participation()) <= 1e-6);
    CHECK(std::abs(lo.support_end() - hi.support_end()) <= 1e-6);
    const double top = std::min(lo.support_end(), hi.support_end());
    for (int j = 0; j <= 20; ++j) {
      const double q = top * j / 20.0;
      CHECK(std::abs(lo.cdf(std::min(q, lo.support_end())) - hi.cdf(std::min(q, hi.support_end()))) <= 1e-6);
    }
  }
}

TEST_CASE("no pure-strategy profile survives a small upward deviation") {
  std::mt19937_64 rng(99);
  const double eps = 1e-4;
  for (int trial = 0; trial < 100; ++trial) {
    const auto inst = random_instance(rng);
    const auto sol = EquilibriumSolution::solve(inst.rewards, inst.cost);
    const double mean = inst.rewards.total() / static_cast<double>(inst.rewards.size());
    for (int j = 0; j <= 10; ++j) {
      const double q0 = sol.support_end() * j / 10.0;
      const double tied = mean - inst.cost.eval(q0);
      const double deviate = inst.rewards.first() - inst.cost.eval(q0 + eps);
      CHECK(deviate > tied);
    }
  }
}

TEST_CASE("inverse sampling reproduces G") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    const auto inst = random_instance(rng);
    const auto sol = EquilibriumSolution::solve(inst.rewards, inst.cost);
    for (int j = 0; j <= 50; ++j) {
      const double u = j / 50.0;
      CHECK(std::abs(sol.cdf(sol.quantile(u)) - u) <= 1e-8);
    }
  }
}

TEST_CASE("large n stays accurate") {
  std::vector<double> a(80, 0.0);
  a[0] = 3.0;
  a[1] = 1.0;
  const auto sol = EquilibriumSolution::solve(RewardVector::validate(a), CostModel::linear(0.3, 1.0));
  CHECK(sol.regime() == Regime::interior);
  CHECK(std::abs(benefit(sol.rewards(), sol.participation()) - 0.3) <= 1e-10);
  CHECK(std::abs(sol.payoff_residual(0.5 * sol.support_end())) <= 1e-8);
}
