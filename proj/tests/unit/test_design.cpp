#include <cmath>
#include <random>
#include <vector>

#include "contest/design.hpp"
#include "doctest.h"
#include "instances.hpp"
#include "oracle.hpp"

using namespace contest;

namespace {

const CostModel kLinear = CostModel::linear(0.25, 1.0);

std::vector<double> values(const RewardVector& r) { return {r.values().begin(), r.values().end()}; }

double budget_of(const RewardVector& r, const CostModel& cost) {
  return oracle::budget(values(r), EquilibriumSolution::solve(r, cost).participation());
}

}  // namespace

TEST_CASE("sensitivity signs follow the rank and the entry-cost boundary") {
  std::mt19937_64 rng(41);
  int checked = 0;
  while (checked < 100) {
    const auto inst = testing_support::random_instance(rng, 8);
    const double c0 = inst.cost.entry_cost();
    const std::size_t n = inst.rewards.size();
    const double delta = 1e-4 * inst.rewards.first();
    // need room for a +/- delta move at every rank and a_n away from c(0)
    bool roomy = std::abs(inst.rewards.last() - c0) > 2 * delta;
    for (std::size_t i = 1; i < n; ++i) roomy = roomy && inst.rewards.at(i) - inst.rewards.at(i + 1) > 2 * delta;
    if (!roomy) continue;
    ++checked;
    for (Rank i = 1; i <= n; ++i) {
      const auto report = reward_sensitivity(inst.rewards, inst.cost, i, delta);
      CAPTURE(i);
      CAPTURE(values(inst.rewards));
      if (i < n || inst.rewards.last() < c0) {
        CHECK(report.sign == SignSummary::positive);
      } else {
        CHECK(report.sign == SignSummary::negative);
      }
      CHECK(report.quality.size() == 50);
    }
  }
}

TEST_CASE("sensitivity reports the boundary and rejects invalid steps") {
  const auto at_boundary = RewardVector::validate({1, 0.5, 0.25});
  CHECK(reward_sensitivity(at_boundary, kLinear, 3, 1e-4).sign == SignSummary::boundary);
  const auto wta = winner_take_all(3, 1.0);
  CHECK_THROWS_AS(reward_sensitivity(wta, kLinear, 2, 1e-4), ValidationError);
  CHECK_THROWS_AS(reward_sensitivity(RewardVector::validate({1, 0.9}), kLinear, 1, 0.2), ValidationError);
  CHECK_THROWS_AS(reward_sensitivity(wta, kLinear, 1, 0.0), DomainError);
  // dp/da_1 > 0 in the interior regime, 0 in the full one
  CHECK(reward_sensitivity(wta, kLinear, 1, 1e-4).participation_derivative > 0.0);
  CHECK(reward_sensitivity(RewardVector::validate({1, 0.5}), kLinear, 1, 1e-4).participation_derivative == 0.0);
}

TEST_CASE("attention schedule certificate") {
  auto vals = [](const AttentionCertificate& c) { return values(c.schedule); };
  const auto a = optimal_attention(AttentionCaps::validate({1, 0.5, 0.4}), CostModel::linear(0.3, 1.0));
  CHECK(vals(a) == std::vector<double>{1, 0.5, 0.3});
  CHECK(a.passed);
  const auto b = optimal_attention(AttentionCaps::validate({1, 0.5, 0.2}), CostModel::linear(0.3, 1.0));
  CHECK(vals(b) == std::vector<double>{1, 0.5, 0.2});
  CHECK(b.passed);
  CHECK(b.lattice_size > 10);
  CHECK_FALSE(b.truncated);
  CHECK(b.best_lattice_eq_max <= b.eq_max + 1e-9);
  CHECK(b.best_lattice_eq_avg <= b.eq_avg + 1e-9);
  const auto c = optimal_attention(AttentionCaps::validate({1, 1, 1}), CostModel::linear(0.5, 1.0));
  CHECK(vals(c) == std::vector<double>{1, 1, 0.5});
  CHECK(c.passed);
  CHECK_THROWS_AS(optimal_attention(AttentionCaps::validate({0.2, 0.1}), CostModel::linear(0.3, 1.0)),
                  ValidationError);
  const auto capped = optimal_attention(AttentionCaps::validate({2, 1.8, 1.5, 1.2, 1, 0.9}),
                                        CostModel::linear(0.3, 1.0), {}, 50);
  CHECK(capped.truncated);
}

TEST_CASE("hold_budget") {
  const auto wta = winner_take_all(3, 1.0);
  CHECK(hold_budget(wta, kLinear, 2, 0.0) == wta);
  const auto moved = hold_budget(wta, kLinear, 2, 0.02);
  CHECK(moved.at(1) < 1.0);
  CHECK(moved.at(2) == 0.02);
  CHECK(std::abs(budget_of(moved, kLinear) - budget_of(wta, kLinear)) <= 1e-8);
  CHECK_THROWS_AS(hold_budget(wta, kLinear, 2, 0.9), ValidationError);
  CHECK_THROWS_AS(hold_budget(RewardVector::validate({1, 0.5, 0.2}), kLinear, 3, 0.6), MechanismError);
  CHECK_THROWS_AS(hold_budget(wta, kLinear, 1, 0.5), DomainError);
  CHECK_THROWS_AS(hold_budget(wta, kLinear, 4, 0.0), DomainError);

  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 40; ++trial) {
    const auto inst = testing_support::random_instance(rng, 6);
    const std::size_t n = inst.rewards.size();
    if (n < 3) continue;
    const Rank s = 2 + trial % (n - 1);
    const double room = s < n ? inst.rewards.at(s) - inst.rewards.at(s + 1) : inst.rewards.at(s);
    const double next = inst.rewards.at(s) - 0.25 * std::abs(room);
    try {
      const auto out = hold_budget(inst.rewards, inst.cost, s, next);
      CHECK(std::abs(budget_of(out, inst.cost) - budget_of(inst.rewards, inst.cost)) <= 1e-8);
      CHECK(out.at(1) >= out.at(2));
    } catch (const MechanismError&) {
      // lowering a_s below a_{s+1} when they were tied is not a legal move
    }
  }
}

TEST_CASE("prize_for_budget inverts the winner-take-all budget") {
  const auto cost = CostModel::exponential(1.0);
  const double golden_ratio = 0.5 * (1.0 + std::sqrt(5.0));
  CHECK(prize_for_budget(3, cost, 2.0) == doctest::Approx(golden_ratio * golden_ratio).epsilon(1e-10));
  for (double b : {0.05, 0.5, 3.0, 12.0}) {
    const double a = prize_for_budget(3, cost, b);
    CHECK(a - std::pow(a, -0.5) == doctest::Approx(b).epsilon(1e-10));
  }
  CHECK_THROWS_AS(prize_for_budget(3, cost, -1.0), DomainError);
}

TEST_CASE("finite differences agree with implicit derivatives") {
  std::mt19937_64 rng(61);
  int checked = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const auto inst = testing_support::random_instance(rng, 6);
    const auto sol = EquilibriumSolution::solve(inst.rewards, inst.cost);
    if (sol.regime() != Regime::interior) continue;
    for (Rank s = 2; s <= inst.rewards.size(); ++s) {
      const auto fd = budget_matched_derivative(inst.rewards, inst.cost, s, 0.0);
      const auto im = implicit_budget_matched_derivative(inst.rewards, inst.cost, s);
      const double scale = 1.0 + std::abs(im.d_eqmax);
      CHECK(std::abs(fd.d_eqmax - im.d_eqmax) <= 1e-5 * scale);
      CHECK(std::abs(fd.d_eqavg - im.d_eqavg) <= 1e-5 * (1.0 + std::abs(im.d_eqavg)));
      CHECK(std::abs(fd.da1_per_das_at_B - im.da1_per_das_at_B) <= 1e-5 * (1.0 + std::abs(im.da1_per_das_at_B)));
      CHECK(fd.budget_mismatch <= 1e-8);
      CHECK(fd.da1_per_das_at_B < 0.0);
      // secant slope bound
      CHECK(fd.da1_per_das_at_B <= fd.bound + 1e-6);
      ++checked;
    }
  }
  CHECK(checked > 30);
}

TEST_CASE("winner-take-all redistribution lowers both quality measures for linear cost") {
  for (double c0 : {0.05, 0.25, 0.5}) {
    const auto cost = CostModel::linear(c0, 1.0);
    for (std::size_t n : {2u, 3u, 4u, 6u}) {
      for (Rank s = 2; s <= n; ++s) {
        const auto r = budget_matched_derivative(winner_take_all(n, 1.0), cost, s, 0.0);
        CHECK(r.d_eqmax <= 1e-8);
        CHECK(r.d_eqavg <= 1e-8);
        CHECK(r.budget_mismatch <= 1e-8);
        CHECK(r.da1_per_das_at_B <= r.bound + 1e-6);
      }
    }
  }
  // stencil choice at winner-take-all
  const auto cost = CostModel::linear(0.25, 1.0);
  CHECK(budget_matched_derivative(winner_take_all(2, 1.0), cost, 2, 0.0).scheme == DifferenceScheme::central);
  CHECK(budget_matched_derivative(winner_take_all(4, 1.0), cost, 2, 0.0).scheme == DifferenceScheme::forward);
  CHECK(budget_matched_derivative(winner_take_all(4, 1.0), cost, 3, 0.0).scheme == DifferenceScheme::implicit);
  CHECK(budget_matched_derivative(winner_take_all(4, 1.0), cost, 4, 0.0).scheme == DifferenceScheme::backward);
}

TEST_CASE("tax sweep") {
  const auto rows = tax_sweep(3, 1.0, kLinear, {0.0, 0.01, 0.02});
  REQUIRE(rows.size() == 3);
  for (const auto& r : rows) {
    CHECK(r.feasible);
    CHECK(std::abs(r.budget - rows[0].budget) <= 1e-8);
  }
  CHECK(rows[1].eq_max > rows[0].eq_max);
  CHECK(rows[1].participation < rows[0].participation);
  CHECK(rows[2].participation < rows[1].participation);
  const auto plain = evaluate(EquilibriumSolution::solve(winner_take_all(3, 1.0), kLinear));
  CHECK(rows[0].winner_prize == 1.0);
  CHECK(rows[0].budget == plain.budget);
  CHECK(std::abs(rows[0].eq_max - plain.eq_max) <= 1e-9);
  const auto wide = tax_sweep(3, 1.0, kLinear, {0.0, 0.05, 5.0});
  CHECK(wide[1].feasible);
  CHECK_THROWS_AS(tax_sweep(3, 1.0, CostModel::linear(0.0, 1.0), {0.01}), ValidationError);
}

TEST_CASE("average-quality sign against the budget for exponential cost") {
  std::vector<double> budgets;
  for (int i = 0; i <= 12; ++i) budgets.push_back(0.05 * std::pow(2.0, i * 0.75));
  const auto sweep = avg_sign_vs_budget(3, CostModel::exponential(1.0), budgets, 2);
  CHECK(sweep.rows.front().sign < 0);
  CHECK(sweep.rows.back().sign > 0);
  CHECK(sweep.sign_changes == 1);
  REQUIRE(sweep.crossover.has_value());
  CHECK(*sweep.crossover > 3.0);
  CHECK(*sweep.crossover < 5.0);
  CHECK_THROWS_AS(avg_sign_vs_budget(3, kLinear, budgets, 2), ValidationError);
  CHECK_THROWS_AS(avg_sign_vs_budget(3, CostModel::exponential(1.0), budgets, 1), DomainError);
}

TEST_CASE("winner-take-all dominance sampling") {
  const auto lin = wta_dominance_trial(4, 0.8, kLinear, 200, 7);
  CHECK(lin.claim_applies);
  CHECK(lin.violations == 0);
  CHECK(lin.evaluated + lin.rescale_failures == 200);
  CHECK(lin.worst_gap >= 0.0);
  const auto ex = wta_dominance_trial(3, 1.0, CostModel::exponential(1.0), 100, 9);
  CHECK(ex.claim_applies);
  CHECK(ex.violations == 0);
  const auto quad = wta_dominance_trial(3, 0.5, CostModel::quadratic_plus(0.1, 0.01, 1.0), 20, 1);
  CHECK_FALSE(quad.claim_applies);
  // deterministic in the seed
  const auto again = wta_dominance_trial(4, 0.8, kLinear, 200, 7);
  CHECK(again.worst_gap == lin.worst_gap);
}

TEST_CASE("random monotone schedules") {
  for (std::uint64_t i = 0; i < 200; ++i) {
    const auto a = random_monotone_rewards(5, 42, i);
    REQUIRE(a.size() == 5);
    for (std::size_t k = 0; k + 1 < a.size(); ++k) CHECK(a[k] >= a[k + 1]);
    CHECK(a.back() >= 0.0);
    CHECK(a.front() > a.back());
    CHECK(a == random_monotone_rewards(5, 42, i));
  }
}
