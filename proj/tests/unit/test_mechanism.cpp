#include <vector>

#include "contest/cost_model.hpp"
#include "contest/mechanism.hpp"
#include "contest/metrics.hpp"
#include "contest/equilibrium.hpp"
#include "doctest.h"
#include "oracle.hpp"

using namespace contest;

namespace {

MechanismClause clause_of(std::vector<double> a) {
  try {
    (void)RewardVector::validate(std::move(a));
  } catch (const MechanismError& e) {
    return e.clause();
  }
  FAIL("expected MechanismError");
  return MechanismClause::finite;
}

}  // namespace

TEST_CASE("validate") {
  const auto wta = RewardVector::validate({1, 0, 0});
  CHECK(wta.nonnegative());
  CHECK(wta.size() == 3);
  CHECK(wta.at(1) == 1.0);
  CHECK(wta.total() == 1.0);
  CHECK(clause_of({1, 1, 1}) == MechanismClause::strict_step);
  CHECK(clause_of({0.5, 1, 0}) == MechanismClause::monotonicity);
  CHECK(clause_of({1}) == MechanismClause::size);
  CHECK(clause_of({1, std::nan("")}) == MechanismClause::finite);
  CHECK_FALSE(RewardVector::validate({1, -0.1}).nonnegative());
  CHECK_THROWS_AS(wta.at(0), DomainError);
  CHECK_THROWS_AS(wta.at(4), DomainError);
}

TEST_CASE("winner_take_all") {
  CHECK(winner_take_all(2, 1.0).values()[0] == 1.0);
  const auto five = winner_take_all(5, 2.0);
  CHECK(std::vector<double>(five.values().begin(), five.values().end()) ==
        std::vector<double>{2, 0, 0, 0, 0});
  CHECK_THROWS_AS(winner_take_all(3, 0.0), MechanismError);
  CHECK_THROWS_AS(winner_take_all(1, 1.0), MechanismError);
}

TEST_CASE("attention_schedule") {
  auto vals = [](const RewardVector& r) { return std::vector<double>(r.values().begin(), r.values().end()); };
  const auto caps = AttentionCaps::validate({1, 0.5, 0.4});
  CHECK(vals(attention_schedule(caps, 0.3)) == std::vector<double>{1, 0.5, 0.3});
  CHECK(vals(attention_schedule(AttentionCaps::validate({1, 0.5, 0.2}), 0.3)) ==
        std::vector<double>{1, 0.5, 0.2});
  CHECK(vals(attention_schedule(caps, 0.0)) == std::vector<double>{1, 0.5, 0});
  CHECK(vals(attention_schedule(AttentionCaps::validate({1, 1, 1}), 0.5)) ==
        std::vector<double>{1, 1, 0.5});
  // all caps equal and below c(0): no strict step remains
  CHECK_THROWS_AS(attention_schedule(AttentionCaps::validate({0.2, 0.2}), 0.5), MechanismError);
  CHECK_THROWS_AS(AttentionCaps::validate({0.5, 1.0}), ValidationError);
  CHECK_THROWS_AS(AttentionCaps::validate({1.0, -0.1}), ValidationError);
  // pointwise below the caps, equal above the last rank
  const auto out = attention_schedule(AttentionCaps::validate({2, 1.5, 1.5, 0.9}), 0.7);
  CHECK(vals(out) == std::vector<double>{2, 1.5, 1.5, 0.7});
}

TEST_CASE("taxed_wta") {
  const auto cost = CostModel::linear(0.25, 1.0);
  CHECK(taxed_wta(3, 1.0, 0.0, cost) == winner_take_all(3, 1.0));
  const auto taxed = taxed_wta(3, 1.0, 0.05, cost);
  CHECK(taxed.at(1) > 1.0);
  CHECK(taxed.at(2) == -0.05);
  CHECK(taxed.at(3) == -0.05);
  const auto p_wta = EquilibriumSolution::solve(winner_take_all(3, 1.0), cost).participation();
  const auto p_tax = EquilibriumSolution::solve(taxed, cost).participation();
  const std::vector<double> a(taxed.values().begin(), taxed.values().end());
  CHECK(std::abs(oracle::budget(a, p_tax) - oracle::budget({1, 0, 0}, p_wta)) <= 1e-8);

  // winner's prize rises with the tax and the budget holds
  double prev = 1.0;
  for (double t : {0.01, 0.02, 0.05, 0.1, 0.2}) {
    const auto r = taxed_wta(3, 1.0, t, cost);
    CHECK(r.at(1) > prev);
    prev = r.at(1);
    CHECK(std::abs(expected_budget(EquilibriumSolution::solve(r, cost)) -
                   expected_budget(EquilibriumSolution::solve(winner_take_all(3, 1.0), cost))) <= 1e-8);
  }
  CHECK_THROWS_AS(taxed_wta(3, 1.0, -0.1, cost), DomainError);
  // a prize that attracts nobody cannot be matched by a taxed schedule
  CHECK_THROWS_AS(taxed_wta(3, 0.2, 0.05, cost), Error);
}
