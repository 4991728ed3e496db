#include "contest/mechanism.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace contest {

std::string_view to_string(MechanismClause clause) {
  switch (clause) {
    case MechanismClause::size: return "size";
    case MechanismClause::monotonicity: return "monotonicity";
    case MechanismClause::strict_step: return "no strict inequality";
    case MechanismClause::finite: return "finite";
  }
  return "?";
}

RewardVector RewardVector::validate(std::vector<double> rewards) {
  if (rewards.size() < 2) {
    throw MechanismError(MechanismClause::size, 0,
                         "rewards: need at least 2 ranks, got " + std::to_string(rewards.size()));
  }
  bool strict = false;
  for (std::size_t i = 0; i < rewards.size(); ++i) {
    if (!std::isfinite(rewards[i])) {
      throw MechanismError(MechanismClause::finite, i + 1,
                           "rewards: a_" + std::to_string(i + 1) + " is not finite");
    }
    if (i == 0) continue;
    if (rewards[i] > rewards[i - 1]) {
      throw MechanismError(MechanismClause::monotonicity, i + 1,
                           "rewards: monotonicity violated, a_" + std::to_string(i) + " < a_" +
                               std::to_string(i + 1));
    }
    if (rewards[i] < rewards[i - 1]) strict = true;
  }
  if (!strict) {
    throw MechanismError(MechanismClause::strict_step, 0,
                         "rewards: no strict inequality, all rewards are equal");
  }
  return RewardVector(std::move(rewards));
}

double RewardVector::at(Rank rank) const {
  if (rank < 1 || rank > rewards_.size()) {
    throw DomainError("rewards: rank " + std::to_string(rank) + " out of range");
  }
  return rewards_[rank - 1];
}

double RewardVector::total() const noexcept {
  return std::accumulate(rewards_.begin(), rewards_.end(), 0.0);
}

std::vector<double> RewardVector::with(Rank rank, double value) const {
  std::vector<double> copy = rewards_;
  copy.at(rank - 1) = value;
  return copy;
}

AttentionCaps AttentionCaps::validate(std::vector<double> caps) {
  if (caps.size() < 2) throw ValidationError("caps: need at least 2 ranks");
  for (std::size_t i = 0; i < caps.size(); ++i) {
    if (!(caps[i] >= 0.0) || !std::isfinite(caps[i])) {
      throw ValidationError("caps: A_" + std::to_string(i + 1) + " must be finite and >= 0");
    }
    if (i > 0 && caps[i] > caps[i - 1]) {
      throw ValidationError("caps: must be nonincreasing, A_" + std::to_string(i) + " < A_" +
                            std::to_string(i + 1));
    }
  }
  return AttentionCaps(std::move(caps));
}

RewardVector winner_take_all(std::size_t n, double prize) {
  if (n < 2) throw MechanismError(MechanismClause::size, 0, "winner-take-all: n must be >= 2");
  if (!(prize > 0.0)) {
    throw MechanismError(MechanismClause::strict_step, 1, "winner-take-all: prize must be > 0");
  }
  std::vector<double> a(n, 0.0);
  a.front() = prize;
  return RewardVector::validate(std::move(a));
}

RewardVector attention_schedule(const AttentionCaps& caps, double entry_cost) {
  if (!(entry_cost >= 0.0)) throw DomainError("attention schedule: entry cost must be >= 0");
  std::vector<double> a(caps.values().begin(), caps.values().end());
  a.back() = std::min(a.back(), entry_cost);
  return RewardVector::validate(std::move(a));
}

}  // namespace contest
