#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "contest/errors.hpp"

namespace contest {

class CostModel;

// Ranks are 1-based throughout the public API: rank 1 is the winner.
using Rank = std::size_t;

// Which clause of the monotone-mechanism definition a reward list violates.
enum class MechanismClause { size, monotonicity, strict_step, finite };

std::string_view to_string(MechanismClause clause);

class MechanismError : public ValidationError {
 public:
  MechanismError(MechanismClause clause, std::size_t index, const std::string& what)
      : ValidationError(what), clause_(clause), index_(index) {}
  MechanismClause clause() const noexcept { return clause_; }
  // 1-based rank where the violation was detected (0 when not positional).
  std::size_t index() const noexcept { return index_; }

 private:
  MechanismClause clause_;
  std::size_t index_;
};

// Prize schedule a_1 >= a_2 >= ... >= a_n of a monotone rank-order contest,
// with at least one strict step. Entries may be negative (entry taxes).
class RewardVector {
 public:
  // Throws MechanismError naming the violated clause.
  static RewardVector validate(std::vector<double> rewards);

  std::size_t size() const noexcept { return rewards_.size(); }
  std::span<const double> values() const noexcept { return rewards_; }
  // 1-based.
  double at(Rank rank) const;
  double first() const noexcept { return rewards_.front(); }
  double last() const noexcept { return rewards_.back(); }
  // a_n >= 0: the monotone nonnegative class.
  bool nonnegative() const noexcept { return rewards_.back() >= 0.0; }
  double total() const noexcept;

  // Copy of the raw list with rank `rank` replaced; not validated.
  std::vector<double> with(Rank rank, double value) const;

  friend bool operator==(const RewardVector&, const RewardVector&) = default;

 private:
  explicit RewardVector(std::vector<double> rewards) : rewards_(std::move(rewards)) {}
  std::vector<double> rewards_;
};

// Per-rank attention limits A_1 >= ... >= A_n >= 0.
class AttentionCaps {
 public:
  static AttentionCaps validate(std::vector<double> caps);
  std::size_t size() const noexcept { return caps_.size(); }
  std::span<const double> values() const noexcept { return caps_; }
  double at(Rank rank) const { return caps_.at(rank - 1); }

 private:
  explicit AttentionCaps(std::vector<double> caps) : caps_(std::move(caps)) {}
  std::vector<double> caps_;
};

// (prize, 0, ..., 0).
RewardVector winner_take_all(std::size_t n, double prize);

// a_i = A_i for i < n and a_n = min(A_n, entry_cost).
RewardVector attention_schedule(const AttentionCaps& caps, double entry_cost);

// (a_1*, -tax, ..., -tax) with a_1* chosen so the expected payout equals that
// of winner_take_all(n, prize). tax == 0 returns winner_take_all exactly.
// Throws ValidationError when nobody would enter and ConvergenceError when the
// budget match fails.
RewardVector taxed_wta(std::size_t n, double prize, double tax, const CostModel& cost);

}  // namespace contest
