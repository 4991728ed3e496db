#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "contest/cost_model.hpp"
#include "contest/equilibrium.hpp"
#include "contest/mechanism.hpp"
#include "contest/metrics.hpp"

namespace contest::cli {

// Bad command line or config layout (exit code 1).
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Constructor { none, rewards, wta, attention };

// Instance fields as given on the command line or in a config file; every
// member is optional so flags can be layered over a file.
struct InstanceInput {
  std::optional<std::size_t> n;
  std::optional<std::vector<double>> rewards;
  std::optional<double> wta;
  std::optional<std::vector<double>> caps;
  std::optional<double> tax;
  std::optional<std::string> cost;
  std::optional<double> arg_tolerance;
  std::optional<double> residual_tolerance;
  std::optional<std::size_t> grid_nodes;
  std::optional<std::size_t> panels;
  std::optional<double> quad_tolerance;
  std::optional<std::size_t> max_panels;
  std::optional<std::string> path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trials;
};

// Reads a JSON config document. Unknown keys raise UsageError; wrong types
// raise ValidationError naming the field; malformed JSON reports line and
// column.
InstanceInput parse_config_text(const std::string& text, const std::string& origin = "config");
InstanceInput load_config(const std::string& path);

// Fields set in `flags` replace those in `file`. A constructor given by the
// flags replaces the file's constructor as a whole.
InstanceInput merge(const InstanceInput& file, const InstanceInput& flags);

struct InstanceSpec {
  Constructor constructor = Constructor::rewards;
  std::size_t n = 0;
  std::vector<double> rewards_input;  // as given (rewards constructor)
  double prize = 0.0;                 // wta
  double tax = 0.0;                   // wta with entry tax
  std::vector<double> caps;           // attention
  CostModel cost = CostModel::linear(0.0, 1.0);
  SolverSettings solver;
  MetricsSettings metrics;
  std::uint64_t seed = 1;
  std::size_t trials = 100000;

  bool has_schedule() const noexcept { return constructor != Constructor::none; }
  // Resolves the constructor into a validated schedule.
  RewardVector build_rewards() const;
  // Config document (every default spelled out) that resolves back to this
  // instance.
  nlohmann::json echo() const;
};

// Checks constructor conflicts and sizes, parses the cost, fills defaults.
// Without `need_schedule` a bare --n is accepted (commands that build their
// own schedules).
InstanceSpec resolve(const InstanceInput& input, bool need_schedule = true);

std::vector<double> parse_list(const std::string& text, const std::string& flag);

}  // namespace contest::cli
