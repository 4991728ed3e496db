#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cli/instance.hpp"

namespace contest::cli {

inline constexpr const char* kToolVersion = "1.0.0";

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNumeric = 3;
inline constexpr int kExitVerification = 4;

struct CommandOptions {
  std::string command;
  unsigned threads = 0;           // 0 = hardware concurrency
  bool timing = true;             // include wall time in the record
  std::optional<std::string> csv;

  // solve
  std::size_t grid_points = 101;
  // deviate
  std::vector<double> q_grid;     // explicit grid; otherwise grid_points on the support
  double margin = 0.2;            // extra point at qbar + margin
  // perturb
  std::vector<std::size_t> ranks; // budget-matched ranks; empty = 2..n
  double delta = 0.0;             // 0 = relative_step * a_1
  double relative_step = 1e-4;
  // tax-sweep
  std::vector<double> taxes{0.0, 0.01, 0.02};
  // avg-sign-sweep
  std::vector<double> budgets;
  std::size_t rank = 2;
  // wta-trial
  std::optional<double> budget;
  std::size_t draws = 200;
  // design-attention
  std::size_t max_candidates = 4000;
  // verify
  std::string suite = "all";
};

struct Outcome {
  nlohmann::json record;
  int exit_code = kExitOk;
};

// Commands that run without a reward schedule.
bool needs_schedule(const std::string& command);
bool needs_instance(const std::string& command);

// Runs one command. Library errors propagate; `exit_code` is only set for
// verification failures.
Outcome run_command(const CommandOptions& options, const std::optional<InstanceSpec>& instance);

// Maps an in-flight exception to the documented exit code.
int exit_code_for(const std::exception& error);

}  // namespace contest::cli
