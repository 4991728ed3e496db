#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "cli/commands.hpp"
#include "cli/instance.hpp"
#include "contest/errors.hpp"

namespace {

using contest::cli::parse_list;

unsigned default_threads() {
  if (const char* env = std::getenv("CONTEST_THREADS")) {
    try {
      return static_cast<unsigned>(std::stoul(env));
    } catch (const std::exception&) {
      std::cerr << "warning: ignoring CONTEST_THREADS='" << env << "'\n";
    }
  }
  return 0;
}

template <class T>
void set_if(std::optional<T>& into, CLI::Option* opt, const T& value) {
  if (opt->count() > 0) into = value;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Symmetric equilibria, metrics and design experiments for rank-order contests with endogenous entry"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", contest::cli::kToolVersion);

  // instance
  std::string config, rewards, caps, cost, path;
  std::size_t n = 0, grid_nodes = 0, panels = 0, max_panels = 0, trials = 0;
  double wta = 0, tax = 0, arg_tol = 0, residual_tol = 0, quad_tol = 0;
  std::uint64_t seed = 0;
  auto* o_config = app.add_option("--config", config, "JSON instance file (flags override its values)");
  auto* o_n = app.add_option("--n", n, "number of agents");
  auto* o_rewards = app.add_option("--rewards", rewards, "reward list a_1,...,a_n");
  auto* o_wta = app.add_option("--wta", wta, "winner-take-all prize (needs --n)");
  auto* o_caps = app.add_option("--caps", caps, "attention caps A_1,...,A_n");
  auto* o_tax = app.add_option("--tax", tax, "entry tax on ranks 2..n (needs --wta)");
  auto* o_cost = app.add_option("--cost", cost, "linear:c0=<r>,slope=<r> | exp:k=<r> | quad:c0=<r>,a=<r>,b=<r>");
  auto* o_seed = app.add_option("--seed", seed, "random seed (default 1)");
  auto* o_trials = app.add_option("--trials", trials, "Monte Carlo trials (default 100000)");
  auto* o_arg = app.add_option("--arg-tol", arg_tol, "root-finding argument tolerance (default 1e-15)");
  auto* o_res = app.add_option("--residual-tol", residual_tol, "participation residual tolerance (default 1e-10)");
  auto* o_nodes = app.add_option("--grid-nodes", grid_nodes, "bracketing grid size (default 512)");
  auto* o_panels = app.add_option("--panels", panels, "initial quadrature panels (default 64)");
  auto* o_qtol = app.add_option("--quad-tol", quad_tol, "quadrature tolerance, <= 0 for a fixed rule (default 1e-9)");
  auto* o_maxp = app.add_option("--max-panels", max_panels, "quadrature panel budget (default 16384)");
  auto* o_path = app.add_option("--path", path, "quality integrals: direct | substitution (default direct)");

  contest::cli::CommandOptions options;
  options.threads = default_threads();
  std::string csv;
  bool no_timing = false;
  app.add_option("--threads", options.threads, "worker cap, 0 = all cores (default $CONTEST_THREADS or 0)");
  auto* o_csv = app.add_option("--csv", csv, "also write the command's table to this CSV file");
  app.add_flag("--no-timing", no_timing, "write null wall time so identical runs give identical bytes");

  auto* solve = app.add_subcommand("solve", "equilibrium (p, qbar, regime); CSV grid q,G,x,payoff_residual");
  solve->add_option("--grid-points", options.grid_points, "grid size for the residual scan and CSV");
  app.add_subcommand("metrics", "expected budget, quality measures and rank probabilities");
  app.add_subcommand("simulate", "Monte Carlo play of the equilibrium against the analytic metrics");
  auto* deviate = app.add_subcommand("deviate", "payoff of a unilateral deviation to each grid quality");
  std::string q_grid;
  auto* o_qgrid = deviate->add_option("--q-grid", q_grid, "explicit quality list");
  deviate->add_option("--grid-points", options.grid_points, "evenly spaced points on [0, qbar]");
  deviate->add_option("--margin", options.margin, "extra point at qbar + margin (0 to omit)");
  auto* attention = app.add_subcommand("design-attention", "capped attention schedule and lattice certificate");
  attention->add_option("--max-candidates", options.max_candidates, "lattice cap");
  auto* perturb = app.add_subcommand("perturb", "budget-matched derivatives and reward sensitivities");
  std::string ranks;
  auto* o_ranks = perturb->add_option("--ranks", ranks, "ranks s >= 2 to perturb (default all)");
  perturb->add_option("--delta", options.delta, "absolute step (default step * a_1)");
  perturb->add_option("--step", options.relative_step, "relative step (default 1e-4)");
  auto* taxsweep = app.add_subcommand("tax-sweep", "budget-matched entry taxes on a winner-take-all contest");
  std::string taxes;
  auto* o_taxes = taxsweep->add_option("--taxes", taxes, "tax levels (default 0,0.01,0.02)");
  auto* avgsign = app.add_subcommand("avg-sign-sweep", "sign of dEq_avg/da_s against the budget (exp cost)");
  std::string budgets;
  auto* o_budgets = avgsign->add_option("--budgets", budgets, "budget list (default 25 log-spaced in [0.05, 20])");
  avgsign->add_option("--s", options.rank, "perturbed rank (default 2)");
  auto* wtatrial = app.add_subcommand("wta-trial", "winner-take-all against random budget-matched schedules");
  double budget = 0;
  auto* o_budget = wtatrial->add_option("--budget", budget, "expected budget (default: that of --wta)");
  wtatrial->add_option("--draws", options.draws, "random schedules (default 200)");
  auto* verify = app.add_subcommand("verify", "identity and closed-form regression suites");
  verify->add_option("--suite", options.suite, "identities | golden | all")
      ->check(CLI::IsMember({"identities", "golden", "all"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : contest::cli::kExitUsage;
  }

  try {
    options.command = app.get_subcommands().front()->get_name();
    options.timing = !no_timing;
    if (o_csv->count()) options.csv = csv;
    if (o_qgrid->count()) options.q_grid = parse_list(q_grid, "--q-grid");
    if (o_ranks->count()) {
      for (double r : parse_list(ranks, "--ranks")) {
        if (!(r >= 1.0) || r != static_cast<double>(static_cast<std::size_t>(r))) {
          throw contest::DomainError("--ranks: ranks are positive integers");
        }
        options.ranks.push_back(static_cast<std::size_t>(r));
      }
    }
    if (o_taxes->count()) options.taxes = parse_list(taxes, "--taxes");
    if (o_budgets->count()) options.budgets = parse_list(budgets, "--budgets");
    if (o_budget->count()) options.budget = budget;

    std::optional<contest::cli::InstanceSpec> instance;
    if (contest::cli::needs_instance(options.command)) {
      contest::cli::InstanceInput flags;
      set_if(flags.n, o_n, n);
      if (o_rewards->count()) flags.rewards = parse_list(rewards, "--rewards");
      set_if(flags.wta, o_wta, wta);
      if (o_caps->count()) flags.caps = parse_list(caps, "--caps");
      set_if(flags.tax, o_tax, tax);
      set_if(flags.cost, o_cost, cost);
      set_if(flags.seed, o_seed, seed);
      set_if(flags.trials, o_trials, trials);
      set_if(flags.arg_tolerance, o_arg, arg_tol);
      set_if(flags.residual_tolerance, o_res, residual_tol);
      set_if(flags.grid_nodes, o_nodes, grid_nodes);
      set_if(flags.panels, o_panels, panels);
      set_if(flags.quad_tolerance, o_qtol, quad_tol);
      set_if(flags.max_panels, o_maxp, max_panels);
      set_if(flags.path, o_path, path);
      // conflicts are judged per source before flags replace the file
      if ((flags.rewards.has_value() + flags.wta.has_value() + flags.caps.has_value()) > 1) {
        throw contest::cli::UsageError("conflicting reward constructors: give only one of --rewards, --wta, --caps");
      }
      const auto file = o_config->count() ? contest::cli::load_config(config) : contest::cli::InstanceInput{};
      instance = contest::cli::resolve(contest::cli::merge(file, flags),
                                       contest::cli::needs_schedule(options.command));
    }
    const auto outcome = contest::cli::run_command(options, instance);
    std::cout << outcome.record.dump(2) << '\n';
    return outcome.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return contest::cli::exit_code_for(e);
  }
}
