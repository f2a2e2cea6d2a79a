// psafe command line: solve a game variant, evaluate a strategy file, or
// run a repeated-game experiment from a JSON config.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "psafe/abstraction.hpp"
#include "psafe/harness.hpp"
#include "psafe/mccfr.hpp"
#include "psafe/strategy.hpp"
#include "psafe/value_oracle.hpp"

namespace {

using namespace psafe;

struct SolveArgs {
  std::string game = "cards=3;bets=1";
  std::string abstraction = "none";
  std::uint64_t iters = 1'000'000;
  double threshold = 0;  // 0 = run the full budget
  std::uint64_t seed = 1;
  std::string out;
};

int run_solve(const SolveArgs& args) {
  GameSpec full_spec = GameSpec::parse(args.game);
  AbstractionRung rung = AbstractionRung::parse(args.abstraction);

  GameTree full_tree = build_game(full_spec);
  GameTree abs_tree = rung.build_tree(full_spec);

  SolveBudget budget;
  budget.max_iterations = args.iters;
  budget.exploitability_threshold = args.threshold > 0 ? args.threshold : -1;
  Profile profile = mccfr_train_to_budget(abs_tree, budget, args.seed);

  BucketMap map = rung.bucket_map(full_spec);
  std::vector<BehavioralStrategy> lifted;
  lifted.push_back(lift_strategy(abs_tree, full_tree, map, profile.p1));
  lifted.push_back(lift_strategy(abs_tree, full_tree, map, profile.p2));

  if (args.out.empty()) {
    save_strategies(std::cout, full_tree, lifted);
  } else {
    save_strategies_file(args.out, full_tree, lifted);
  }
  std::cerr << "solved " << abs_tree.id() << " with " << profile.iterations
            << " iterations\n";
  return 0;
}

struct EvalArgs {
  std::string game = "cards=3;bets=1";
  std::string strategy;
  int player = 1;
};

int run_eval(const EvalArgs& args) {
  GameSpec spec = GameSpec::parse(args.game);
  GameTree tree = build_game(spec);
  int seat = args.player - 1;
  BehavioralStrategy s = load_strategy_file(args.strategy, tree, seat);
  ValueReport report = value_report(tree, seat, s);
  std::printf("%.12g,%.12g,%.12g\n", report.game_value, report.worst_case,
              report.exploitability);
  return 0;
}

struct RunArgs {
  std::string config;
  bool paper_scale = false;
  bool trace = false;
  // Direct-flag alternative to a config file.
  std::string game;
  std::vector<std::string> abstraction;
  std::vector<std::string> algorithm;
  std::vector<std::string> opponent;
  int switch_hand = 100;
  double mix_p = 0.2;
  int hands = 0;
  int reps = 0;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string out;
  std::string format;
  int workers = 0;
};

int run_run(const RunArgs& args) {
  ExperimentConfig cfg;
  if (!args.config.empty()) {
    cfg = ExperimentConfig::from_json_file(args.config);
  }
  if (!args.game.empty()) cfg.game = GameSpec::parse(args.game);
  if (!args.abstraction.empty()) {
    cfg.abstraction.clear();
    for (const std::string& a : args.abstraction) {
      cfg.abstraction.push_back(AbstractionRung::parse(a));
    }
  }
  if (!args.algorithm.empty()) {
    cfg.algorithm.clear();
    for (const std::string& a : args.algorithm) {
      cfg.algorithm.push_back(parse_policy_kind(a));
    }
  }
  if (!args.opponent.empty()) {
    cfg.opponent.clear();
    for (const std::string& o : args.opponent) {
      OpponentSpec spec;
      spec.cls = OpponentSpec::parse_class(o);
      spec.switch_hand = args.switch_hand;
      spec.mix_p = args.mix_p;
      spec.budget = cfg.solver;
      cfg.opponent.push_back(spec);
    }
  }
  if (args.hands > 0) cfg.hands = args.hands;
  if (args.reps > 0) cfg.repetitions = args.reps;
  if (args.seed_set) cfg.seed = args.seed;
  if (!args.out.empty()) cfg.output.path = args.out;
  if (!args.format.empty()) cfg.output.formats = {args.format};
  if (args.workers > 0) cfg.workers = args.workers;
  if (args.paper_scale) cfg.repetitions = 40'000;
  if (args.trace) cfg.trace = true;
  cfg.validate();

  ExperimentTable table = run_experiment(cfg);
  std::cout << to_csv(table);
  if (!cfg.output.path.empty()) {
    std::cerr << "report written to " << cfg.output.path << ".*\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"prime-safe opponent exploitation on generalized Kuhn poker"};
  app.require_subcommand(1);

  SolveArgs solve_args;
  CLI::App* solve = app.add_subcommand(
      "solve", "train an equilibrium approximation and write a strategy file");
  solve->add_option("--game", solve_args.game,
                    "game spec, e.g. \"cards=6;bets=1\"");
  solve->add_option("--abstraction", solve_args.abstraction,
                    "none, cards=<n> or bets=<n>");
  solve->add_option("--iters", solve_args.iters, "MCCFR iteration cap");
  solve->add_option("--threshold", solve_args.threshold,
                    "stop early at this exploitability");
  solve->add_option("--seed", solve_args.seed, "RNG seed");
  solve->add_option("--out", solve_args.out, "output path (default stdout)");

  EvalArgs eval_args;
  CLI::App* eval = app.add_subcommand(
      "eval", "print game value, worst-case value and exploitability (CSV)");
  eval->add_option("--game", eval_args.game, "game spec");
  eval->add_option("--strategy", eval_args.strategy, "strategy file")
      ->required();
  eval->add_option("--player", eval_args.player, "seat, 1 or 2")
      ->check(CLI::Range(1, 2));

  RunArgs run_args;
  CLI::App* run = app.add_subcommand("run", "run a repeated-game experiment");
  run->add_option("--config", run_args.config, "JSON experiment config");
  run->add_flag("--paper-scale", run_args.paper_scale,
                "40,000 repetitions as in the experiment tables");
  run->add_flag("--trace", run_args.trace,
                "write per-hand decision traces for the first repetition");
  run->add_option("--game", run_args.game, "game spec");
  run->add_option("--abstraction", run_args.abstraction,
                  "abstraction rung(s)");
  run->add_option("--algorithm", run_args.algorithm,
                  "Static, EEFEWP, EEFFE, PRWYWE");
  run->add_option("--opponent", run_args.opponent,
                  "random, dynamic, equilibrium, sophisticated");
  run->add_option("--switch-hand", run_args.switch_hand,
                  "dynamic opponent switch hand");
  run->add_option("--mix-p", run_args.mix_p, "sophisticated mixture weight");
  run->add_option("--hands", run_args.hands, "hands per match");
  run->add_option("--reps", run_args.reps, "repetitions per cell");
  auto* seed_opt = run->add_option("--seed", run_args.seed, "master seed");
  run->add_option("--out", run_args.out, "report basename");
  run->add_option("--format", run_args.format, "csv or markdown");
  run->add_option("--workers", run_args.workers, "worker threads");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*solve) return run_solve(solve_args);
    if (*eval) return run_eval(eval_args);
    if (*run) {
      run_args.seed_set = seed_opt->count() > 0;
      return run_run(run_args);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
