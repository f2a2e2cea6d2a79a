#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "psafe/game.hpp"
#include "psafe/rng.hpp"
#include "psafe/strategy.hpp"

namespace psafe {

/// Cumulative regrets and strategy sums for every infoset of both players.
struct RegretTable {
  explicit RegretTable(const GameTree& tree)
      : regret(tree.table_size(), 0.0), strategy_sum(tree.table_size(), 0.0) {}

  std::vector<double> regret;
  std::vector<double> strategy_sum;
  std::uint64_t iterations = 0;
};

/// Proportional to the positive parts of the regrets; uniform when no
/// entry is positive.
std::vector<double> regret_matching(std::span<const double> regrets);
void regret_matching_into(std::span<const double> regrets,
                          std::span<double> out);

struct Profile {
  BehavioralStrategy p1, p2;
  std::uint64_t iterations = 0;

  const BehavioralStrategy& strategy(int player) const {
    return player == kPlayer1 ? p1 : p2;
  }
};

/// External-sampling MCCFR. One iteration is one traversal; the traverser
/// alternates between the players. Runs are deterministic in (seed,
/// iteration count).
class MccfrTrainer {
 public:
  MccfrTrainer(const GameTree& tree, std::uint64_t seed);

  void run(std::uint64_t iterations);
  /// Strategy sums normalized per infoset; never-visited infosets fall back
  /// to uniform.
  Profile average_profile() const;
  const RegretTable& table() const { return table_; }
  std::uint64_t iterations() const { return table_.iterations; }

 private:
  double traverse(int node_id, int traverser, int depth);

  const GameTree* tree_;
  RegretTable table_;
  Rng rng_;
  std::vector<std::vector<double>> scratch_sigma_;
  std::vector<std::vector<double>> scratch_value_;
};

Profile mccfr_train(const GameTree& tree, std::uint64_t iterations,
                    std::uint64_t seed);

struct SolveBudget {
  std::uint64_t max_iterations = 10'000'000;
  double exploitability_threshold = 1e-3;

  friend bool operator==(const SolveBudget&, const SolveBudget&) = default;
};

/// Trains until max(expl(p1), expl(p2)) drops below the threshold, checking
/// on a fixed doubling schedule, or until the iteration cap. Deterministic
/// in (budget, seed).
Profile mccfr_train_to_budget(const GameTree& tree, const SolveBudget& budget,
                              std::uint64_t seed);

/// Memoizes trained profiles by (game, budget, seed). Fill sequentially,
/// then share read-only.
class SolveCache {
 public:
  const Profile& train(const GameTree& tree, const SolveBudget& budget,
                       std::uint64_t seed);

 private:
  std::map<std::string, Profile> entries_;
};

}  // namespace psafe
