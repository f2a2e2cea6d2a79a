#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "psafe/game.hpp"
#include "psafe/rng.hpp"

namespace psafe {

/// One player's behavioral strategy: a probability vector over the ordered
/// action list of each of that player's infosets. Stored flat in the tree's
/// infoset order; lines of the text format are keyed by infoset key.
class BehavioralStrategy {
 public:
  BehavioralStrategy() = default;
  BehavioralStrategy(const GameTree& tree, int player)
      : tree_(&tree), player_(player),
        probs_(tree.strategy_size(player), 0.0) {}

  int player() const { return player_; }
  const GameTree* tree() const { return tree_; }
  bool empty() const { return tree_ == nullptr; }

  std::span<double> at(int infoset);
  std::span<const double> at(int infoset) const;
  /// Lookup by canonical key; throws on unknown or foreign keys.
  std::span<const double> at_key(const std::string& key) const;

  std::span<const double> raw() const { return probs_; }
  std::span<double> raw() { return probs_; }

  /// Throws std::invalid_argument unless every vector is nonnegative and
  /// sums to 1 within 1e-12.
  void validate() const;

  /// Rebinds to a structurally identical tree (same spec). Used when a
  /// cached strategy outlives the tree instance it was built against.
  void rebind(const GameTree& tree);

 private:
  const GameTree* tree_ = nullptr;
  int player_ = -1;
  std::vector<double> probs_;
};

/// Every action at every infoset with probability 1/|A(I)|.
BehavioralStrategy uniform_strategy(const GameTree& tree, int player);

/// Exact expected payoff to player 1 under (s1, s2), by full tree traversal.
Money expected_utility(const GameTree& tree, const BehavioralStrategy& s1,
                       const BehavioralStrategy& s2);

/// Plays one hand: samples the deal and both players' actions. The record
/// includes both private cards (full observation, also after folds).
HandRecord sample_hand(const GameTree& tree, const BehavioralStrategy& s1,
                       const BehavioralStrategy& s2, Rng& rng);

/// Sequence-form weights: weights[seq] is the product of the player's own
/// behavioral probabilities along the sequence; weights[0] = 1.
struct RealizationPlan {
  int player = -1;
  std::vector<double> weights;
};

RealizationPlan to_realization_plan(const GameTree& tree,
                                    const BehavioralStrategy& s);

/// Inverse of to_realization_plan where parent weights are positive; infosets
/// with (numerically) zero reach fall back to the uniform distribution.
BehavioralStrategy to_behavioral(const GameTree& tree,
                                 const RealizationPlan& plan);

/// Text format: one line per infoset, "<key> <action>:<prob> ...", lines
/// sorted lexicographically by key, probabilities with 12 significant
/// digits. A file may carry both seats; the seat is part of the key.
void save_strategies(std::ostream& out, const GameTree& tree,
                     std::span<const BehavioralStrategy> strategies);
void save_strategies_file(const std::string& path, const GameTree& tree,
                          std::span<const BehavioralStrategy> strategies);

/// Loads one seat's strategy. Vectors within 1e-9 of total mass 1 are
/// renormalized; anything worse (or negative, unknown keys, missing
/// infosets) is rejected with std::invalid_argument / std::runtime_error.
BehavioralStrategy load_strategy(std::istream& in, const GameTree& tree,
                                 int player);
BehavioralStrategy load_strategy_file(const std::string& path,
                                      const GameTree& tree, int player);

}  // namespace psafe
