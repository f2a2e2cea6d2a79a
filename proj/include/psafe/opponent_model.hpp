#pragma once

#include <span>
#include <vector>

#include "psafe/game.hpp"
#include "psafe/strategy.hpp"

namespace psafe {

/// Dirichlet-style opponent model: pseudo-counts per opponent infoset and
/// action, initialized from a prior strategy scaled by a prior weight in
/// hands, updated by +1 per fully observed opponent action. The posterior
/// mean is the counts normalized per infoset.
class OpponentModel {
 public:
  OpponentModel(const GameTree& tree, const BehavioralStrategy& prior,
                double prior_hands = 5.0);

  int player() const { return player_; }
  double prior_hands() const { return prior_hands_; }

  /// Adds one observation per opponent decision on the realized path. The
  /// infoset is the one identified by the revealed private card and the
  /// public prefix; no other infoset changes.
  void observe_hand(const HandRecord& hand);

  BehavioralStrategy posterior_strategy() const;
  /// Allocation-free variant for per-hand loops.
  void posterior_into(BehavioralStrategy& out) const;

  std::span<const double> counts(int infoset) const;

 private:
  const GameTree* tree_;
  int player_;
  double prior_hands_;
  std::vector<double> counts_;  // player-flat layout
};

}  // namespace psafe
