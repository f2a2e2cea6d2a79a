#pragma once

#include <string>
#include <vector>

#include "psafe/game.hpp"
#include "psafe/strategy.hpp"

namespace psafe {

/// Uniform bucket mappings between a full game and a coarser abstract game.
/// Card buckets are contiguous in rank order, numbered 1 = strongest; bet
/// buckets are contiguous in the ascending size list, numbered from the
/// small end. Bucket sizes differ by at most one; a single oversized bucket
/// sits at the weak end (cards) or in the middle (bets), and several tile
/// from the strong/small end. A dimension left empty means "identity" and
/// is resolved against the two trees when lifting.
struct BucketMap {
  // Cards.
  int full_cards = 0, abstract_cards = 0;
  std::vector<int> card_bucket;                // full rank -> bucket (1-based)
  std::vector<std::vector<int>> card_members;  // bucket-1 -> full ranks

  // Bets.
  std::vector<int> full_bets, abstract_bets;
  std::vector<int> bet_bucket;                 // full bet index -> bucket (1-based)
  std::vector<std::vector<int>> bet_members;   // bucket-1 -> full bet sizes

  bool has_cards() const { return abstract_cards > 0; }
  bool has_bets() const { return !abstract_bets.empty(); }

  /// Abstract bet label a full size maps to (the bucket's smallest member),
  /// and the bucket width it shares.
  int abstract_bet(int full_size) const;
  int bet_bucket_size(int full_size) const;
};

BucketMap build_card_buckets(int full_count, int abstract_count);
BucketMap build_bet_buckets(const std::vector<int>& full_bets,
                            int abstract_count);

/// The game induced by the bucket map: build_bucketed_game of the full spec
/// with the map's card and bet partitions.
GameTree build_abstract_game(const GameSpec& full, const BucketMap& map);

/// Copies the abstract distribution onto every full-game infoset that maps
/// to it; the probability of an abstract bet action splits uniformly among
/// the full bet sizes in its bucket. Check/call/fold map identically.
BehavioralStrategy lift_strategy(const GameTree& abstract_tree,
                                 const GameTree& full_tree,
                                 const BucketMap& map,
                                 const BehavioralStrategy& abstract_strategy);

/// An abstraction ladder rung: the identity, a card-count reduction, or a
/// bet-count reduction. Serialized as "none", "cards=<n>", "bets=<n>".
struct AbstractionRung {
  enum class Kind { None, Cards, Bets };
  Kind kind = Kind::None;
  int count = 0;

  std::string to_string() const;
  static AbstractionRung parse(const std::string& text);

  BucketMap bucket_map(const GameSpec& full) const;
  /// The abstract game this rung solves (the full game itself for None).
  GameTree build_tree(const GameSpec& full) const;

  friend bool operator==(const AbstractionRung&, const AbstractionRung&) = default;
};

}  // namespace psafe
