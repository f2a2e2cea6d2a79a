#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace psafe {

using Money = double;

// Seats are 0-based in code; keys and reports label them 1 and 2.
inline constexpr int kPlayer1 = 0;
inline constexpr int kPlayer2 = 1;
constexpr int opponent_of(int player) { return 1 - player; }

/// Parameters of the generalized one-street poker family: a ranked deck of
/// `card_count` distinct cards, a fixed ante of 1, and an ascending list of
/// allowed bet sizes. Facing a bet, the only options are call and fold.
struct GameSpec {
  int card_count = 3;
  std::vector<int> bet_sizes = {1};
  Money ante = 1;

  void validate() const;  // throws std::invalid_argument
  std::string to_string() const;
  static GameSpec parse(const std::string& text);

  friend bool operator==(const GameSpec&, const GameSpec&) = default;
};

struct Action {
  enum class Kind : std::uint8_t { Check, Bet, Call, Fold };
  Kind kind = Kind::Check;
  int bet_size = 0;  // Bet only

  std::string token() const;  // "k", "b<size>", "c", "f"
  friend bool operator==(const Action&, const Action&) = default;
};

enum class NodeKind : std::uint8_t { Chance, Decision, Terminal };

struct Node {
  NodeKind kind = NodeKind::Terminal;
  int player = -1;   // Decision only
  int infoset = -1;  // Decision only
  Money utility = 0; // Terminal only, player 1's payoff
  int p1_card = -1;  // deal context; -1 only at the root chance node
  int p2_card = -1;
  std::vector<int> children;  // Decision: aligned with the infoset's actions
};

struct Infoset {
  int player = -1;
  std::string key;
  int card = -1;                 // acting player's private card rank
  std::vector<Action> history;   // public actions before this decision
  std::vector<Action> actions;
  std::vector<int> nodes;
  int public_depth = 0;  // public actions taken before this decision
  int prob_offset = 0;   // slice into the owning player's flat strategy vector
  int table_offset = 0;  // slice into tables spanning both players
  int parent_seq = 0;    // sequence-form parent sequence, 0 = empty sequence
  int first_seq = 0;     // sequence id of (this infoset, action 0)
};

// One terminal in sequence-form coordinates, used by the exact oracles.
struct TerminalEntry {
  int node = -1;
  double chance_prob = 0;
  Money utility = 0;  // player 1
  int seq[2] = {0, 0};
};

class GameTree {
 public:
  const GameSpec& spec() const { return spec_; }
  /// Distinguishes bucket-induced abstractions of the same spec; stable
  /// cache key.
  const std::string& id() const { return id_; }
  int root() const { return 0; }
  const std::vector<Node>& nodes() const { return nodes_; }
  const Node& node(int id) const { return nodes_[id]; }
  const std::vector<Infoset>& infosets() const { return infosets_; }
  const Infoset& infoset(int id) const { return infosets_[id]; }
  std::span<const int> player_infosets(int player) const {
    return player_infosets_[player];
  }
  /// -1 when no infoset carries the key.
  int infoset_by_key(const std::string& key) const;

  int strategy_size(int player) const { return strategy_size_[player]; }
  int table_size() const { return strategy_size_[0] + strategy_size_[1]; }
  int num_sequences(int player) const { return num_seqs_[player]; }
  const std::vector<TerminalEntry>& terminals() const { return terminals_; }
  int num_terminals() const { return static_cast<int>(terminals_.size()); }

  Money min_utility(int player) const { return min_utility_[player]; }
  Money max_utility(int player) const { return -min_utility_[1 - player]; }

  std::string card_name(int rank) const;

 private:
  friend GameTree build_bucketed_game(const GameSpec&, const std::vector<int>&,
                                      const std::vector<std::vector<int>>&);
  friend struct GameTreeBuilder;

  GameSpec spec_;
  std::string id_;
  std::vector<Node> nodes_;
  std::vector<Infoset> infosets_;
  std::vector<int> player_infosets_[2];
  std::unordered_map<std::string, int> key_to_infoset_;
  int strategy_size_[2] = {0, 0};
  int num_seqs_[2] = {1, 1};
  std::vector<TerminalEntry> terminals_;
  Money min_utility_[2] = {0, 0};
};

/// Builds the full extensive-form tree: an ante from both players, a uniform
/// chance deal of one card each, one betting street (check or bet for the
/// first mover; call or fold facing a bet; a check can be followed by a bet),
/// showdown or fold payoffs in money units.
GameTree build_game(const GameSpec& spec);

/// The bucket-induced abstraction of the game. Chance still deals the full
/// deck and payoffs use the true cards and bet sizes, but each player
/// observes only their card's bucket, a bet is chosen by bucket (labelled by
/// the bucket's smallest size) with the size realized uniformly at random
/// among the bucket's members, and only the bucket is public.
///
/// `card_bucket` maps rank -> 1-based bucket with 1 the strongest (empty =
/// identity); `bet_buckets` partitions the ascending size list into
/// contiguous groups (empty = singletons). build_game(spec) is the identity
/// case of this construction.
GameTree build_bucketed_game(const GameSpec& spec,
                             const std::vector<int>& card_bucket,
                             const std::vector<std::vector<int>>& bet_buckets);

/// Display label for card bucket `bucket` out of `count` (1 = strongest):
/// A, K, Q, ... for counts up to 13, numeric beyond. The identity bucketing
/// reproduces the deck's card names.
std::string card_bucket_label(int bucket, int count);

/// Player 1's payoff at a terminal node. Throws on non-terminal nodes.
Money terminal_utility(const GameTree& tree, int node);

/// Canonical infoset key "<seat>|<card>|<actions>" for the decision node.
/// Throws unless `player` acts at `node`.
std::string infoset_key(const GameTree& tree, int node, int player);

struct HandStep {
  int node = -1;
  int player = -1;
  int infoset = -1;
  int action = -1;  // index into the infoset's action list
};

/// A completed play-through with full observation: both private cards are
/// revealed at the end of the hand, including after folds.
struct HandRecord {
  int p1_card = -1;
  int p2_card = -1;
  std::vector<HandStep> steps;
  int terminal = -1;
  Money utility = 0;  // player 1

  int revealed_card(int observer) const {
    return observer == kPlayer1 ? p2_card : p1_card;
  }
};

/// Throws std::invalid_argument unless the record replays root-to-terminal
/// through the tree with consistent infosets and payoff.
void validate_hand(const GameTree& tree, const HandRecord& hand);

}  // namespace psafe
