#include "psafe/game.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace psafe {

namespace {

constexpr const char* kRankNames[] = {"A", "K", "Q", "J", "T", "9", "8",
                                      "7", "6", "5", "4", "3", "2"};

std::string join_tokens(const std::vector<Action>& history) {
  std::string out;
  for (size_t i = 0; i < history.size(); ++i) {
    if (i > 0) out += ',';
    out += history[i].token();
  }
  return out;
}

}  // namespace

void GameSpec::validate() const {
  if (card_count < 2) {
    throw std::invalid_argument("GameSpec: card_count must be at least 2");
  }
  if (bet_sizes.empty()) {
    throw std::invalid_argument("GameSpec: bet_sizes must be nonempty");
  }
  for (size_t i = 0; i < bet_sizes.size(); ++i) {
    if (bet_sizes[i] <= 0) {
      throw std::invalid_argument("GameSpec: bet sizes must be positive");
    }
    if (i > 0 && bet_sizes[i] <= bet_sizes[i - 1]) {
      throw std::invalid_argument("GameSpec: bet sizes must be strictly ascending");
    }
  }
  if (ante != 1) {
    throw std::invalid_argument("GameSpec: ante is fixed at 1");
  }
}

std::string GameSpec::to_string() const {
  std::ostringstream out;
  out << "cards=" << card_count << ";bets=";
  for (size_t i = 0; i < bet_sizes.size(); ++i) {
    if (i > 0) out << ',';
    out << bet_sizes[i];
  }
  return out.str();
}

GameSpec GameSpec::parse(const std::string& text) {
  GameSpec spec;
  bool saw_bets = false;
  // ':' separates fields too; ';' needs quoting in most shells.
  std::string normalized = text;
  std::replace(normalized.begin(), normalized.end(), ':', ';');
  std::stringstream ss(normalized);
  std::string part;
  while (std::getline(ss, part, ';')) {
    if (part.empty()) continue;
    auto eq = part.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("GameSpec: expected key=value in '" + part + "'");
    }
    std::string key = part.substr(0, eq);
    std::string value = part.substr(eq + 1);
    if (key == "cards") {
      spec.card_count = std::stoi(value);
    } else if (key == "bets") {
      spec.bet_sizes.clear();
      saw_bets = true;
      std::stringstream bs(value);
      std::string bet;
      while (std::getline(bs, bet, ',')) {
        if (!bet.empty()) spec.bet_sizes.push_back(std::stoi(bet));
      }
    } else {
      throw std::invalid_argument("GameSpec: unknown key '" + key + "'");
    }
  }
  if (!saw_bets) spec.bet_sizes = {1};
  spec.validate();
  return spec;
}

std::string Action::token() const {
  switch (kind) {
    case Kind::Check: return "k";
    case Kind::Bet: return "b" + std::to_string(bet_size);
    case Kind::Call: return "c";
    case Kind::Fold: return "f";
  }
  return "?";
}

std::string card_bucket_label(int bucket, int count) {
  if (bucket < 1 || bucket > count) {
    throw std::out_of_range("card bucket out of range");
  }
  if (count <= 13) return kRankNames[bucket - 1];
  return std::to_string(count - bucket);
}

std::string GameTree::card_name(int rank) const {
  int n = spec_.card_count;
  if (rank < 0 || rank >= n) throw std::out_of_range("card rank out of range");
  return card_bucket_label(n - rank, n);
}

int GameTree::infoset_by_key(const std::string& key) const {
  auto it = key_to_infoset_.find(key);
  return it == key_to_infoset_.end() ? -1 : it->second;
}

// Incremental construction state shared by the recursive builder. Public
// history tokens carry bet buckets (labelled by the bucket's first size);
// the live bet's true size is threaded separately for payoffs.
struct GameTreeBuilder {
  GameTree tree;
  std::vector<int> card_bucket;                // rank -> 1-based, 1 strongest
  std::vector<std::vector<int>> bet_buckets;   // contiguous ascending groups
  int bucket_count = 0;

  std::string bucket_label(int bucket) const {
    return card_bucket_label(bucket, bucket_count);
  }

  int new_node(NodeKind kind, int p1_card, int p2_card) {
    tree.nodes_.push_back(Node{});
    Node& node = tree.nodes_.back();
    node.kind = kind;
    node.p1_card = p1_card;
    node.p2_card = p2_card;
    return static_cast<int>(tree.nodes_.size()) - 1;
  }

  int infoset_for(int player, int card, const std::vector<Action>& history,
                  const std::vector<Action>& actions) {
    std::string key = std::to_string(player + 1) + "|" +
                      bucket_label(card_bucket[card]) + "|" +
                      join_tokens(history);
    auto it = tree.key_to_infoset_.find(key);
    if (it != tree.key_to_infoset_.end()) {
      const Infoset& is = tree.infosets_[it->second];
      if (is.player != player || is.actions != actions) {
        throw std::logic_error("infoset action mismatch for key " + key);
      }
      return it->second;
    }
    Infoset is;
    is.player = player;
    is.key = key;
    is.card = card;  // first card seen; bucket-mates share the infoset
    is.history = history;
    is.actions = actions;
    is.public_depth = static_cast<int>(history.size());
    is.parent_seq = -1;  // filled by the sequence pass
    int id = static_cast<int>(tree.infosets_.size());
    tree.infosets_.push_back(std::move(is));
    tree.key_to_infoset_.emplace(key, id);
    tree.player_infosets_[player].push_back(id);
    return id;
  }

  // Builds the subtree under the given public history for one deal and
  // returns its node id. `live_bet` is the true size of the unresolved bet.
  int grow(int p1_card, int p2_card, std::vector<Action>& history,
           int live_bet) {
    const Money ante = tree.spec_.ante;

    // Terminal situations first.
    if (!history.empty()) {
      const Action& last = history.back();
      if (last.kind == Action::Kind::Fold) {
        // The player to act folded; the previous actor wins the antes.
        int folder = acting_player(history.size() - 1);
        int id = new_node(NodeKind::Terminal, p1_card, p2_card);
        tree.nodes_[id].utility = folder == kPlayer1 ? -ante : ante;
        return id;
      }
      if (last.kind == Action::Kind::Call) {
        int id = new_node(NodeKind::Terminal, p1_card, p2_card);
        Money pot = ante + live_bet;
        tree.nodes_[id].utility = p1_card > p2_card ? pot : -pot;
        return id;
      }
      if (history.size() == 2 && last.kind == Action::Kind::Check) {
        int id = new_node(NodeKind::Terminal, p1_card, p2_card);
        tree.nodes_[id].utility = p1_card > p2_card ? ante : -ante;
        return id;
      }
    }

    // Decision node.
    int player = acting_player(history.size());
    int card = player == kPlayer1 ? p1_card : p2_card;
    bool facing_bet = !history.empty() && history.back().kind == Action::Kind::Bet;
    std::vector<Action> actions;
    if (facing_bet) {
      actions.push_back({Action::Kind::Call, 0});
      actions.push_back({Action::Kind::Fold, 0});
    } else {
      actions.push_back({Action::Kind::Check, 0});
      for (const std::vector<int>& bucket : bet_buckets) {
        actions.push_back({Action::Kind::Bet, bucket.front()});
      }
    }

    int id = new_node(NodeKind::Decision, p1_card, p2_card);
    tree.nodes_[id].player = player;
    int is_id = infoset_for(player, card, history, actions);
    tree.nodes_[id].infoset = is_id;
    tree.infosets_[is_id].nodes.push_back(id);

    std::vector<int> children;
    children.reserve(actions.size());
    for (size_t a = 0; a < actions.size(); ++a) {
      history.push_back(actions[a]);
      int child;
      if (actions[a].kind == Action::Kind::Bet) {
        const std::vector<int>& bucket = bet_buckets[a - 1];
        if (bucket.size() == 1) {
          child = grow(p1_card, p2_card, history, bucket.front());
        } else {
          // The bucket's size realizes uniformly; only the bucket is public.
          // Created before its children: node ids stay topological.
          child = new_node(NodeKind::Chance, p1_card, p2_card);
          std::vector<int> realized;
          realized.reserve(bucket.size());
          for (int size : bucket) {
            realized.push_back(grow(p1_card, p2_card, history, size));
          }
          tree.nodes_[child].children = std::move(realized);
        }
      } else {
        child = grow(p1_card, p2_card, history,
                     actions[a].kind == Action::Kind::Call ? live_bet : 0);
      }
      history.pop_back();
      children.push_back(child);
    }
    tree.nodes_[id].children = std::move(children);
    return id;
  }

  // Who acts after `depth` public actions: P1, then P2; after a check the
  // bettor's opponent replies, giving the k,b,{c,f} line back to P1.
  static int acting_player(size_t depth) {
    return depth % 2 == 0 ? kPlayer1 : kPlayer2;
  }

  // Assigns sequence ids and collects terminal entries in one pass.
  void index_sequences(int node_id, int seq1, int seq2, double chance_prob) {
    Node& node = tree.nodes_[node_id];
    switch (node.kind) {
      case NodeKind::Chance: {
        double p = 1.0 / static_cast<double>(node.children.size());
        for (int child : node.children) index_sequences(child, seq1, seq2, chance_prob * p);
        return;
      }
      case NodeKind::Terminal: {
        TerminalEntry entry;
        entry.node = node_id;
        entry.chance_prob = chance_prob;
        entry.utility = node.utility;
        entry.seq[0] = seq1;
        entry.seq[1] = seq2;
        tree.terminals_.push_back(entry);
        return;
      }
      case NodeKind::Decision: {
        Infoset& is = tree.infosets_[node.infoset];
        int own = node.player == kPlayer1 ? seq1 : seq2;
        if (is.parent_seq == -1) {
          is.parent_seq = own;
          is.first_seq = tree.num_seqs_[node.player];
          tree.num_seqs_[node.player] += static_cast<int>(is.actions.size());
        } else if (is.parent_seq != own) {
          throw std::logic_error("perfect recall violated at " + is.key);
        }
        for (size_t a = 0; a < node.children.size(); ++a) {
          int next = is.first_seq + static_cast<int>(a);
          if (node.player == kPlayer1) {
            index_sequences(node.children[a], next, seq2, chance_prob);
          } else {
            index_sequences(node.children[a], seq1, next, chance_prob);
          }
        }
        return;
      }
    }
  }
};

GameTree build_bucketed_game(const GameSpec& spec,
                             const std::vector<int>& card_bucket,
                             const std::vector<std::vector<int>>& bet_buckets) {
  spec.validate();
  GameTreeBuilder builder;
  builder.tree.spec_ = spec;

  if (card_bucket.empty()) {
    // Identity: one bucket per rank, bucket 1 the strongest.
    builder.card_bucket.resize(spec.card_count);
    for (int r = 0; r < spec.card_count; ++r) {
      builder.card_bucket[r] = spec.card_count - r;
    }
    builder.bucket_count = spec.card_count;
  } else {
    if (static_cast<int>(card_bucket.size()) != spec.card_count) {
      throw std::invalid_argument("bucketed game: card map does not cover the deck");
    }
    builder.card_bucket = card_bucket;
    builder.bucket_count = 0;
    for (int b : card_bucket) builder.bucket_count = std::max(builder.bucket_count, b);
  }

  if (bet_buckets.empty()) {
    for (int size : spec.bet_sizes) builder.bet_buckets.push_back({size});
  } else {
    std::vector<int> flattened;
    for (const std::vector<int>& bucket : bet_buckets) {
      for (int size : bucket) flattened.push_back(size);
    }
    if (flattened != spec.bet_sizes) {
      throw std::invalid_argument(
          "bucketed game: bet buckets must partition the ascending size list");
    }
    builder.bet_buckets = bet_buckets;
  }

  {
    std::ostringstream id;
    id << spec.to_string();
    if (!card_bucket.empty() || !bet_buckets.empty()) {
      id << "#cb=";
      for (int b : builder.card_bucket) id << b;
      id << ";bb=";
      for (const auto& bucket : builder.bet_buckets) {
        for (int size : bucket) id << size << '.';
        id << '|';
      }
    }
    builder.tree.id_ = id.str();
  }

  int root = builder.new_node(NodeKind::Chance, -1, -1);
  std::vector<Action> history;
  for (int c1 = 0; c1 < spec.card_count; ++c1) {
    for (int c2 = 0; c2 < spec.card_count; ++c2) {
      if (c1 == c2) continue;
      int deal = builder.grow(c1, c2, history, 0);  // may reallocate nodes_
      builder.tree.nodes_[root].children.push_back(deal);
    }
  }

  builder.index_sequences(root, 0, 0, 1.0);

  GameTree& tree = builder.tree;
  for (int player : {kPlayer1, kPlayer2}) {
    int offset = 0;
    for (int is_id : tree.player_infosets_[player]) {
      tree.infosets_[is_id].prob_offset = offset;
      offset += static_cast<int>(tree.infosets_[is_id].actions.size());
    }
    tree.strategy_size_[player] = offset;
  }
  for (Infoset& is : tree.infosets_) {
    is.table_offset = is.prob_offset +
                      (is.player == kPlayer1 ? 0 : tree.strategy_size_[0]);
  }
  for (int player : {kPlayer1, kPlayer2}) {
    Money lo = std::numeric_limits<Money>::infinity();
    for (const TerminalEntry& t : tree.terminals_) {
      Money u = player == kPlayer1 ? t.utility : -t.utility;
      lo = std::min(lo, u);
    }
    tree.min_utility_[player] = lo;
  }
  return std::move(builder.tree);
}

GameTree build_game(const GameSpec& spec) {
  return build_bucketed_game(spec, {}, {});
}

Money terminal_utility(const GameTree& tree, int node) {
  const Node& n = tree.node(node);
  if (n.kind != NodeKind::Terminal) {
    throw std::invalid_argument("terminal_utility: node is not terminal");
  }
  return n.utility;
}

std::string infoset_key(const GameTree& tree, int node, int player) {
  const Node& n = tree.node(node);
  if (n.kind != NodeKind::Decision || n.player != player) {
    throw std::invalid_argument("infoset_key: player does not act at node");
  }
  return tree.infoset(n.infoset).key;
}

void validate_hand(const GameTree& tree, const HandRecord& hand) {
  const Node& root = tree.node(tree.root());
  int current = -1;
  for (int child : root.children) {
    const Node& deal = tree.node(child);
    if (deal.p1_card == hand.p1_card && deal.p2_card == hand.p2_card) {
      current = child;
      break;
    }
  }
  if (current < 0) throw std::invalid_argument("hand: no such deal");

  for (const HandStep& step : hand.steps) {
    const Node& n = tree.node(current);
    if (n.kind != NodeKind::Decision || step.node != current ||
        step.player != n.player || step.infoset != n.infoset ||
        step.action < 0 ||
        step.action >= static_cast<int>(n.children.size())) {
      throw std::invalid_argument("hand: step inconsistent with tree");
    }
    current = n.children[step.action];
  }
  const Node& last = tree.node(current);
  if (last.kind != NodeKind::Terminal || current != hand.terminal ||
      last.utility != hand.utility) {
    throw std::invalid_argument("hand: does not end at the recorded terminal");
  }
}

}  // namespace psafe
