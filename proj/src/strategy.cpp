#include "psafe/strategy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace psafe {

namespace {

constexpr double kSumTolerance = 1e-12;
constexpr double kLoadTolerance = 1e-9;

std::string format_prob(double p) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", p);
  return buf;
}

void check_pair(const GameTree& tree, const BehavioralStrategy& s, int player) {
  if (s.tree() != &tree || s.player() != player ||
      s.raw().size() != static_cast<size_t>(tree.strategy_size(player))) {
    throw std::invalid_argument(
        "strategy does not cover player " + std::to_string(player + 1) +
        " on this game tree");
  }
}

}  // namespace

std::span<double> BehavioralStrategy::at(int infoset) {
  const Infoset& is = tree_->infoset(infoset);
  return std::span<double>(probs_).subspan(is.prob_offset, is.actions.size());
}

std::span<const double> BehavioralStrategy::at(int infoset) const {
  const Infoset& is = tree_->infoset(infoset);
  return std::span<const double>(probs_).subspan(is.prob_offset,
                                                 is.actions.size());
}

std::span<const double> BehavioralStrategy::at_key(const std::string& key) const {
  int id = tree_->infoset_by_key(key);
  if (id < 0 || tree_->infoset(id).player != player_) {
    throw std::invalid_argument("no such infoset for this player: " + key);
  }
  return at(id);
}

void BehavioralStrategy::validate() const {
  if (tree_ == nullptr) throw std::invalid_argument("empty strategy");
  for (int id : tree_->player_infosets(player_)) {
    auto probs = at(id);
    double sum = 0;
    for (double p : probs) {
      if (!(p >= 0) || !std::isfinite(p)) {
        throw std::invalid_argument("negative or non-finite probability at " +
                                    tree_->infoset(id).key);
      }
      sum += p;
    }
    if (std::abs(sum - 1.0) > kSumTolerance) {
      throw std::invalid_argument("probabilities at " + tree_->infoset(id).key +
                                  " sum to " + format_prob(sum));
    }
  }
}

void BehavioralStrategy::rebind(const GameTree& tree) {
  if (tree_ == nullptr || tree.id() != tree_->id() ||
      tree.strategy_size(player_) != static_cast<int>(probs_.size())) {
    throw std::invalid_argument("rebind: trees are not structurally identical");
  }
  tree_ = &tree;
}

BehavioralStrategy uniform_strategy(const GameTree& tree, int player) {
  BehavioralStrategy s(tree, player);
  for (int id : tree.player_infosets(player)) {
    auto probs = s.at(id);
    double p = 1.0 / static_cast<double>(probs.size());
    std::fill(probs.begin(), probs.end(), p);
  }
  return s;
}

namespace {

Money expected_walk(const GameTree& tree, const BehavioralStrategy& s1,
                    const BehavioralStrategy& s2, int node_id) {
  const Node& node = tree.node(node_id);
  switch (node.kind) {
    case NodeKind::Terminal:
      return node.utility;
    case NodeKind::Chance: {
      double p = 1.0 / static_cast<double>(node.children.size());
      Money sum = 0;
      for (int child : node.children) sum += p * expected_walk(tree, s1, s2, child);
      return sum;
    }
    case NodeKind::Decision: {
      const BehavioralStrategy& s = node.player == kPlayer1 ? s1 : s2;
      auto probs = s.at(node.infoset);
      Money sum = 0;
      for (size_t a = 0; a < node.children.size(); ++a) {
        if (probs[a] != 0) {
          sum += probs[a] * expected_walk(tree, s1, s2, node.children[a]);
        }
      }
      return sum;
    }
  }
  return 0;
}

}  // namespace

Money expected_utility(const GameTree& tree, const BehavioralStrategy& s1,
                       const BehavioralStrategy& s2) {
  check_pair(tree, s1, kPlayer1);
  check_pair(tree, s2, kPlayer2);
  return expected_walk(tree, s1, s2, tree.root());
}

HandRecord sample_hand(const GameTree& tree, const BehavioralStrategy& s1,
                       const BehavioralStrategy& s2, Rng& rng) {
  check_pair(tree, s1, kPlayer1);
  check_pair(tree, s2, kPlayer2);
  HandRecord hand;
  int current = tree.root();
  while (true) {
    const Node& node = tree.node(current);
    if (node.kind == NodeKind::Terminal) {
      hand.terminal = current;
      hand.utility = node.utility;
      return hand;
    }
    if (node.kind == NodeKind::Chance) {
      current = node.children[rng.index(static_cast<int>(node.children.size()))];
      const Node& deal = tree.node(current);
      hand.p1_card = deal.p1_card;
      hand.p2_card = deal.p2_card;
      continue;
    }
    const BehavioralStrategy& s = node.player == kPlayer1 ? s1 : s2;
    int a = rng.sample(s.at(node.infoset));
    hand.steps.push_back({current, node.player, node.infoset, a});
    current = node.children[a];
  }
}

RealizationPlan to_realization_plan(const GameTree& tree,
                                    const BehavioralStrategy& s) {
  check_pair(tree, s, s.player());
  RealizationPlan plan;
  plan.player = s.player();
  plan.weights.assign(tree.num_sequences(s.player()), 0.0);
  plan.weights[0] = 1.0;
  // Infosets are discovered root-first during construction, so parents come
  // before children in this order.
  for (int id : tree.player_infosets(s.player())) {
    const Infoset& is = tree.infoset(id);
    double parent = plan.weights[is.parent_seq];
    auto probs = s.at(id);
    for (size_t a = 0; a < probs.size(); ++a) {
      plan.weights[is.first_seq + a] = parent * probs[a];
    }
  }
  return plan;
}

BehavioralStrategy to_behavioral(const GameTree& tree,
                                 const RealizationPlan& plan) {
  if (plan.weights.size() != static_cast<size_t>(tree.num_sequences(plan.player))) {
    throw std::invalid_argument("realization plan does not match tree");
  }
  BehavioralStrategy s(tree, plan.player);
  for (int id : tree.player_infosets(plan.player)) {
    const Infoset& is = tree.infoset(id);
    auto probs = s.at(id);
    double total = 0;
    for (size_t a = 0; a < probs.size(); ++a) {
      total += std::max(0.0, plan.weights[is.first_seq + a]);
    }
    if (total > 1e-12) {
      for (size_t a = 0; a < probs.size(); ++a) {
        probs[a] = std::max(0.0, plan.weights[is.first_seq + a]) / total;
      }
    } else {
      std::fill(probs.begin(), probs.end(), 1.0 / probs.size());
    }
  }
  return s;
}

void save_strategies(std::ostream& out, const GameTree& tree,
                     std::span<const BehavioralStrategy> strategies) {
  std::vector<std::string> lines;
  for (const BehavioralStrategy& s : strategies) {
    check_pair(tree, s, s.player());
    for (int id : tree.player_infosets(s.player())) {
      const Infoset& is = tree.infoset(id);
      std::string line = is.key;
      auto probs = s.at(id);
      for (size_t a = 0; a < probs.size(); ++a) {
        line += ' ';
        line += is.actions[a].token();
        line += ':';
        line += format_prob(probs[a]);
      }
      lines.push_back(std::move(line));
    }
  }
  std::sort(lines.begin(), lines.end());
  for (const std::string& line : lines) out << line << '\n';
}

void save_strategies_file(const std::string& path, const GameTree& tree,
                          std::span<const BehavioralStrategy> strategies) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  save_strategies(out, tree, strategies);
}

BehavioralStrategy load_strategy(std::istream& in, const GameTree& tree,
                                 int player) {
  BehavioralStrategy s(tree, player);
  std::vector<char> seen(tree.infosets().size(), 0);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key.empty()) continue;
    int id = tree.infoset_by_key(key);
    if (id < 0) {
      throw std::runtime_error("line " + std::to_string(lineno) +
                               ": unknown infoset key " + key);
    }
    const Infoset& is = tree.infoset(id);
    if (is.player != player) continue;  // other seat's line
    if (seen[id]) {
      throw std::runtime_error("duplicate infoset key " + key);
    }
    seen[id] = 1;
    auto probs = s.at(id);
    std::fill(probs.begin(), probs.end(), 0.0);
    std::vector<char> have(probs.size(), 0);
    std::string pair;
    while (ls >> pair) {
      auto colon = pair.rfind(':');
      if (colon == std::string::npos) {
        throw std::runtime_error("line " + std::to_string(lineno) +
                                 ": expected action:prob, got " + pair);
      }
      std::string token = pair.substr(0, colon);
      double p = std::stod(pair.substr(colon + 1));
      bool matched = false;
      for (size_t a = 0; a < is.actions.size(); ++a) {
        if (is.actions[a].token() == token) {
          if (have[a]) throw std::runtime_error("duplicate action " + token + " at " + key);
          have[a] = 1;
          probs[a] = p;
          matched = true;
          break;
        }
      }
      if (!matched) {
        throw std::runtime_error("line " + std::to_string(lineno) +
                                 ": action " + token + " not legal at " + key);
      }
    }
    for (char h : have) {
      if (!h) throw std::runtime_error("missing action probability at " + key);
    }
    double sum = 0;
    for (double p : probs) {
      if (p < 0) throw std::runtime_error("negative probability at " + key);
      sum += p;
    }
    if (std::abs(sum - 1.0) > kLoadTolerance) {
      throw std::runtime_error("probabilities at " + key + " sum to " +
                               format_prob(sum));
    }
    for (double& p : probs) p /= sum;
  }
  for (int id : tree.player_infosets(player)) {
    if (!seen[id]) {
      throw std::runtime_error("strategy file misses infoset " +
                               tree.infoset(id).key);
    }
  }
  s.validate();
  return s;
}

BehavioralStrategy load_strategy_file(const std::string& path,
                                      const GameTree& tree, int player) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  return load_strategy(in, tree, player);
}

}  // namespace psafe
