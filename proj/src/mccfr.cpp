#include "psafe/mccfr.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "psafe/value_oracle.hpp"

namespace psafe {

void regret_matching_into(std::span<const double> regrets,
                          std::span<double> out) {
  double positive = 0;
  for (double r : regrets) {
    if (r > 0) positive += r;
  }
  if (positive > 0) {
    for (size_t a = 0; a < regrets.size(); ++a) {
      out[a] = regrets[a] > 0 ? regrets[a] / positive : 0.0;
    }
  } else {
    double p = 1.0 / static_cast<double>(regrets.size());
    for (size_t a = 0; a < regrets.size(); ++a) out[a] = p;
  }
}

std::vector<double> regret_matching(std::span<const double> regrets) {
  if (regrets.empty()) throw std::invalid_argument("regret_matching: empty vector");
  std::vector<double> out(regrets.size());
  regret_matching_into(regrets, out);
  return out;
}

MccfrTrainer::MccfrTrainer(const GameTree& tree, std::uint64_t seed)
    : tree_(&tree), table_(tree), rng_(seed) {
  size_t max_actions = 0;
  for (const Infoset& is : tree.infosets()) {
    max_actions = std::max(max_actions, is.actions.size());
  }
  // One scratch row per tree level; decisions are at most a few levels deep.
  scratch_sigma_.assign(8, std::vector<double>(max_actions));
  scratch_value_.assign(8, std::vector<double>(max_actions));
}

double MccfrTrainer::traverse(int node_id, int traverser, int depth) {
  const Node& node = tree_->node(node_id);
  switch (node.kind) {
    case NodeKind::Terminal:
      return traverser == kPlayer1 ? node.utility : -node.utility;
    case NodeKind::Chance:
      return traverse(
          node.children[rng_.index(static_cast<int>(node.children.size()))],
          traverser, depth);
    case NodeKind::Decision:
      break;
  }

  const Infoset& is = tree_->infoset(node.infoset);
  size_t n = is.actions.size();
  std::span<double> sigma(scratch_sigma_[depth].data(), n);
  std::span<const double> regrets(table_.regret.data() + is.table_offset, n);
  regret_matching_into(regrets, sigma);

  if (node.player == traverser) {
    std::span<double> values(scratch_value_[depth].data(), n);
    double expected = 0;
    for (size_t a = 0; a < n; ++a) {
      values[a] = traverse(node.children[a], traverser, depth + 1);
      expected += sigma[a] * values[a];
    }
    double* regret = table_.regret.data() + is.table_offset;
    for (size_t a = 0; a < n; ++a) regret[a] += values[a] - expected;
    return expected;
  }

  // Non-traverser: accumulate the average strategy, then sample.
  double* sum = table_.strategy_sum.data() + is.table_offset;
  for (size_t a = 0; a < n; ++a) sum[a] += sigma[a];
  int a = rng_.sample(sigma);
  return traverse(node.children[a], traverser, depth + 1);
}

void MccfrTrainer::run(std::uint64_t iterations) {
  for (std::uint64_t it = 0; it < iterations; ++it) {
    int traverser = static_cast<int>(table_.iterations & 1);
    traverse(tree_->root(), traverser, 0);
    ++table_.iterations;
  }
}

Profile MccfrTrainer::average_profile() const {
  Profile profile;
  profile.iterations = table_.iterations;
  for (int player : {kPlayer1, kPlayer2}) {
    BehavioralStrategy s(*tree_, player);
    for (int is_id : tree_->player_infosets(player)) {
      const Infoset& is = tree_->infoset(is_id);
      auto probs = s.at(is_id);
      const double* sum = table_.strategy_sum.data() + is.table_offset;
      double total = 0;
      for (size_t a = 0; a < probs.size(); ++a) total += sum[a];
      if (total > 0) {
        for (size_t a = 0; a < probs.size(); ++a) probs[a] = sum[a] / total;
      } else {
        std::fill(probs.begin(), probs.end(), 1.0 / probs.size());
      }
    }
    (player == kPlayer1 ? profile.p1 : profile.p2) = std::move(s);
  }
  return profile;
}

Profile mccfr_train(const GameTree& tree, std::uint64_t iterations,
                    std::uint64_t seed) {
  if (iterations < 1) throw std::invalid_argument("mccfr_train: iterations must be >= 1");
  MccfrTrainer trainer(tree, seed);
  trainer.run(iterations);
  return trainer.average_profile();
}

Profile mccfr_train_to_budget(const GameTree& tree, const SolveBudget& budget,
                              std::uint64_t seed) {
  if (budget.max_iterations < 1) {
    throw std::invalid_argument("mccfr_train_to_budget: empty budget");
  }
  MccfrTrainer trainer(tree, seed);
  Money value = game_value_lp(tree, kPlayer1);
  BestResponder br(tree);
  std::uint64_t next_check = std::min<std::uint64_t>(budget.max_iterations, 16384);
  while (true) {
    trainer.run(next_check - trainer.iterations());
    Profile profile = trainer.average_profile();
    double expl1 = value - (-br.value(kPlayer2, profile.p1));
    double expl2 = (-value) - (-br.value(kPlayer1, profile.p2));
    if (std::max(expl1, expl2) <= budget.exploitability_threshold) {
      return profile;
    }
    if (next_check >= budget.max_iterations) return profile;
    next_check = std::min(budget.max_iterations, next_check * 2);
  }
}

const Profile& SolveCache::train(const GameTree& tree,
                                 const SolveBudget& budget,
                                 std::uint64_t seed) {
  std::ostringstream key;
  key << tree.id() << "|" << budget.max_iterations << "|"
      << budget.exploitability_threshold << "|" << seed;
  auto it = entries_.find(key.str());
  if (it == entries_.end()) {
    it = entries_.emplace(key.str(),
                          mccfr_train_to_budget(tree, budget, seed)).first;
  } else {
    // A cached profile may be bound to a different (structurally identical)
    // tree instance.
    it->second.p1.rebind(tree);
    it->second.p2.rebind(tree);
  }
  return it->second;
}

}  // namespace psafe
