#include "psafe/opponent_model.hpp"

#include <algorithm>
#include <stdexcept>

namespace psafe {

OpponentModel::OpponentModel(const GameTree& tree,
                             const BehavioralStrategy& prior,
                             double prior_hands)
    : tree_(&tree), player_(prior.player()), prior_hands_(prior_hands) {
  if (prior.tree() != &tree) {
    throw std::invalid_argument("opponent model: prior is not for this tree");
  }
  if (!(prior_hands > 0)) {
    throw std::invalid_argument("opponent model: prior weight must be positive");
  }
  prior.validate();
  counts_.assign(prior.raw().begin(), prior.raw().end());
  for (double& c : counts_) c *= prior_hands_;
}

void OpponentModel::observe_hand(const HandRecord& hand) {
  for (const HandStep& step : hand.steps) {
    if (step.player != player_) continue;
    const Infoset& is = tree_->infoset(step.infoset);
    counts_[is.prob_offset + step.action] += 1.0;
  }
}

void OpponentModel::posterior_into(BehavioralStrategy& out) const {
  if (out.tree() != tree_ || out.player() != player_) {
    out = BehavioralStrategy(*tree_, player_);
  }
  for (int is_id : tree_->player_infosets(player_)) {
    const Infoset& is = tree_->infoset(is_id);
    auto probs = out.at(is_id);
    double total = 0;
    for (size_t a = 0; a < probs.size(); ++a) {
      total += counts_[is.prob_offset + a];
    }
    for (size_t a = 0; a < probs.size(); ++a) {
      probs[a] = counts_[is.prob_offset + a] / total;
    }
  }
}

BehavioralStrategy OpponentModel::posterior_strategy() const {
  BehavioralStrategy out(*tree_, player_);
  posterior_into(out);
  return out;
}

std::span<const double> OpponentModel::counts(int infoset) const {
  const Infoset& is = tree_->infoset(infoset);
  if (is.player != player_) {
    throw std::invalid_argument("opponent model: infoset belongs to the other seat");
  }
  return std::span<const double>(counts_).subspan(is.prob_offset,
                                                  is.actions.size());
}

}  // namespace psafe
