#include "psafe/opponents.hpp"

#include <stdexcept>

#include "psafe/value_oracle.hpp"

namespace psafe {

void OpponentSpec::validate() const {
  if (mix_p < 0 || mix_p > 1) {
    throw std::invalid_argument("opponent: mix_p must be in [0, 1]");
  }
  if (switch_hand < 0) {
    throw std::invalid_argument("opponent: switch_hand must be >= 0");
  }
}

std::string OpponentSpec::class_name() const {
  switch (cls) {
    case Class::Random: return "Random";
    case Class::Dynamic: return "Dynamic";
    case Class::Equilibrium: return "Equilibrium";
    case Class::Sophisticated: return "Sophisticated";
  }
  return "Random";
}

OpponentSpec::Class OpponentSpec::parse_class(const std::string& text) {
  if (text == "random" || text == "Random") return Class::Random;
  if (text == "dynamic" || text == "Dynamic") return Class::Dynamic;
  if (text == "equilibrium" || text == "Equilibrium") return Class::Equilibrium;
  if (text == "sophisticated" || text == "Sophisticated") {
    return Class::Sophisticated;
  }
  throw std::invalid_argument("unknown opponent class '" + text + "'");
}

namespace {

class FixedOpponent : public Opponent {
 public:
  explicit FixedOpponent(BehavioralStrategy strategy)
      : strategy_(std::move(strategy)) {}
  const BehavioralStrategy& strategy_for_hand(int, const BehavioralStrategy&) override {
    return strategy_;
  }

 private:
  BehavioralStrategy strategy_;
};

class DynamicOpponent : public Opponent {
 public:
  DynamicOpponent(BehavioralStrategy uniform, BehavioralStrategy nemesis,
                  int switch_hand)
      : uniform_(std::move(uniform)), nemesis_(std::move(nemesis)),
        switch_hand_(switch_hand) {}
  const BehavioralStrategy& strategy_for_hand(int t, const BehavioralStrategy&) override {
    return t <= switch_hand_ ? uniform_ : nemesis_;
  }

 private:
  BehavioralStrategy uniform_;
  BehavioralStrategy nemesis_;
  int switch_hand_;
};

BehavioralStrategy trained_equilibrium(const GameTree& tree, int seat,
                                       const OpponentSpec& spec,
                                       std::uint64_t seed, SolveCache* cache) {
  if (cache != nullptr) {
    return cache->train(tree, spec.budget, seed).strategy(seat);
  }
  return mccfr_train_to_budget(tree, spec.budget, seed).strategy(seat);
}

}  // namespace

std::unique_ptr<Opponent> make_opponent(const GameTree& tree,
                                        const OpponentSpec& spec,
                                        const BehavioralStrategy& agent_static,
                                        std::uint64_t seed, SolveCache* cache) {
  spec.validate();
  int seat = opponent_of(agent_static.player());
  switch (spec.cls) {
    case OpponentSpec::Class::Random:
      return std::make_unique<FixedOpponent>(uniform_strategy(tree, seat));
    case OpponentSpec::Class::Equilibrium:
      return std::make_unique<FixedOpponent>(
          trained_equilibrium(tree, seat, spec, seed, cache));
    case OpponentSpec::Class::Sophisticated: {
      BehavioralStrategy eq = trained_equilibrium(tree, seat, spec, seed, cache);
      for (int is_id : tree.player_infosets(seat)) {
        auto probs = eq.at(is_id);
        double u = 1.0 / static_cast<double>(probs.size());
        for (double& p : probs) p = (1.0 - spec.mix_p) * p + spec.mix_p * u;
      }
      eq.validate();
      return std::make_unique<FixedOpponent>(std::move(eq));
    }
    case OpponentSpec::Class::Dynamic: {
      BestResponseResult nemesis = best_response(tree, seat, agent_static);
      return std::make_unique<DynamicOpponent>(uniform_strategy(tree, seat),
                                               std::move(nemesis.strategy),
                                               spec.switch_hand);
    }
  }
  throw std::logic_error("unreachable opponent class");
}

}  // namespace psafe
