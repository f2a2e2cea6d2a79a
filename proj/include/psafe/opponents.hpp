#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "psafe/game.hpp"
#include "psafe/mccfr.hpp"
#include "psafe/strategy.hpp"

namespace psafe {

struct OpponentSpec {
  enum class Class { Random, Dynamic, Equilibrium, Sophisticated };
  Class cls = Class::Random;
  int switch_hand = 100;   // Dynamic: uniform through this hand, then nemesis
  double mix_p = 0.2;      // Sophisticated: weight on the uniform mixture
  SolveBudget budget{};    // Equilibrium / Sophisticated training

  void validate() const;
  std::string class_name() const;
  static Class parse_class(const std::string& text);
};

/// A per-hand strategy source. The built-in classes are immutable after
/// construction and ignore the agent's current strategy; adaptive test
/// opponents may inspect it.
class Opponent {
 public:
  virtual ~Opponent() = default;
  virtual const BehavioralStrategy& strategy_for_hand(
      int t, const BehavioralStrategy& agent_current) = 0;
};

/// Random = uniform everywhere. Equilibrium = the MCCFR average strategy
/// trained to the spec's budget. Sophisticated = per-decision mixture
/// (1-p) * equilibrium + p * uniform. Dynamic = uniform through switch_hand,
/// then the pure best response to the agent's static strategy.
/// `cache`, when given, shares equilibrium training across opponents.
std::unique_ptr<Opponent> make_opponent(const GameTree& tree,
                                        const OpponentSpec& spec,
                                        const BehavioralStrategy& agent_static,
                                        std::uint64_t seed,
                                        SolveCache* cache = nullptr);

}  // namespace psafe
