#pragma once

#include <memory>
#include <span>
#include <vector>

#include "psafe/game.hpp"
#include "psafe/strategy.hpp"

namespace psafe {

struct BestResponseResult {
  BehavioralStrategy strategy;  // pure: one action per infoset
  Money value = 0;              // expected payoff to the responding player
};

struct ForcedAction {
  int infoset = -1;
  int action = -1;
};

/// Exact pure best response for `player` against a fixed opponent strategy,
/// by counterfactual-reach-weighted argmax per infoset, deepest infosets
/// first. Ties break to the lowest action index.
class BestResponder {
 public:
  explicit BestResponder(const GameTree& tree);

  BestResponseResult solve(int player, const BehavioralStrategy& opponent,
                           std::span<const ForcedAction> forced = {});
  /// Value only; skips materializing the strategy.
  Money value(int player, const BehavioralStrategy& opponent,
              std::span<const ForcedAction> forced = {});

 private:
  Money run(int player, const BehavioralStrategy& opponent,
            std::span<const ForcedAction> forced);
  double subtree_value(int node_id, int player,
                       const BehavioralStrategy& opponent);

  const GameTree* tree_;
  std::vector<int> order_[2];  // player infosets, deepest first
  std::vector<double> ext_;    // chance x opponent reach per node
  std::vector<double> memo_;
  std::vector<char> memo_set_;
  std::vector<int> chosen_;    // per infoset
};

BestResponseResult best_response(const GameTree& tree, int player,
                                 const BehavioralStrategy& opponent);

/// v'_i(s) = min over opponent strategies of u_i(s, .): the payoff of s
/// against its nemesis.
Money worst_case_value(const GameTree& tree, int player,
                       const BehavioralStrategy& s);

/// Exact game value to `player` via the sequence-form zero-sum LP.
Money game_value_lp(const GameTree& tree, int player);

struct LpSolution {
  Money value = 0;
  BehavioralStrategy strategy;  // a minimax strategy for `player`
};
LpSolution solve_game_lp(const GameTree& tree, int player);

/// game value - worst case, clamped to 0 when within 1e-9 below.
Money exploitability(const GameTree& tree, int player,
                     const BehavioralStrategy& s);

struct ValueReport {
  Money game_value = 0;
  Money worst_case = 0;
  Money exploitability = 0;
  BehavioralStrategy nemesis;  // opponent strategy attaining worst_case
};
ValueReport value_report(const GameTree& tree, int player,
                         const BehavioralStrategy& s);

/// The opponent strategy that best-responds to s subject to playing the
/// observed actions at every infoset on the realized path (identified by the
/// revealed private card), and the exact value u_i(s, tau) it yields.
struct ConstrainedResponse {
  BehavioralStrategy strategy;  // tau, owned by the opponent seat
  Money value = 0;              // payoff to s's owner
};
ConstrainedResponse constrained_best_response(const GameTree& tree,
                                              const BehavioralStrategy& s,
                                              const HandRecord& hand);
/// Value-only variant used by the per-hand ledger settlement.
Money constrained_gift_value(const GameTree& tree, const BehavioralStrategy& s,
                             const HandRecord& hand, BestResponder* scratch = nullptr);

/// Best response to `model` restricted to strategies whose worst-case payoff
/// stays within k of v_prime: argmax u(x, model) over the sequence-form
/// polytope subject to min over opponent plans of u(x, .) >= v_prime - k,
/// encoded by LP duality in one linear program.
BehavioralStrategy safe_best_response(const GameTree& tree,
                                      const BehavioralStrategy& model,
                                      Money k, Money v_prime);

namespace detail {
struct SeqLp;
}

/// Reusable workspace for per-hand safe best responses. When the
/// unconstrained best response already satisfies the safety bound it is
/// returned directly and the LP is skipped.
class SafeBestResponder {
 public:
  SafeBestResponder(const GameTree& tree, int agent);
  ~SafeBestResponder();
  SafeBestResponder(SafeBestResponder&&) noexcept;
  SafeBestResponder& operator=(SafeBestResponder&&) noexcept;

  struct Outcome {
    BehavioralStrategy strategy;
    Money candidate_worst_case = 0;  // worst case of the unconstrained BR
    bool used_lp = false;
  };
  Outcome solve(const BehavioralStrategy& model, Money k, Money v_prime);

 private:
  const GameTree* tree_;
  int agent_;
  BestResponder br_;
  std::unique_ptr<detail::SeqLp> lp_;
};

}  // namespace psafe
