#pragma once

#include <string>

#include "psafe/game.hpp"
#include "psafe/opponent_model.hpp"
#include "psafe/strategy.hpp"
#include "psafe/value_oracle.hpp"

namespace psafe {

/// Static = always play the base strategy (the no-exploitation baseline).
/// EEFEWP = best-respond to the model whenever the banked gift balance
/// covers the candidate's exploitability. EEFFE = switch only once the
/// balance covers it for every remaining hand. PRWYWE = play the
/// gift-constrained best response every hand.
enum class PolicyKind { Static, EEFEWP, EEFFE, PRWYWE };

std::string to_string(PolicyKind kind);
PolicyKind parse_policy_kind(const std::string& text);

/// Running gift account. v_prime is fixed at initialization as the worst
/// case of the base strategy; k accumulates realized value above it.
struct SafetyLedger {
  Money k = 0;
  Money v_prime = 0;
  int t = 1;        // current hand, 1-based
  int horizon = 0;  // T
};

struct DecisionTrace {
  enum class Mode { Static, FullExploit, ConstrainedExploit };
  int t = 0;
  Mode mode = Mode::Static;
  Money epsilon_prime = 0;  // candidate best response's exploitability vs v'
  Money k_before = 0;
  Money gift = 0;
  Money k_after = 0;
};

std::string trace_csv_header();
std::string to_csv_row(const DecisionTrace& trace);

struct PolicyOptions {
  /// Use the EEFFE switch condition exactly as printed,
  /// k >= (T-t+1)(v' - eps'), instead of the default
  /// k >= (T-t+1)*max(eps', 0).
  bool eeffe_printed_gate = false;
};

/// Per-match strategy selection plus gift-ledger settlement. One instance
/// owns one match; construction freezes v' = worst_case_value(base).
class ExploitPolicy {
 public:
  ExploitPolicy(PolicyKind kind, const GameTree& tree,
                BehavioralStrategy static_strategy, int horizon,
                PolicyOptions options = {});

  PolicyKind kind() const { return kind_; }
  int seat() const { return seat_; }
  const SafetyLedger& ledger() const { return ledger_; }
  Money v_prime() const { return ledger_.v_prime; }
  const BehavioralStrategy& static_strategy() const { return static_; }

  /// The strategy to play for hand t (must be the ledger's current hand).
  const BehavioralStrategy& select_strategy(const OpponentModel& model, int t);

  /// Settles hand t: banks u(played, constrained nemesis) - v' as the gift,
  /// forwards the hand to the opponent model, and advances the clock.
  DecisionTrace settle_hand(OpponentModel& model,
                            const BehavioralStrategy& played,
                            const HandRecord& hand);

 private:
  PolicyKind kind_;
  const GameTree* tree_;
  int seat_;
  BehavioralStrategy static_;
  SafetyLedger ledger_;
  PolicyOptions options_;

  BestResponder br_;
  SafeBestResponder safe_br_;
  BehavioralStrategy posterior_;
  BehavioralStrategy current_;
  DecisionTrace::Mode last_mode_ = DecisionTrace::Mode::Static;
  Money last_eps_ = 0;
  int last_selected_t_ = 0;
};

}  // namespace psafe
