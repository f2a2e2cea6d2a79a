#include "psafe/safe_exploit.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>

namespace psafe {

std::string to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::Static: return "Static";
    case PolicyKind::EEFEWP: return "EEFEWP";
    case PolicyKind::EEFFE: return "EEFFE";
    case PolicyKind::PRWYWE: return "PRWYWE";
  }
  return "Static";
}

PolicyKind parse_policy_kind(const std::string& text) {
  if (text == "Static" || text == "static") return PolicyKind::Static;
  if (text == "EEFEWP" || text == "eefewp") return PolicyKind::EEFEWP;
  if (text == "EEFFE" || text == "eeffe") return PolicyKind::EEFFE;
  if (text == "PRWYWE" || text == "prwywe") return PolicyKind::PRWYWE;
  throw std::invalid_argument("unknown algorithm '" + text + "'");
}

namespace {

const char* mode_name(DecisionTrace::Mode mode) {
  switch (mode) {
    case DecisionTrace::Mode::Static: return "static";
    case DecisionTrace::Mode::FullExploit: return "full-exploit";
    case DecisionTrace::Mode::ConstrainedExploit: return "constrained-exploit";
  }
  return "static";
}

}  // namespace

std::string trace_csv_header() {
  return "t,mode,epsilon_prime,k_before,gift,k_after";
}

std::string to_csv_row(const DecisionTrace& trace) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%d,%s,%.12g,%.12g,%.12g,%.12g", trace.t,
                mode_name(trace.mode), trace.epsilon_prime, trace.k_before,
                trace.gift, trace.k_after);
  return buf;
}

ExploitPolicy::ExploitPolicy(PolicyKind kind, const GameTree& tree,
                             BehavioralStrategy static_strategy, int horizon,
                             PolicyOptions options)
    : kind_(kind), tree_(&tree), seat_(static_strategy.player()),
      static_(std::move(static_strategy)), options_(options), br_(tree),
      safe_br_(tree, seat_) {
  if (static_.tree() != &tree) {
    throw std::invalid_argument("policy: strategy is not for this tree");
  }
  static_.validate();
  if (horizon < 1) throw std::invalid_argument("policy: horizon must be >= 1");
  ledger_.v_prime = -br_.value(opponent_of(seat_), static_);
  ledger_.k = 0;
  ledger_.t = 1;
  ledger_.horizon = horizon;
}

const BehavioralStrategy& ExploitPolicy::select_strategy(
    const OpponentModel& model, int t) {
  if (t != ledger_.t) {
    throw std::invalid_argument("select_strategy: t does not match the ledger");
  }
  last_selected_t_ = t;

  if (kind_ == PolicyKind::Static) {
    last_mode_ = DecisionTrace::Mode::Static;
    last_eps_ = 0;
    return static_;
  }

  model.posterior_into(posterior_);

  if (kind_ == PolicyKind::PRWYWE) {
    // Settlement can leave k a rounding error below zero; the budget is 0.
    SafeBestResponder::Outcome outcome =
        safe_br_.solve(posterior_, std::max(0.0, ledger_.k), ledger_.v_prime);
    current_ = std::move(outcome.strategy);
    last_eps_ = std::max(0.0, ledger_.v_prime - outcome.candidate_worst_case);
    last_mode_ = DecisionTrace::Mode::ConstrainedExploit;
    return current_;
  }

  BestResponseResult candidate = br_.solve(seat_, posterior_);
  Money candidate_wc = -br_.value(opponent_of(seat_), candidate.strategy);
  Money eps_raw = ledger_.v_prime - candidate_wc;
  last_eps_ = std::max(0.0, eps_raw);

  bool exploit = false;
  if (kind_ == PolicyKind::EEFEWP) {
    exploit = last_eps_ <= ledger_.k;
  } else {  // EEFFE
    double remaining = static_cast<double>(ledger_.horizon - t + 1);
    if (options_.eeffe_printed_gate) {
      exploit = ledger_.k >= remaining * (ledger_.v_prime - eps_raw);
    } else {
      exploit = ledger_.k >= remaining * last_eps_;
    }
  }
  if (exploit) {
    current_ = std::move(candidate.strategy);
    last_mode_ = DecisionTrace::Mode::FullExploit;
    return current_;
  }
  last_mode_ = DecisionTrace::Mode::Static;
  return static_;
}

DecisionTrace ExploitPolicy::settle_hand(OpponentModel& model,
                                         const BehavioralStrategy& played,
                                         const HandRecord& hand) {
  if (last_selected_t_ != ledger_.t) {
    throw std::logic_error("settle_hand: select_strategy was not called for this hand");
  }
  DecisionTrace trace;
  trace.t = ledger_.t;
  trace.mode = last_mode_;
  trace.epsilon_prime = last_eps_;
  trace.k_before = ledger_.k;

  if (kind_ != PolicyKind::Static) {
    Money value = constrained_gift_value(*tree_, played, hand, &br_);
    trace.gift = value - ledger_.v_prime;
    ledger_.k += trace.gift;
  }
  trace.k_after = ledger_.k;

  model.observe_hand(hand);
  ledger_.t += 1;
  return trace;
}

}  // namespace psafe
