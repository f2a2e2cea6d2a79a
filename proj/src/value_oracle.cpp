#include "psafe/value_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "psafe/lp.hpp"

namespace psafe {

BestResponder::BestResponder(const GameTree& tree) : tree_(&tree) {
  for (int p : {kPlayer1, kPlayer2}) {
    auto ids = tree.player_infosets(p);
    order_[p].assign(ids.begin(), ids.end());
    std::stable_sort(order_[p].begin(), order_[p].end(),
                     [&tree](int a, int b) {
                       return tree.infoset(a).public_depth >
                              tree.infoset(b).public_depth;
                     });
  }
  ext_.resize(tree.nodes().size());
  memo_.resize(tree.nodes().size());
  memo_set_.resize(tree.nodes().size());
  chosen_.resize(tree.infosets().size());
}

double BestResponder::subtree_value(int node_id, int player,
                                    const BehavioralStrategy& opponent) {
  if (memo_set_[node_id]) return memo_[node_id];
  const Node& node = tree_->node(node_id);
  double v = 0;
  switch (node.kind) {
    case NodeKind::Terminal:
      v = player == kPlayer1 ? node.utility : -node.utility;
      break;
    case NodeKind::Chance: {
      double p = 1.0 / static_cast<double>(node.children.size());
      for (int child : node.children) {
        v += p * subtree_value(child, player, opponent);
      }
      break;
    }
    case NodeKind::Decision:
      if (node.player == player) {
        v = subtree_value(node.children[chosen_[node.infoset]], player,
                          opponent);
      } else {
        auto probs = opponent.at(node.infoset);
        for (size_t a = 0; a < node.children.size(); ++a) {
          if (probs[a] != 0) {
            v += probs[a] * subtree_value(node.children[a], player, opponent);
          }
        }
      }
      break;
  }
  memo_set_[node_id] = 1;
  memo_[node_id] = v;
  return v;
}

Money BestResponder::run(int player, const BehavioralStrategy& opponent,
                         std::span<const ForcedAction> forced) {
  if (opponent.tree() != tree_ || opponent.player() != opponent_of(player)) {
    throw std::invalid_argument("best response: opponent strategy mismatch");
  }
  const auto& nodes = tree_->nodes();

  // Forward pass: chance times opponent reach. Children always carry larger
  // ids than their parent, so index order is topological.
  std::fill(ext_.begin(), ext_.end(), 0.0);
  ext_[tree_->root()] = 1.0;
  for (size_t id = 0; id < nodes.size(); ++id) {
    double reach = ext_[id];
    if (reach == 0) continue;
    const Node& node = nodes[id];
    switch (node.kind) {
      case NodeKind::Terminal:
        break;
      case NodeKind::Chance: {
        double p = reach / static_cast<double>(node.children.size());
        for (int child : node.children) ext_[child] += p;
        break;
      }
      case NodeKind::Decision:
        if (node.player == player) {
          for (int child : node.children) ext_[child] += reach;
        } else {
          auto probs = opponent.at(node.infoset);
          for (size_t a = 0; a < node.children.size(); ++a) {
            ext_[node.children[a]] += reach * probs[a];
          }
        }
        break;
    }
  }

  std::fill(chosen_.begin(), chosen_.end(), -1);
  for (const ForcedAction& f : forced) {
    const Infoset& is = tree_->infoset(f.infoset);
    if (is.player != player || f.action < 0 ||
        f.action >= static_cast<int>(is.actions.size())) {
      throw std::invalid_argument("forced action does not belong to responder");
    }
    chosen_[f.infoset] = f.action;
  }
  std::fill(memo_set_.begin(), memo_set_.end(), 0);

  // Deepest infosets first: every decision below is already fixed when an
  // infoset's action values are compared.
  for (int is_id : order_[player]) {
    if (chosen_[is_id] >= 0) continue;
    const Infoset& is = tree_->infoset(is_id);
    int best_a = 0;
    double best_q = -std::numeric_limits<double>::infinity();
    for (size_t a = 0; a < is.actions.size(); ++a) {
      double q = 0;
      for (int node_id : is.nodes) {
        const Node& node = tree_->node(node_id);
        q += ext_[node_id] * subtree_value(node.children[a], player, opponent);
      }
      if (q > best_q) {
        best_q = q;
        best_a = static_cast<int>(a);
      }
    }
    chosen_[is_id] = best_a;
  }

  // Root value under the chosen pure response. Terminal memo entries were
  // computed before all choices existed only below already-decided infosets,
  // so they remain valid.
  std::fill(memo_set_.begin(), memo_set_.end(), 0);
  return subtree_value(tree_->root(), player, opponent);
}

Money BestResponder::value(int player, const BehavioralStrategy& opponent,
                           std::span<const ForcedAction> forced) {
  return run(player, opponent, forced);
}

BestResponseResult BestResponder::solve(int player,
                                        const BehavioralStrategy& opponent,
                                        std::span<const ForcedAction> forced) {
  BestResponseResult out;
  out.value = run(player, opponent, forced);
  out.strategy = BehavioralStrategy(*tree_, player);
  for (int is_id : tree_->player_infosets(player)) {
    out.strategy.at(is_id)[chosen_[is_id]] = 1.0;
  }
  return out;
}

BestResponseResult best_response(const GameTree& tree, int player,
                                 const BehavioralStrategy& opponent) {
  BestResponder br(tree);
  return br.solve(player, opponent);
}

Money worst_case_value(const GameTree& tree, int player,
                       const BehavioralStrategy& s) {
  BestResponder br(tree);
  return -br.value(opponent_of(player), s);
}

namespace detail {

// Sequence-form blocks and the standard-form workspace for the two linear
// programs over the agent's realization polytope.
struct SeqLp {
  const GameTree* tree;
  int agent, opp;
  int nx, ny, mq, mE;
  std::vector<double> payoff;  // nx x ny, agent perspective
  std::vector<double> ft;      // ny x mq, (F^T)[t][r]

  std::vector<double> M, b, c, z;
  SimplexSolver solver;

  SeqLp(const GameTree& t, int agent_player)
      : tree(&t), agent(agent_player), opp(opponent_of(agent_player)) {
    nx = t.num_sequences(agent);
    ny = t.num_sequences(opp);
    mq = 1 + static_cast<int>(t.player_infosets(opp).size());
    mE = 1 + static_cast<int>(t.player_infosets(agent).size());

    payoff.assign(static_cast<size_t>(nx) * ny, 0.0);
    for (const TerminalEntry& term : t.terminals()) {
      double u = agent == kPlayer1 ? term.utility : -term.utility;
      payoff[static_cast<size_t>(term.seq[agent]) * ny + term.seq[opp]] +=
          term.chance_prob * u;
    }

    ft.assign(static_cast<size_t>(ny) * mq, 0.0);
    ft[0 * mq + 0] = 1.0;  // F row 0: y_0 = 1
    auto opp_sets = t.player_infosets(opp);
    for (size_t j = 0; j < opp_sets.size(); ++j) {
      const Infoset& is = t.infoset(opp_sets[j]);
      ft[static_cast<size_t>(is.parent_seq) * mq + (1 + j)] -= 1.0;
      for (size_t a = 0; a < is.actions.size(); ++a) {
        ft[static_cast<size_t>(is.first_seq + a) * mq + (1 + j)] += 1.0;
      }
    }
  }

  // Solves max obj over the agent's plans x subject to
  //   min over opponent plans y of x'Ay >= bound         (when bounded)
  // where obj is either x'Ay_model (obj_x given) or the guaranteed value
  // itself (obj_x null; used for the game value).
  // Returns the optimal plan in x_out and the objective value.
  double solve(const double* obj_x, bool bounded, double bound,
               std::vector<double>& x_out) {
    int n = nx + 2 * mq + ny + (bounded ? 1 : 0);
    int m = mE + ny + (bounded ? 1 : 0);
    M.assign(static_cast<size_t>(m) * n, 0.0);
    b.assign(m, 0.0);
    c.assign(n, 0.0);
    z.assign(n, 0.0);

    const int qp = nx, qm = nx + mq, s1 = nx + 2 * mq, s2 = nx + 2 * mq + ny;
    auto row = [&](int r) { return M.data() + static_cast<size_t>(r) * n; };

    // E x = e.
    row(0)[0] = 1.0;
    b[0] = 1.0;
    auto agent_sets = tree->player_infosets(agent);
    for (size_t j = 0; j < agent_sets.size(); ++j) {
      const Infoset& is = tree->infoset(agent_sets[j]);
      double* r = row(1 + static_cast<int>(j));
      r[is.parent_seq] -= 1.0;
      for (size_t a = 0; a < is.actions.size(); ++a) r[is.first_seq + a] += 1.0;
    }
    // A^T x - F^T q - s1 = 0, one row per opponent sequence.
    for (int t = 0; t < ny; ++t) {
      double* r = row(mE + t);
      for (int s = 0; s < nx; ++s) r[s] = payoff[static_cast<size_t>(s) * ny + t];
      for (int k = 0; k < mq; ++k) {
        double f = ft[static_cast<size_t>(t) * mq + k];
        r[qp + k] -= f;
        r[qm + k] += f;
      }
      r[s1 + t] = -1.0;
    }
    if (bounded) {
      double* r = row(mE + ny);
      r[qp] = 1.0;
      r[qm] = -1.0;
      r[s2] = -1.0;
      b[mE + ny] = bound;
    }

    if (obj_x != nullptr) {
      for (int s = 0; s < nx; ++s) c[s] = -obj_x[s];
    } else {
      c[qp] = -1.0;
      c[qm] = 1.0;
    }

    SimplexSolver::Status status = solver.solve(m, n, M.data(), b.data(),
                                                c.data(), z.data());
    if (status != SimplexSolver::Status::Optimal) {
      throw std::runtime_error("sequence-form LP did not solve (status " +
                               std::to_string(static_cast<int>(status)) + ")");
    }
    x_out.assign(z.begin(), z.begin() + nx);
    return -solver.objective();
  }

  BehavioralStrategy extract(const std::vector<double>& x) const {
    RealizationPlan plan;
    plan.player = agent;
    plan.weights = x;
    return to_behavioral(*tree, plan);
  }
};

}  // namespace detail

LpSolution solve_game_lp(const GameTree& tree, int player) {
  detail::SeqLp lp(tree, player);
  std::vector<double> x;
  LpSolution out;
  out.value = lp.solve(nullptr, false, 0.0, x);
  out.strategy = lp.extract(x);
  return out;
}

Money game_value_lp(const GameTree& tree, int player) {
  detail::SeqLp lp(tree, player);
  std::vector<double> x;
  return lp.solve(nullptr, false, 0.0, x);
}

Money exploitability(const GameTree& tree, int player,
                     const BehavioralStrategy& s) {
  Money v = game_value_lp(tree, player);
  Money wc = worst_case_value(tree, player, s);
  Money expl = v - wc;
  if (expl < 0) {
    if (expl < -1e-9) {
      throw std::logic_error("exploitability below -1e-9; oracle inconsistency");
    }
    expl = 0;
  }
  return expl;
}

ValueReport value_report(const GameTree& tree, int player,
                         const BehavioralStrategy& s) {
  ValueReport report;
  report.game_value = game_value_lp(tree, player);
  BestResponder br(tree);
  BestResponseResult nemesis = br.solve(opponent_of(player), s);
  report.worst_case = -nemesis.value;
  report.nemesis = std::move(nemesis.strategy);
  report.exploitability = report.game_value - report.worst_case;
  if (report.exploitability < 0) {
    if (report.exploitability < -1e-9) {
      throw std::logic_error("exploitability below -1e-9; oracle inconsistency");
    }
    report.exploitability = 0;
  }
  return report;
}

namespace {

std::vector<ForcedAction> observed_actions(const HandRecord& hand, int player) {
  std::vector<ForcedAction> forced;
  for (const HandStep& step : hand.steps) {
    if (step.player == player) forced.push_back({step.infoset, step.action});
  }
  return forced;
}

}  // namespace

ConstrainedResponse constrained_best_response(const GameTree& tree,
                                              const BehavioralStrategy& s,
                                              const HandRecord& hand) {
  validate_hand(tree, hand);
  int responder = opponent_of(s.player());
  std::vector<ForcedAction> forced = observed_actions(hand, responder);
  BestResponder br(tree);
  BestResponseResult r = br.solve(responder, s, forced);
  return ConstrainedResponse{std::move(r.strategy), -r.value};
}

Money constrained_gift_value(const GameTree& tree, const BehavioralStrategy& s,
                             const HandRecord& hand, BestResponder* scratch) {
  validate_hand(tree, hand);
  int responder = opponent_of(s.player());
  std::vector<ForcedAction> forced = observed_actions(hand, responder);
  if (scratch != nullptr) return -scratch->value(responder, s, forced);
  BestResponder br(tree);
  return -br.value(responder, s, forced);
}

SafeBestResponder::SafeBestResponder(const GameTree& tree, int agent)
    : tree_(&tree), agent_(agent), br_(tree),
      lp_(std::make_unique<detail::SeqLp>(tree, agent)) {}

SafeBestResponder::~SafeBestResponder() = default;
SafeBestResponder::SafeBestResponder(SafeBestResponder&&) noexcept = default;
SafeBestResponder& SafeBestResponder::operator=(SafeBestResponder&&) noexcept =
    default;

SafeBestResponder::Outcome SafeBestResponder::solve(
    const BehavioralStrategy& model, Money k, Money v_prime) {
  if (!(k >= 0)) throw std::invalid_argument("safe_best_response: k must be >= 0");
  if (model.player() != opponent_of(agent_)) {
    throw std::invalid_argument("safe_best_response: model must be the opponent's strategy");
  }

  Outcome out;
  BestResponseResult candidate = br_.solve(agent_, model);
  out.candidate_worst_case = -br_.value(opponent_of(agent_), candidate.strategy);
  if (out.candidate_worst_case >= v_prime - k) {
    // The unconstrained best response is already prime-safe enough.
    out.strategy = std::move(candidate.strategy);
    out.used_lp = false;
    return out;
  }

  RealizationPlan model_plan = to_realization_plan(*tree_, model);
  std::vector<double> obj(lp_->nx, 0.0);
  for (int s = 0; s < lp_->nx; ++s) {
    const double* row = lp_->payoff.data() + static_cast<size_t>(s) * lp_->ny;
    double acc = 0;
    for (int t = 0; t < lp_->ny; ++t) acc += row[t] * model_plan.weights[t];
    obj[s] = acc;
  }
  std::vector<double> x;
  lp_->solve(obj.data(), true, v_prime - k, x);
  out.strategy = lp_->extract(x);
  out.used_lp = true;
  return out;
}

BehavioralStrategy safe_best_response(const GameTree& tree,
                                      const BehavioralStrategy& model,
                                      Money k, Money v_prime) {
  SafeBestResponder responder(tree, opponent_of(model.player()));
  return responder.solve(model, k, v_prime).strategy;
}

}  // namespace psafe
