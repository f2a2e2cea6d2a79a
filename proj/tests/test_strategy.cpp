#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "psafe/strategy.hpp"
#include "test_util.hpp"

using namespace psafe;
using namespace psafe::testing;

namespace {

GameTree kuhn3() {
  GameSpec spec;
  spec.card_count = 3;
  spec.bet_sizes = {1};
  return build_game(spec);
}

GameTree fourbet() {
  GameSpec spec;
  spec.card_count = 3;
  spec.bet_sizes = {1, 2, 3, 4};
  return build_game(spec);
}

}  // namespace

TEST_CASE("uniform strategy spreads mass evenly") {
  GameTree tree = kuhn3();
  BehavioralStrategy u = uniform_strategy(tree, kPlayer1);
  auto root = u.at_key("1|A|");
  CHECK(root[0] == doctest::Approx(0.5));
  CHECK(root[1] == doctest::Approx(0.5));
  CHECK_NOTHROW(u.validate());

  GameTree big = fourbet();
  BehavioralStrategy u4 = uniform_strategy(big, kPlayer1);
  auto root4 = u4.at_key("1|A|");
  REQUIRE(root4.size() == 5);
  for (double p : root4) CHECK(p == doctest::Approx(0.2));
  CHECK_NOTHROW(u4.validate());
}

TEST_CASE("strategy validation catches bad vectors") {
  GameTree tree = kuhn3();
  BehavioralStrategy s = uniform_strategy(tree, kPlayer1);
  s.at(tree.infoset_by_key("1|A|"))[0] = 0.7;  // sums to 1.2
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s.at(tree.infoset_by_key("1|A|"))[0] = -0.5;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  CHECK_THROWS_AS(uniform_strategy(tree, kPlayer1).at_key("2|A|b1"),
                  std::invalid_argument);
}

TEST_CASE("expected utility of the exact equilibrium profile is -1/18") {
  GameTree tree = kuhn3();
  BehavioralStrategy p1 = kuhn3_equilibrium_p1(tree);
  BehavioralStrategy p2 = kuhn3_equilibrium_p2(tree);
  CHECK(expected_utility(tree, p1, p2) == doctest::Approx(-1.0 / 18.0).epsilon(1e-12));
}

TEST_CASE("expected utility rejects foreign strategies") {
  GameTree tree = kuhn3();
  GameTree other = kuhn3();
  BehavioralStrategy u1 = uniform_strategy(tree, kPlayer1);
  BehavioralStrategy u2_other = uniform_strategy(other, kPlayer2);
  CHECK_THROWS_AS(expected_utility(tree, u1, u2_other), std::invalid_argument);
  CHECK_THROWS_AS(expected_utility(tree, u1, u1), std::invalid_argument);
}

TEST_CASE("expected utility is bilinear in each argument") {
  GameTree tree = fourbet();
  Rng rng(402);
  for (int trial = 0; trial < 5; ++trial) {
    BehavioralStrategy a = random_strategy(tree, kPlayer1, rng);
    BehavioralStrategy b = random_strategy(tree, kPlayer1, rng);
    BehavioralStrategy s2 = random_strategy(tree, kPlayer2, rng);
    double ua = expected_utility(tree, a, s2);
    double ub = expected_utility(tree, b, s2);
    // Strategy mixtures live in realization space; u is linear there.
    RealizationPlan pa = to_realization_plan(tree, a);
    RealizationPlan pb = to_realization_plan(tree, b);
    RealizationPlan ps2 = to_realization_plan(tree, s2);
    for (double lambda : {0.0, 0.5, 1.0}) {
      double expect = lambda * ua + (1 - lambda) * ub;
      double direct = 0;
      for (const TerminalEntry& t : tree.terminals()) {
        double w = lambda * pa.weights[t.seq[0]] + (1 - lambda) * pb.weights[t.seq[0]];
        direct += t.chance_prob * t.utility * w * ps2.weights[t.seq[1]];
      }
      CHECK(direct == doctest::Approx(expect).epsilon(1e-10));
    }
  }
}

TEST_CASE("expected utility agrees with the sequence-form product") {
  GameTree tree = fourbet();
  Rng rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    BehavioralStrategy s1 = random_strategy(tree, kPlayer1, rng);
    BehavioralStrategy s2 = random_strategy(tree, kPlayer2, rng);
    RealizationPlan x = to_realization_plan(tree, s1);
    RealizationPlan y = to_realization_plan(tree, s2);
    double via_seq = 0;
    for (const TerminalEntry& t : tree.terminals()) {
      via_seq += t.chance_prob * t.utility * x.weights[t.seq[0]] * y.weights[t.seq[1]];
    }
    CHECK(expected_utility(tree, s1, s2) == doctest::Approx(via_seq).epsilon(1e-12));
  }
}

TEST_CASE("sampling is deterministic per seed and covers both cards") {
  GameTree tree = kuhn3();
  BehavioralStrategy u1 = uniform_strategy(tree, kPlayer1);
  BehavioralStrategy u2 = uniform_strategy(tree, kPlayer2);
  Rng a(99), b(99);
  for (int i = 0; i < 50; ++i) {
    HandRecord ha = sample_hand(tree, u1, u2, a);
    HandRecord hb = sample_hand(tree, u1, u2, b);
    CHECK(ha.terminal == hb.terminal);
    CHECK(ha.p1_card == hb.p1_card);
    CHECK(ha.p2_card == hb.p2_card);
    CHECK(ha.steps.size() == hb.steps.size());
  }
}

TEST_CASE("the opponent card is revealed even after folds") {
  GameTree tree = kuhn3();
  BehavioralStrategy bettor(tree, kPlayer1);
  for (int id : tree.player_infosets(kPlayer1)) {
    auto probs = bettor.at(id);
    // Always bet, always fold when raised (the latter never happens).
    if (tree.infoset(id).actions[0].kind == Action::Kind::Check) {
      probs[1] = 1.0;
    } else {
      probs[1] = 1.0;
    }
  }
  BehavioralStrategy folder(tree, kPlayer2);
  for (int id : tree.player_infosets(kPlayer2)) {
    auto probs = folder.at(id);
    if (tree.infoset(id).actions[0].kind == Action::Kind::Call) {
      probs[1] = 1.0;  // fold to the bet
    } else {
      probs[0] = 1.0;
    }
  }
  Rng rng(3);
  for (int i = 0; i < 20; ++i) {
    HandRecord hand = sample_hand(tree, bettor, folder, rng);
    CHECK(hand.utility == doctest::Approx(1.0));
    CHECK(hand.p2_card >= 0);  // theta present despite the fold
    CHECK(hand.revealed_card(kPlayer1) == hand.p2_card);
  }
}

TEST_CASE("sampled deal frequencies pass a chi-square uniformity check") {
  GameTree tree = kuhn3();
  BehavioralStrategy u1 = uniform_strategy(tree, kPlayer1);
  BehavioralStrategy u2 = uniform_strategy(tree, kPlayer2);
  Rng rng(1234);
  const int n = 1'000'000;
  std::map<std::pair<int, int>, int> counts;
  for (int i = 0; i < n; ++i) {
    HandRecord hand = sample_hand(tree, u1, u2, rng);
    counts[{hand.p1_card, hand.p2_card}] += 1;
  }
  REQUIRE(counts.size() == 6);
  double expected = n / 6.0;
  double chi2 = 0;
  for (const auto& [deal, c] : counts) {
    chi2 += (c - expected) * (c - expected) / expected;
  }
  // 99% quantile of chi-square with 5 degrees of freedom.
  CHECK(chi2 < 15.086);
}

TEST_CASE("sampled mean matches expected utility within three standard errors") {
  GameTree tree = kuhn3();
  Rng strat_rng(2024);
  BehavioralStrategy s1 = random_strategy(tree, kPlayer1, strat_rng);
  BehavioralStrategy s2 = random_strategy(tree, kPlayer2, strat_rng);
  double exact = expected_utility(tree, s1, s2);
  Rng rng(77);
  const int n = 1'000'000;
  double sum = 0, sumsq = 0;
  for (int i = 0; i < n; ++i) {
    HandRecord hand = sample_hand(tree, s1, s2, rng);
    sum += hand.utility;
    sumsq += hand.utility * hand.utility;
  }
  double mean = sum / n;
  double sd = std::sqrt((sumsq - n * mean * mean) / (n - 1));
  CHECK(std::abs(mean - exact) < 3.0 * sd / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("realization plans: weights, flow, and round trip") {
  GameTree tree = kuhn3();
  BehavioralStrategy u1 = uniform_strategy(tree, kPlayer1);
  RealizationPlan plan = to_realization_plan(tree, u1);
  CHECK(plan.weights[0] == doctest::Approx(1.0));
  // A single decision: betting with any card carries weight 1/2.
  const Infoset& root_a = tree.infoset(tree.infoset_by_key("1|A|"));
  CHECK(plan.weights[root_a.first_seq + 1] == doctest::Approx(0.5));

  // Flow conservation at every infoset.
  for (int id : tree.player_infosets(kPlayer1)) {
    const Infoset& is = tree.infoset(id);
    double sum = 0;
    for (size_t a = 0; a < is.actions.size(); ++a) sum += plan.weights[is.first_seq + a];
    CHECK(sum == doctest::Approx(plan.weights[is.parent_seq]).epsilon(1e-12));
  }

  // Round trip is the identity wherever reach is positive.
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    GameTree big = fourbet();
    BehavioralStrategy s = random_strategy(big, kPlayer1, rng);
    RealizationPlan p = to_realization_plan(big, s);
    BehavioralStrategy back = to_behavioral(big, p);
    RealizationPlan p2 = to_realization_plan(big, back);
    for (size_t i = 0; i < p.weights.size(); ++i) {
      if (p.weights[i] > 0) {
        CHECK(p2.weights[i] == doctest::Approx(p.weights[i]).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("strategy text format round trips and validates") {
  GameTree tree = fourbet();
  Rng rng(404);
  BehavioralStrategy s1 = random_strategy(tree, kPlayer1, rng);
  BehavioralStrategy s2 = random_strategy(tree, kPlayer2, rng);
  std::ostringstream out;
  std::vector<BehavioralStrategy> both{s1, s2};
  save_strategies(out, tree, both);

  // Lines are sorted by key.
  std::istringstream lines(out.str());
  std::string prev, line;
  while (std::getline(lines, line)) {
    CHECK(prev < line);
    prev = line;
  }

  std::istringstream in1(out.str());
  BehavioralStrategy r1 = load_strategy(in1, tree, kPlayer1);
  std::istringstream in2(out.str());
  BehavioralStrategy r2 = load_strategy(in2, tree, kPlayer2);
  for (size_t i = 0; i < s1.raw().size(); ++i) {
    CHECK(r1.raw()[i] == doctest::Approx(s1.raw()[i]).epsilon(1e-9));
  }
  for (size_t i = 0; i < s2.raw().size(); ++i) {
    CHECK(r2.raw()[i] == doctest::Approx(s2.raw()[i]).epsilon(1e-9));
  }
}

TEST_CASE("the loader renormalizes tiny drift and rejects the rest") {
  GameTree tree = kuhn3();
  // Slightly off mass is renormalized.
  std::string good =
      "1|A| k:0.5 b1:0.5000000005\n1|K| k:1 b1:0\n1|Q| k:0.666 b1:0.334\n"
      "1|A|k,b1 c:1 f:0\n1|K|k,b1 c:0.5 f:0.5\n1|Q|k,b1 c:0 f:1\n";
  std::istringstream in(good);
  BehavioralStrategy s = load_strategy(in, tree, kPlayer1);
  auto root = s.at_key("1|A|");
  CHECK(root[0] + root[1] == doctest::Approx(1.0).epsilon(1e-15));

  // Off by more than 1e-9: rejected.
  std::string bad =
      "1|A| k:0.5 b1:0.6\n1|K| k:1 b1:0\n1|Q| k:0.666 b1:0.334\n"
      "1|A|k,b1 c:1 f:0\n1|K|k,b1 c:0.5 f:0.5\n1|Q|k,b1 c:0 f:1\n";
  std::istringstream in_bad(bad);
  CHECK_THROWS(load_strategy(in_bad, tree, kPlayer1));

  // Missing infoset: rejected.
  std::string missing = "1|A| k:0.5 b1:0.5\n";
  std::istringstream in_missing(missing);
  CHECK_THROWS(load_strategy(in_missing, tree, kPlayer1));

  // Unknown key: rejected.
  std::string unknown = "1|A|zzz k:0.5 b1:0.5\n";
  std::istringstream in_unknown(unknown);
  CHECK_THROWS(load_strategy(in_unknown, tree, kPlayer1));

  // Negative probability: rejected.
  std::string negative =
      "1|A| k:1.5 b1:-0.5\n1|K| k:1 b1:0\n1|Q| k:0.666 b1:0.334\n"
      "1|A|k,b1 c:1 f:0\n1|K|k,b1 c:0.5 f:0.5\n1|Q|k,b1 c:0 f:1\n";
  std::istringstream in_negative(negative);
  CHECK_THROWS(load_strategy(in_negative, tree, kPlayer1));
}
