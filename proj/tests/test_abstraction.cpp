#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "psafe/abstraction.hpp"
#include "psafe/mccfr.hpp"
#include "psafe/value_oracle.hpp"
#include "test_util.hpp"

using namespace psafe;
using namespace psafe::testing;

namespace {

GameSpec spec_of(int cards, std::vector<int> bets) {
  GameSpec spec;
  spec.card_count = cards;
  spec.bet_sizes = std::move(bets);
  return spec;
}

}  // namespace

TEST_CASE("card buckets: contiguous, near-even, deterministic placement") {
  // Even split.
  BucketMap m3 = build_card_buckets(6, 3);
  CHECK(m3.card_bucket == std::vector<int>{3, 3, 2, 2, 1, 1});  // rank 0 = 9
  CHECK(m3.card_members[0] == std::vector<int>{5, 4});          // {A,K} -> 1

  // A single extra card joins the weakest bucket.
  BucketMap m5 = build_card_buckets(6, 5);
  CHECK(m5.card_bucket == std::vector<int>{5, 5, 4, 3, 2, 1});  // {T,9} -> 5

  // Two extras tile from the strong end.
  BucketMap m4 = build_card_buckets(6, 4);
  CHECK(m4.card_bucket == std::vector<int>{4, 3, 2, 2, 1, 1});  // {A,K},{Q,J},{T},{9}

  // Identity.
  BucketMap m6 = build_card_buckets(6, 6);
  for (int r = 0; r < 6; ++r) CHECK(m6.card_bucket[r] == 6 - r);

  CHECK_THROWS_AS(build_card_buckets(6, 1), std::invalid_argument);
  CHECK_THROWS_AS(build_card_buckets(6, 7), std::invalid_argument);
}

TEST_CASE("bet buckets: contiguous partitions of the ascending size list") {
  BucketMap b2 = build_bet_buckets({1, 2, 3, 4}, 2);
  CHECK(b2.bet_members[0] == std::vector<int>{1, 2});
  CHECK(b2.bet_members[1] == std::vector<int>{3, 4});
  CHECK(b2.abstract_bets == std::vector<int>{1, 3});

  BucketMap b1 = build_bet_buckets({1, 2, 3, 4}, 1);
  CHECK(b1.bet_members[0] == std::vector<int>{1, 2, 3, 4});

  BucketMap b4 = build_bet_buckets({1, 2, 3, 4}, 4);
  for (int i = 0; i < 4; ++i) CHECK(b4.bet_bucket[i] == i + 1);

  // A single extra size joins the middle bucket.
  BucketMap b3 = build_bet_buckets({1, 2, 3, 4}, 3);
  CHECK(b3.bet_members[0] == std::vector<int>{1});
  CHECK(b3.bet_members[1] == std::vector<int>{2, 3});
  CHECK(b3.bet_members[2] == std::vector<int>{4});

  CHECK_THROWS_AS(build_bet_buckets({1, 2, 3, 4}, 0), std::invalid_argument);
  CHECK_THROWS_AS(build_bet_buckets({1, 2, 3, 4}, 5), std::invalid_argument);
}

TEST_CASE("lifting through the identity map copies the strategy") {
  GameSpec spec = spec_of(3, {1, 2});
  GameTree tree = build_game(spec);
  GameTree same = build_game(spec);
  Rng rng(17);
  BehavioralStrategy s = random_strategy(tree, kPlayer1, rng);
  BehavioralStrategy lifted = lift_strategy(tree, same, BucketMap{}, s);
  for (int id : same.player_infosets(kPlayer1)) {
    auto a = lifted.at(id);
    auto b = s.at_key(same.infoset(id).key);
    for (size_t i = 0; i < a.size(); ++i) CHECK(a[i] == doctest::Approx(b[i]));
  }
}

TEST_CASE("an abstract bet action splits uniformly over its bucket") {
  GameSpec spec = spec_of(3, {1, 2});
  BucketMap map = build_bet_buckets({1, 2}, 1);
  GameTree full = build_game(spec);
  GameTree abstract = build_abstract_game(spec, map);

  // Give the abstract bet 0.6 at the root of every card.
  BehavioralStrategy s(abstract, kPlayer1);
  for (int id : abstract.player_infosets(kPlayer1)) {
    auto probs = s.at(id);
    if (abstract.infoset(id).actions.size() == 2 &&
        abstract.infoset(id).actions[1].kind == Action::Kind::Bet) {
      probs[0] = 0.4;
      probs[1] = 0.6;
    } else {
      probs[0] = 1.0;
    }
  }
  s.validate();

  BehavioralStrategy lifted = lift_strategy(abstract, full, map, s);
  CHECK_NOTHROW(lifted.validate());
  auto root = lifted.at_key("1|A|");
  REQUIRE(root.size() == 3);  // k, b1, b2
  CHECK(root[0] == doctest::Approx(0.4));
  CHECK(root[1] == doctest::Approx(0.3));
  CHECK(root[2] == doctest::Approx(0.3));
}

TEST_CASE("lifted strategies stay normalized on every infoset") {
  GameSpec spec = spec_of(6, {1, 2, 3, 4});
  Rng rng(55);
  for (const char* rung_text : {"cards=3", "cards=4", "cards=5", "bets=2", "bets=3"}) {
    AbstractionRung rung = AbstractionRung::parse(rung_text);
    BucketMap map = rung.bucket_map(spec);
    GameTree full = build_game(spec);
    GameTree abstract = rung.build_tree(spec);
    for (int player : {kPlayer1, kPlayer2}) {
      BehavioralStrategy s = random_strategy(abstract, player, rng);
      BehavioralStrategy lifted = lift_strategy(abstract, full, map, s);
      CHECK_NOTHROW(lifted.validate());
    }
  }
}

TEST_CASE("lift rejects mismatched inputs") {
  GameSpec six = spec_of(6, {1});
  GameSpec three = spec_of(3, {1});
  GameTree full = build_game(six);
  GameTree other = build_game(three);
  BehavioralStrategy s = uniform_strategy(other, kPlayer1);
  CHECK_THROWS_AS(lift_strategy(other, full, BucketMap{}, s),
                  std::invalid_argument);
  BucketMap map = build_card_buckets(6, 3);
  CHECK_THROWS_AS(lift_strategy(other, full, map, s), std::invalid_argument);
}

TEST_CASE("rung parsing round trips") {
  for (const char* text : {"none", "cards=3", "bets=2"}) {
    CHECK(AbstractionRung::parse(text).to_string() == text);
  }
  CHECK_THROWS(AbstractionRung::parse("cards"));
  CHECK_THROWS(AbstractionRung::parse("decks=3"));
  GameSpec spec = spec_of(6, {1});
  CHECK_THROWS(AbstractionRung::parse("cards=1").bucket_map(spec));
  CHECK_THROWS(AbstractionRung::parse("cards=7").bucket_map(spec));
}

TEST_CASE("worst case degrades monotonically along a quick ladder") {
  // Desk-size version of the ladder audit; seeds and budgets are small, the
  // acceptance suite runs the full version.
  GameSpec spec = spec_of(6, {1});
  GameTree full = build_game(spec);
  SolveBudget budget;
  budget.max_iterations = 2'000'000;
  budget.exploitability_threshold = 1e-3;
  double previous = 1e300;
  for (const char* rung_text : {"none", "cards=5", "cards=4", "cards=3"}) {
    AbstractionRung rung = AbstractionRung::parse(rung_text);
    GameTree abstract = rung.build_tree(spec);
    Profile profile = mccfr_train_to_budget(abstract, budget, 12345);
    BehavioralStrategy lifted =
        lift_strategy(abstract, full, rung.bucket_map(spec), profile.p1);
    double vp = worst_case_value(full, kPlayer1, lifted);
    CHECK(vp < previous);
    previous = vp;
  }
}
