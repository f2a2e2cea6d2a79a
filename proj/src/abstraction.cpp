#include "psafe/abstraction.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace psafe {

int BucketMap::abstract_bet(int full_size) const {
  for (size_t i = 0; i < full_bets.size(); ++i) {
    if (full_bets[i] == full_size) return abstract_bets[bet_bucket[i] - 1];
  }
  throw std::invalid_argument("abstract_bet: unknown bet size " +
                              std::to_string(full_size));
}

int BucketMap::bet_bucket_size(int full_size) const {
  for (size_t i = 0; i < full_bets.size(); ++i) {
    if (full_bets[i] == full_size) {
      return static_cast<int>(bet_members[bet_bucket[i] - 1].size());
    }
  }
  throw std::invalid_argument("bet_bucket_size: unknown bet size " +
                              std::to_string(full_size));
}

BucketMap build_card_buckets(int full_count, int abstract_count) {
  if (abstract_count < 2 || abstract_count > full_count) {
    throw std::invalid_argument("build_card_buckets: need 2 <= abstract <= full");
  }
  BucketMap map;
  map.full_cards = full_count;
  map.abstract_cards = abstract_count;
  map.card_bucket.assign(full_count, 0);
  map.card_members.assign(abstract_count, {});

  int base = full_count / abstract_count;
  int rem = full_count % abstract_count;
  // A lone extra card goes to the weakest bucket (merging the top ranks is
  // strategically free and would flatten the abstraction ladder); with more
  // extras the larger buckets tile from the strong end.
  int rank = full_count - 1;
  for (int bucket = 1; bucket <= abstract_count; ++bucket) {
    int size = base;
    if (rem == 1 ? bucket == abstract_count : bucket <= rem) size += 1;
    for (int i = 0; i < size; ++i) {
      map.card_bucket[rank] = bucket;
      map.card_members[bucket - 1].push_back(rank);
      --rank;
    }
  }
  return map;
}

BucketMap build_bet_buckets(const std::vector<int>& full_bets,
                            int abstract_count) {
  int n = static_cast<int>(full_bets.size());
  if (abstract_count < 1 || abstract_count > n) {
    throw std::invalid_argument("build_bet_buckets: need 1 <= abstract <= |bets|");
  }
  BucketMap map;
  map.full_bets = full_bets;
  map.bet_bucket.assign(n, 0);
  map.bet_members.assign(abstract_count, {});

  int base = n / abstract_count;
  int rem = n % abstract_count;
  // A lone extra size goes to the middle bucket (merging either end is
  // strategically near-free and would flatten the abstraction ladder); with
  // more extras the larger buckets tile from the small end.
  int middle = (abstract_count + 1) / 2;
  int idx = 0;
  for (int bucket = 1; bucket <= abstract_count; ++bucket) {
    int size = base;
    if (rem == 1 ? bucket == middle : bucket <= rem) size += 1;
    for (int i = 0; i < size; ++i) {
      map.bet_bucket[idx] = bucket;
      map.bet_members[bucket - 1].push_back(full_bets[idx]);
      ++idx;
    }
  }
  // Each bucket is labelled by its smallest member.
  for (const std::vector<int>& members : map.bet_members) {
    map.abstract_bets.push_back(members.front());
  }
  return map;
}

GameTree build_abstract_game(const GameSpec& full, const BucketMap& map) {
  if (map.has_cards() && map.full_cards != full.card_count) {
    throw std::invalid_argument("abstract game: card map does not match the spec");
  }
  if (map.has_bets() && map.full_bets != full.bet_sizes) {
    throw std::invalid_argument("abstract game: bet map does not match the spec");
  }
  return build_bucketed_game(full, map.card_bucket,
                             map.has_bets() ? map.bet_members
                                            : std::vector<std::vector<int>>{});
}

namespace {

// Effective mappings after resolving identity dimensions against the trees.
struct ResolvedMap {
  const BucketMap* map;
  const GameTree* full_tree;
  bool cards_identity;
  bool bets_identity;

  std::string abstract_card_label(int full_rank) const {
    if (cards_identity) return full_tree->card_name(full_rank);
    return card_bucket_label(map->card_bucket[full_rank], map->abstract_cards);
  }
  int abstract_bet(int full_size) const {
    return bets_identity ? full_size : map->abstract_bet(full_size);
  }
  int bet_split(int full_size) const {
    return bets_identity ? 1 : map->bet_bucket_size(full_size);
  }
};

ResolvedMap resolve(const GameTree& abstract_tree, const GameTree& full_tree,
                    const BucketMap& map) {
  ResolvedMap r{&map, &full_tree, !map.has_cards(), !map.has_bets()};
  // Both trees describe the same underlying game; the abstract one merges
  // information per the map.
  if (abstract_tree.spec() != full_tree.spec()) {
    throw std::invalid_argument("lift: the trees are not the same underlying game");
  }
  if (!r.cards_identity && map.full_cards != full_tree.spec().card_count) {
    throw std::invalid_argument("lift: card bucket map does not match the trees");
  }
  if (!r.bets_identity && map.full_bets != full_tree.spec().bet_sizes) {
    throw std::invalid_argument("lift: bet bucket map does not match the trees");
  }
  return r;
}

}  // namespace

BehavioralStrategy lift_strategy(const GameTree& abstract_tree,
                                 const GameTree& full_tree,
                                 const BucketMap& map,
                                 const BehavioralStrategy& abstract_strategy) {
  if (abstract_strategy.tree() != &abstract_tree) {
    throw std::invalid_argument("lift: strategy is not for the abstract tree");
  }
  ResolvedMap resolved = resolve(abstract_tree, full_tree, map);
  int player = abstract_strategy.player();
  BehavioralStrategy lifted(full_tree, player);

  for (int is_id : full_tree.player_infosets(player)) {
    const Infoset& full_is = full_tree.infoset(is_id);
    // Map the key: bucket the private card and every bet in the history.
    std::string abs_key = std::to_string(player + 1) + "|" +
                          resolved.abstract_card_label(full_is.card) + "|";
    for (size_t i = 0; i < full_is.history.size(); ++i) {
      Action a = full_is.history[i];
      if (a.kind == Action::Kind::Bet) {
        a.bet_size = resolved.abstract_bet(a.bet_size);
      }
      if (i > 0) abs_key += ',';
      abs_key += a.token();
    }
    int abs_is = abstract_tree.infoset_by_key(abs_key);
    if (abs_is < 0) {
      throw std::invalid_argument("lift: full infoset " + full_is.key +
                                  " has no abstract image " + abs_key);
    }

    const Infoset& abstract_is = abstract_tree.infoset(abs_is);
    auto abs_probs = abstract_strategy.at(abs_is);
    auto out = lifted.at(is_id);
    for (size_t a = 0; a < full_is.actions.size(); ++a) {
      const Action& act = full_is.actions[a];
      if (act.kind == Action::Kind::Bet) {
        int abs_size = resolved.abstract_bet(act.bet_size);
        double p = 0;
        for (size_t b = 0; b < abstract_is.actions.size(); ++b) {
          if (abstract_is.actions[b].kind == Action::Kind::Bet &&
              abstract_is.actions[b].bet_size == abs_size) {
            p = abs_probs[b];
            break;
          }
        }
        out[a] = p / resolved.bet_split(act.bet_size);
      } else {
        double p = 0;
        bool found = false;
        for (size_t b = 0; b < abstract_is.actions.size(); ++b) {
          if (abstract_is.actions[b].kind == act.kind) {
            p = abs_probs[b];
            found = true;
            break;
          }
        }
        if (!found) {
          throw std::invalid_argument("lift: action " + act.token() +
                                      " missing at " + abs_key);
        }
        out[a] = p;
      }
    }
    double sum = 0;
    for (double p : out) sum += p;
    if (std::abs(sum - 1.0) > 1e-9) {
      throw std::logic_error("lift: probabilities at " + full_is.key +
                             " sum to " + std::to_string(sum));
    }
    for (double& p : out) p /= sum;
  }
  lifted.validate();
  return lifted;
}

std::string AbstractionRung::to_string() const {
  switch (kind) {
    case Kind::None: return "none";
    case Kind::Cards: return "cards=" + std::to_string(count);
    case Kind::Bets: return "bets=" + std::to_string(count);
  }
  return "none";
}

AbstractionRung AbstractionRung::parse(const std::string& text) {
  AbstractionRung rung;
  if (text == "none" || text.empty()) return rung;
  auto eq = text.find('=');
  if (eq == std::string::npos) {
    throw std::invalid_argument("abstraction: expected none, cards=<n> or bets=<n>");
  }
  std::string key = text.substr(0, eq);
  int count = std::stoi(text.substr(eq + 1));
  if (key == "cards") {
    rung.kind = Kind::Cards;
  } else if (key == "bets") {
    rung.kind = Kind::Bets;
  } else {
    throw std::invalid_argument("abstraction: unknown dimension '" + key + "'");
  }
  rung.count = count;
  return rung;
}

BucketMap AbstractionRung::bucket_map(const GameSpec& full) const {
  switch (kind) {
    case Kind::None: return BucketMap{};
    case Kind::Cards: return build_card_buckets(full.card_count, count);
    case Kind::Bets: return build_bet_buckets(full.bet_sizes, count);
  }
  return BucketMap{};
}

GameTree AbstractionRung::build_tree(const GameSpec& full) const {
  if (kind == Kind::None) return build_game(full);
  return build_abstract_game(full, bucket_map(full));
}

}  // namespace psafe
