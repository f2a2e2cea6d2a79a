#include "psafe/harness.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "psafe/value_oracle.hpp"

namespace psafe {

namespace {

std::string format_g(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::string format_f4(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

}  // namespace

void ExperimentConfig::validate() const {
  game.validate();
  if (hands < 1) throw std::invalid_argument("config: hands must be >= 1");
  if (repetitions < 1) throw std::invalid_argument("config: repetitions must be >= 1");
  if (abstraction.empty() || algorithm.empty() || opponent.empty()) {
    throw std::invalid_argument("config: needs at least one algorithm, abstraction and opponent");
  }
  for (const AbstractionRung& rung : abstraction) rung.bucket_map(game);
  for (const OpponentSpec& spec : opponent) spec.validate();
  for (const std::string& fmt : output.formats) {
    if (fmt != "csv" && fmt != "markdown") {
      throw std::invalid_argument("config: unknown output format '" + fmt + "'");
    }
  }
}

namespace {

using nlohmann::json;

SolveBudget budget_from_json(const json& j, SolveBudget base) {
  if (j.contains("max_iterations")) base.max_iterations = j["max_iterations"].get<std::uint64_t>();
  if (j.contains("exploitability_threshold")) {
    base.exploitability_threshold = j["exploitability_threshold"].get<double>();
  }
  return base;
}

OpponentSpec opponent_from_json(const json& j, const SolveBudget& default_budget) {
  OpponentSpec spec;
  spec.budget = default_budget;
  if (j.is_string()) {
    spec.cls = OpponentSpec::parse_class(j.get<std::string>());
    return spec;
  }
  spec.cls = OpponentSpec::parse_class(j.at("class").get<std::string>());
  if (j.contains("switch_hand")) spec.switch_hand = j["switch_hand"].get<int>();
  if (j.contains("mix_p")) spec.mix_p = j["mix_p"].get<double>();
  spec.budget = budget_from_json(j, spec.budget);
  return spec;
}

template <typename T>
std::vector<T> scalar_or_list(const json& j, const std::function<T(const json&)>& parse) {
  std::vector<T> out;
  if (j.is_array()) {
    for (const json& item : j) out.push_back(parse(item));
  } else {
    out.push_back(parse(j));
  }
  return out;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
  json j = json::parse(text);
  ExperimentConfig cfg;
  if (j.contains("game")) {
    const json& g = j["game"];
    if (g.is_string()) {
      cfg.game = GameSpec::parse(g.get<std::string>());
    } else {
      if (g.contains("card_count")) cfg.game.card_count = g["card_count"].get<int>();
      if (g.contains("bet_sizes")) cfg.game.bet_sizes = g["bet_sizes"].get<std::vector<int>>();
    }
  }
  if (j.contains("solver")) cfg.solver = budget_from_json(j["solver"], cfg.solver);
  if (j.contains("abstraction")) {
    cfg.abstraction = scalar_or_list<AbstractionRung>(
        j["abstraction"],
        [](const json& item) { return AbstractionRung::parse(item.get<std::string>()); });
  }
  if (j.contains("algorithm")) {
    cfg.algorithm = scalar_or_list<PolicyKind>(
        j["algorithm"],
        [](const json& item) { return parse_policy_kind(item.get<std::string>()); });
  }
  if (j.contains("opponent")) {
    SolveBudget default_budget = cfg.solver;
    cfg.opponent = scalar_or_list<OpponentSpec>(
        j["opponent"], [&default_budget](const json& item) {
          return opponent_from_json(item, default_budget);
        });
  }
  if (j.contains("hands")) cfg.hands = j["hands"].get<int>();
  if (j.contains("repetitions")) cfg.repetitions = j["repetitions"].get<int>();
  if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("workers")) cfg.workers = j["workers"].get<int>();
  if (j.contains("eeffe_printed_gate")) {
    cfg.policy_options.eeffe_printed_gate = j["eeffe_printed_gate"].get<bool>();
  }
  if (j.contains("output")) {
    const json& o = j["output"];
    if (o.is_string()) {
      cfg.output.path = o.get<std::string>();
    } else {
      if (o.contains("path")) cfg.output.path = o["path"].get<std::string>();
      if (o.contains("format")) {
        cfg.output.formats = scalar_or_list<std::string>(
            o["format"], [](const json& item) { return item.get<std::string>(); });
      }
    }
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig ExperimentConfig::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json_text(buf.str());
}

MatchResult run_match(const GameTree& tree, ExploitPolicy& policy,
                      OpponentModel& model, Opponent& opponent, int hands,
                      Rng& rng, bool collect_trace) {
  if (hands < 1) throw std::invalid_argument("run_match: hands must be >= 1");
  if (policy.ledger().t != 1) {
    throw std::invalid_argument("run_match: policy already used");
  }
  int seat = policy.seat();
  MatchResult result;
  result.payoffs.reserve(hands);
  result.k_min = std::numeric_limits<Money>::infinity();
  if (collect_trace) result.trace.reserve(hands);

  for (int t = 1; t <= hands; ++t) {
    const BehavioralStrategy& agent = policy.select_strategy(model, t);
    const BehavioralStrategy& reply = opponent.strategy_for_hand(t, agent);
    HandRecord hand = seat == kPlayer1 ? sample_hand(tree, agent, reply, rng)
                                       : sample_hand(tree, reply, agent, rng);
    DecisionTrace trace = policy.settle_hand(model, agent, hand);
    Money payoff = seat == kPlayer1 ? hand.utility : -hand.utility;
    result.payoffs.push_back(payoff);
    result.total += payoff;
    result.k_min = std::min(result.k_min, trace.k_after);
    if (collect_trace) result.trace.push_back(trace);
  }
  result.mean = result.total / static_cast<Money>(hands);
  result.k_final = policy.ledger().k;
  return result;
}

std::pair<Money, Money> summarize_ci(std::span<const Money> per_rep_means) {
  if (per_rep_means.empty()) {
    throw std::invalid_argument("summarize_ci: empty list");
  }
  size_t n = per_rep_means.size();
  Money mean = 0;
  for (Money m : per_rep_means) mean += m;
  mean /= static_cast<Money>(n);
  if (n == 1) {
    std::cerr << "warning: one repetition, CI half-width is undefined (NaN)\n";
    return {mean, std::numeric_limits<Money>::quiet_NaN()};
  }
  Money ss = 0;
  for (Money m : per_rep_means) ss += (m - mean) * (m - mean);
  Money sd = std::sqrt(ss / static_cast<Money>(n - 1));
  Money half = 1.96 * sd / std::sqrt(static_cast<Money>(n));
  return {mean, half};
}

const GameTree& ExperimentContext::tree(const GameSpec& spec) {
  std::string key = spec.to_string();
  auto it = trees_.find(key);
  if (it == trees_.end()) {
    it = trees_.emplace(key, std::make_unique<GameTree>(build_game(spec))).first;
  }
  return *it->second;
}

const GameTree& ExperimentContext::abstract_tree(const GameSpec& spec,
                                                 const AbstractionRung& rung) {
  if (rung.kind == AbstractionRung::Kind::None) return tree(spec);
  GameTree built = rung.build_tree(spec);
  std::string key = built.id();  // read before moving the tree
  auto it = trees_.find(key);
  if (it == trees_.end()) {
    it = trees_.emplace(key, std::make_unique<GameTree>(std::move(built))).first;
  }
  return *it->second;
}

const Profile& ExperimentContext::profile(const GameTree& tree,
                                          const SolveBudget& budget,
                                          std::uint64_t seed) {
  return cache_.train(tree, budget, seed);
}

void parallel_for(int jobs, int workers, const std::function<void(int)>& fn) {
  if (workers <= 0) {
    workers = static_cast<int>(std::thread::hardware_concurrency());
    if (workers <= 0) workers = 1;
  }
  workers = std::min(workers, jobs);
  if (workers <= 1) {
    for (int i = 0; i < jobs; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr error;
  std::mutex error_mutex;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      while (true) {
        int i = next.fetch_add(1);
        if (i >= jobs) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (std::thread& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

namespace {

struct Cell {
  PolicyKind algorithm;
  int rung_index;
  int opponent_index;
};

}  // namespace

ExperimentTable run_experiment(const ExperimentConfig& config,
                               ExperimentContext* context) {
  config.validate();
  ExperimentContext local;
  ExperimentContext& ctx = context != nullptr ? *context : local;

  const GameTree& tree = ctx.tree(config.game);

  // Base strategies and model priors per rung: solve the abstract game,
  // lift both seats to the full game.
  struct RungData {
    BehavioralStrategy sigma0;
    BehavioralStrategy prior;
    Money v_prime = 0;
  };
  std::vector<RungData> rungs;
  for (const AbstractionRung& rung : config.abstraction) {
    const GameTree& abs_tree = ctx.abstract_tree(config.game, rung);
    std::uint64_t seed = mix_seed(config.seed, "solve|" + abs_tree.id());
    const Profile& profile = ctx.profile(abs_tree, config.solver, seed);
    if (profile.iterations >= config.solver.max_iterations) {
      double expl = exploitability(abs_tree, kPlayer1, profile.p1);
      if (expl > config.solver.exploitability_threshold) {
        std::cerr << "warning: " << rung.to_string() << " pretraining hit the "
                  << config.solver.max_iterations << "-iteration cap at "
                  << expl << " exploitability\n";
      }
    }
    BucketMap map = rung.bucket_map(config.game);
    RungData data;
    data.sigma0 = lift_strategy(abs_tree, tree, map, profile.p1);
    data.prior = lift_strategy(abs_tree, tree, map, profile.p2);
    data.v_prime = worst_case_value(tree, kPlayer1, data.sigma0);
    rungs.push_back(std::move(data));
  }

  // Opponents: stationary classes are shared across matches; Dynamic
  // best-responds to the rung's base strategy, so it is built per rung
  // (slot 0 holds the shared instance otherwise).
  std::vector<std::vector<std::unique_ptr<Opponent>>> opponents(
      config.opponent.size());
  for (size_t oi = 0; oi < config.opponent.size(); ++oi) {
    const OpponentSpec& spec = config.opponent[oi];
    std::uint64_t seed =
        mix_seed(config.seed, "solve|" + config.game.to_string());
    opponents[oi].resize(rungs.size());
    if (spec.cls == OpponentSpec::Class::Dynamic) {
      for (size_t ri = 0; ri < rungs.size(); ++ri) {
        opponents[oi][ri] =
            make_opponent(tree, spec, rungs[ri].sigma0, seed, ctx.cache());
      }
    } else {
      opponents[oi][0] =
          make_opponent(tree, spec, rungs[0].sigma0, seed, ctx.cache());
    }
  }

  std::vector<Cell> cells;
  for (PolicyKind alg : config.algorithm) {
    for (size_t ri = 0; ri < rungs.size(); ++ri) {
      for (size_t oi = 0; oi < config.opponent.size(); ++oi) {
        cells.push_back({alg, static_cast<int>(ri), static_cast<int>(oi)});
      }
    }
  }

  int reps = config.repetitions;
  std::vector<Money> rep_means(cells.size() * static_cast<size_t>(reps));
  std::vector<Money> rep_kmin(cells.size() * static_cast<size_t>(reps));
  std::vector<std::vector<DecisionTrace>> traces(config.trace ? cells.size() : 0);

  int jobs = static_cast<int>(cells.size()) * reps;
  parallel_for(jobs, config.workers, [&](int job) {
    int cell_index = job / reps;
    int rep = job % reps;
    const Cell& cell = cells[cell_index];
    const RungData& rung = rungs[cell.rung_index];
    const auto& per_rung = opponents[cell.opponent_index];
    Opponent& opp =
        per_rung[cell.rung_index] ? *per_rung[cell.rung_index] : *per_rung[0];

    ExploitPolicy policy(cell.algorithm, tree, rung.sigma0, config.hands,
                         config.policy_options);
    OpponentModel model(tree, rung.prior);
    Rng rng(mix_seed(config.seed, "match", static_cast<std::uint64_t>(job)));
    bool want_trace = config.trace && rep == 0;
    MatchResult result =
        run_match(tree, policy, model, opp, config.hands, rng, want_trace);
    rep_means[job] = result.mean;
    rep_kmin[job] = result.k_min;
    if (want_trace) traces[cell_index] = std::move(result.trace);
  });

  ExperimentTable table;
  table.min_ledger_balance = std::numeric_limits<Money>::infinity();
  for (size_t ci = 0; ci < cells.size(); ++ci) {
    const Cell& cell = cells[ci];
    std::span<const Money> means(rep_means.data() + ci * reps,
                                 static_cast<size_t>(reps));
    auto [mean, ci95] = summarize_ci(means);
    TableRow row;
    row.algorithm = to_string(cell.algorithm);
    row.abstraction = config.abstraction[cell.rung_index].to_string();
    row.v_prime = rungs[cell.rung_index].v_prime;
    row.opponent = config.opponent[cell.opponent_index].class_name();
    row.mean = mean;
    row.ci95 = ci95;
    row.hands = config.hands;
    row.repetitions = reps;
    row.seed = config.seed;
    table.rows.push_back(std::move(row));
    for (int r = 0; r < reps; ++r) {
      table.min_ledger_balance =
          std::min(table.min_ledger_balance, rep_kmin[ci * reps + r]);
    }
  }
  if (config.trace) {
    table.trace_lines.push_back("algorithm,abstraction,opponent," +
                                trace_csv_header());
    for (size_t ci = 0; ci < cells.size(); ++ci) {
      const Cell& cell = cells[ci];
      for (const DecisionTrace& t : traces[ci]) {
        table.trace_lines.push_back(
            to_string(cell.algorithm) + "," +
            config.abstraction[cell.rung_index].to_string() + "," +
            config.opponent[cell.opponent_index].class_name() + "," +
            to_csv_row(t));
      }
    }
  }
  if (!config.output.path.empty()) emit_report(table, config.output);
  return table;
}

std::string to_csv(const ExperimentTable& table) {
  std::string out = "algorithm,abstraction,v_prime,opponent,mean,ci95,hands,reps,seed\n";
  for (const TableRow& row : table.rows) {
    out += row.algorithm + ',' + row.abstraction + ',' + format_g(row.v_prime) +
           ',' + row.opponent + ',' + format_g(row.mean) + ',' +
           format_g(row.ci95) + ',' + std::to_string(row.hands) + ',' +
           std::to_string(row.repetitions) + ',' + std::to_string(row.seed) +
           '\n';
  }
  return out;
}

ExperimentTable parse_csv(const std::string& text) {
  ExperimentTable table;
  std::istringstream in(text);
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    std::vector<std::string> parts;
    std::istringstream ls(line);
    std::string field;
    while (std::getline(ls, field, ',')) parts.push_back(field);
    if (parts.size() != 9) throw std::runtime_error("bad table row: " + line);
    TableRow row;
    row.algorithm = parts[0];
    row.abstraction = parts[1];
    row.v_prime = std::stod(parts[2]);
    row.opponent = parts[3];
    row.mean = std::stod(parts[4]);
    row.ci95 = std::stod(parts[5]);
    row.hands = std::stoi(parts[6]);
    row.repetitions = std::stoi(parts[7]);
    row.seed = std::stoull(parts[8]);
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::string to_markdown(const ExperimentTable& table) {
  // Mirror the paper's layout: algorithms as row groups (one row per
  // abstraction rung), opponents as columns.
  static const char* kOrder[] = {"Random", "Sophisticated", "Dynamic",
                                 "Equilibrium"};
  std::vector<std::string> columns;
  for (const char* name : kOrder) {
    for (const TableRow& row : table.rows) {
      if (row.opponent == name) {
        columns.push_back(name);
        break;
      }
    }
  }
  for (const TableRow& row : table.rows) {
    bool known = false;
    for (const std::string& c : columns) known = known || c == row.opponent;
    if (!known) columns.push_back(row.opponent);
  }

  struct GroupRow {
    std::string algorithm, abstraction;
    Money v_prime;
    std::map<std::string, std::string> cells;
  };
  std::vector<GroupRow> grouped;
  for (const TableRow& row : table.rows) {
    GroupRow* target = nullptr;
    for (GroupRow& g : grouped) {
      if (g.algorithm == row.algorithm && g.abstraction == row.abstraction) {
        target = &g;
        break;
      }
    }
    if (target == nullptr) {
      grouped.push_back({row.algorithm, row.abstraction, row.v_prime, {}});
      target = &grouped.back();
    }
    target->cells[row.opponent] =
        format_f4(row.mean) + " ± " + format_f4(row.ci95);
  }

  std::string out = "| Algorithm | Abstraction | v' |";
  for (const std::string& c : columns) out += " " + c + " |";
  out += "\n|---|---|---|";
  for (size_t i = 0; i < columns.size(); ++i) out += "---|";
  out += "\n";
  std::string last_algorithm;
  for (const GroupRow& g : grouped) {
    std::string name = g.algorithm == last_algorithm ? "" : g.algorithm;
    last_algorithm = g.algorithm;
    out += "| " + name + " | " + g.abstraction + " | " + format_f4(g.v_prime) +
           " |";
    for (const std::string& c : columns) {
      auto it = g.cells.find(c);
      out += " " + (it == g.cells.end() ? std::string() : it->second) + " |";
    }
    out += "\n";
  }
  return out;
}

void emit_report(const ExperimentTable& table, const OutputSpec& output) {
  if (table.rows.empty()) throw std::invalid_argument("emit_report: empty table");
  if (output.path.empty()) throw std::invalid_argument("emit_report: empty path");
  for (const std::string& fmt : output.formats) {
    std::string path = output.path + (fmt == "csv" ? ".csv" : ".md");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << (fmt == "csv" ? to_csv(table) : to_markdown(table));
  }
  if (!table.trace_lines.empty()) {
    std::string path = output.path + ".trace.csv";
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    for (const std::string& line : table.trace_lines) out << line << '\n';
  }
}

}  // namespace psafe
