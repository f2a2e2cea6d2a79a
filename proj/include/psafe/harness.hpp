#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "psafe/abstraction.hpp"
#include "psafe/game.hpp"
#include "psafe/mccfr.hpp"
#include "psafe/opponents.hpp"
#include "psafe/rng.hpp"
#include "psafe/safe_exploit.hpp"

namespace psafe {

struct OutputSpec {
  std::string path;                         // empty = no files
  std::vector<std::string> formats = {"csv"};  // "csv", "markdown"
};

/// One experiment: a cross of algorithms, abstraction rungs, and opponents
/// on a single game, `repetitions` independent matches of `hands` hands per
/// cell. Deterministic in (config, seed), independent of worker count.
struct ExperimentConfig {
  GameSpec game;
  std::vector<AbstractionRung> abstraction = {AbstractionRung{}};
  std::vector<PolicyKind> algorithm = {PolicyKind::Static};
  std::vector<OpponentSpec> opponent = {OpponentSpec{}};
  int hands = 1000;
  int repetitions = 2000;
  std::uint64_t seed = 1;
  SolveBudget solver{};
  OutputSpec output{};
  int workers = 0;  // 0 = hardware concurrency
  bool trace = false;
  PolicyOptions policy_options{};

  void validate() const;
  static ExperimentConfig from_json_text(const std::string& text);
  static ExperimentConfig from_json_file(const std::string& path);
};

struct MatchResult {
  std::vector<Money> payoffs;  // per hand, agent perspective
  Money total = 0;
  Money mean = 0;
  Money k_min = 0;    // min ledger balance seen after any settlement
  Money k_final = 0;
  std::vector<DecisionTrace> trace;  // filled when requested
};

/// Plays `hands` hands: select, sample, reveal, update model, settle.
/// Requires a fresh policy and model.
MatchResult run_match(const GameTree& tree, ExploitPolicy& policy,
                      OpponentModel& model, Opponent& opponent, int hands,
                      Rng& rng, bool collect_trace = false);

/// Normal-approximation summary of per-repetition means: (mean, 1.96 *
/// sd/sqrt(n)) with the n-1 sample standard deviation. A single element
/// yields a NaN half-width and a warning on stderr.
std::pair<Money, Money> summarize_ci(std::span<const Money> per_rep_means);

struct TableRow {
  std::string algorithm;
  std::string abstraction;
  Money v_prime = 0;
  std::string opponent;
  Money mean = 0;
  Money ci95 = 0;
  int hands = 0;
  int repetitions = 0;
  std::uint64_t seed = 0;
};

struct ExperimentTable {
  std::vector<TableRow> rows;
  Money min_ledger_balance = 0;  // audit: min k over all matches and hands
  std::vector<std::string> trace_lines;
};

/// Owns game trees and trained profiles so repeated experiments (and the
/// acceptance suite) share pre-training. Fill sequentially.
class ExperimentContext {
 public:
  const GameTree& tree(const GameSpec& spec);
  const GameTree& abstract_tree(const GameSpec& spec,
                                const AbstractionRung& rung);
  const Profile& profile(const GameTree& tree, const SolveBudget& budget,
                         std::uint64_t seed);
  SolveCache* cache() { return &cache_; }

 private:
  std::map<std::string, std::unique_ptr<GameTree>> trees_;
  SolveCache cache_;
};

/// Pre-trains the base strategy per abstraction rung (MCCFR in the abstract
/// game, lifted to the full game) and the shared opponents, then runs all
/// repetitions and aggregates one row per (algorithm, abstraction,
/// opponent). The agent sits as player 1.
ExperimentTable run_experiment(const ExperimentConfig& config,
                               ExperimentContext* context = nullptr);

std::string to_csv(const ExperimentTable& table);
ExperimentTable parse_csv(const std::string& text);
std::string to_markdown(const ExperimentTable& table);
/// Writes <path>.csv / <path>.md per the requested formats, and
/// <path>.trace.csv when traces were collected.
void emit_report(const ExperimentTable& table, const OutputSpec& output);

/// Runs fn(0..jobs-1) across `workers` threads (0 = hardware concurrency).
/// Results must be written to per-job slots; the call returns after all
/// jobs complete.
void parallel_for(int jobs, int workers, const std::function<void(int)>& fn);

}  // namespace psafe
