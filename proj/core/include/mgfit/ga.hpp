#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mgfit/fitness.hpp"
#include "mgfit/game.hpp"
#include "mgfit/rng.hpp"

namespace mgfit {

struct GAConfig {
  int population_size = 50;
  int max_generations = 200;
  int elite_count = 2;
  double crossover_rate = 0.9;
  double mutation_rate_per_bit = 0.005;
  int stall_generations = 20;      // stop after this many non-improving generations
  double min_improvement = 0.0;    // improvement <= this counts as a stall
  std::uint64_t seed = 0;
  GameVariant variant = GameVariant::GCMjG;
  GameHyper hyper;
  Metric metric = Metric::HammingBinary;
  MetricOptions metric_options;
  bool strategy_granular_crossover = false;  // default keeps an agent's strategies together
  int workers = 1;
};

void validate(const GAConfig& cfg);  // throws ConfigError

// The initial strategy distribution: one table per (agent, strategy) slot.
// This is the full genome; everything else about a game is fixed.
struct Genome {
  int agents = 0;
  int strategies = 0;
  int memory = 0;
  std::vector<std::uint64_t> tables;  // agents*strategies words, agent-major

  bool operator==(const Genome&) const = default;
};

ThirdPartyGame make_game(GameVariant variant, const GameHyper& hyper, const Genome& genome);

// Every table bit i.i.d. uniform on {+1, -1}.
std::vector<Genome> init_population(const GAConfig& cfg, Rng& rng);
Genome random_genome(const GameHyper& hyper, Rng& rng);

// Decode -> run the window -> score with the configured metric. Pure.
FitnessValue evaluate(const Genome& genome, const ReturnView& window,
                      std::span<const std::int8_t> warm_history, const GAConfig& cfg);

// Rank-based parent sampling: weight of the k-th ranked genome is
// population_size - k + 1, with tied fitness values sharing the mean weight
// of their rank span (so equal fitness means uniform selection).
std::vector<std::pair<int, int>> select_pairs(std::span<const double> fitness,
                                              int n_pairs, Rng& rng);

// With probability (1 - rate) a copy of parent a; otherwise uniform crossover
// at agent granularity (each agent slot keeps its S strategies together).
Genome crossover(const Genome& a, const Genome& b, Rng& rng, double rate,
                 bool strategy_granular = false);

// Flips each table bit independently with probability rate_per_bit.
Genome mutate(Genome genome, Rng& rng, double rate_per_bit);

struct GenerationStats {
  double best = 0.0;
  double mean = 0.0;
};

struct GARunResult {
  Genome best_genome;
  FitnessValue best_fitness;
  std::vector<GenerationStats> fitness_trace;
  int generations_run = 0;
  std::uint64_t seed = 0;
};

// Algorithm: init -> [evaluate -> select -> crossover -> mutate] until the
// generation cap or a fitness stall. Deterministic function of (cfg, window):
// per-generation and per-child RNG streams are derived from cfg.seed, so
// parallel evaluation cannot change the outcome.
GARunResult run_ga(const GAConfig& cfg, const ReturnView& window,
                   std::span<const std::int8_t> warm_history);

std::string to_json(const GARunResult& result);
std::string to_json(const Genome& genome);
Genome genome_from_json(std::string_view text);

}  // namespace mgfit
