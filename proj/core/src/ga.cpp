#include "mgfit/ga.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <nlohmann/json.hpp>

#include "mgfit/errors.hpp"
#include "mgfit/parallel.hpp"

namespace mgfit {

void validate(const GAConfig& cfg) {
  if (cfg.population_size < 2) throw ConfigError("population_size must be >= 2");
  if (cfg.max_generations < 1) throw ConfigError("max_generations must be >= 1");
  if (cfg.elite_count < 0 || cfg.elite_count >= cfg.population_size)
    throw ConfigError("elite_count must be in [0, population_size)");
  if (cfg.crossover_rate < 0 || cfg.crossover_rate > 1)
    throw ConfigError("crossover_rate must be in [0, 1]");
  if (cfg.mutation_rate_per_bit < 0 || cfg.mutation_rate_per_bit > 1)
    throw ConfigError("mutation_rate_per_bit must be in [0, 1]");
  if (cfg.stall_generations < 1) throw ConfigError("stall_generations must be >= 1");
  try {
    validate(cfg.hyper);
  } catch (const GameError& e) {
    throw ConfigError(std::string("hyper: ") + e.what());
  }
}

ThirdPartyGame make_game(GameVariant variant, const GameHyper& hyper, const Genome& genome) {
  if (genome.agents != hyper.agents || genome.strategies != hyper.strategies ||
      genome.memory != hyper.memory)
    throw GameError("genome dimensions do not match hyperparameters");
  return ThirdPartyGame(variant, hyper, genome.tables);
}

Genome random_genome(const GameHyper& hyper, Rng& rng) {
  Genome g;
  g.agents = hyper.agents;
  g.strategies = hyper.strategies;
  g.memory = hyper.memory;
  g.tables.resize(static_cast<std::size_t>(hyper.tables()));
  const std::uint64_t mask = hyper.table_mask();
  for (auto& t : g.tables) t = rng.next() & mask;
  return g;
}

std::vector<Genome> init_population(const GAConfig& cfg, Rng& rng) {
  std::vector<Genome> pop;
  pop.reserve(static_cast<std::size_t>(cfg.population_size));
  for (int i = 0; i < cfg.population_size; ++i) pop.push_back(random_genome(cfg.hyper, rng));
  return pop;
}

FitnessValue evaluate(const Genome& genome, const ReturnView& window,
                      std::span<const std::int8_t> warm_history, const GAConfig& cfg) {
  ThirdPartyGame game = make_game(cfg.variant, cfg.hyper, genome);
  const auto steps = run_window(game, warm_history, window);
  return distance(cfg.metric, steps, window, cfg.metric_options);
}

std::vector<std::pair<int, int>> select_pairs(std::span<const double> fitness,
                                              int n_pairs, Rng& rng) {
  const int n = static_cast<int>(fitness.size());
  if (n == 0) throw ConfigError("select_pairs: empty population");

  std::vector<int> order(fitness.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return fitness[a] > fitness[b]; });

  // Rank weights n, n-1, ..., 1; tied fitness spans share their mean weight.
  std::vector<double> weight(fitness.size(), 0.0);
  for (int i = 0; i < n;) {
    int j = i;
    while (j < n && fitness[order[j]] == fitness[order[i]]) ++j;
    const double w = (static_cast<double>(n - i) + static_cast<double>(n - j + 1)) / 2.0;
    for (int k = i; k < j; ++k) weight[order[k]] = w;
    i = j;
  }

  std::vector<double> cumulative(fitness.size());
  std::partial_sum(weight.begin(), weight.end(), cumulative.begin());
  const double total = cumulative.back();

  auto draw = [&] {
    const double u = rng.next_double() * total;
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    return static_cast<int>(std::min<std::ptrdiff_t>(it - cumulative.begin(), n - 1));
  };

  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(static_cast<std::size_t>(n_pairs));
  for (int i = 0; i < n_pairs; ++i) {
    const int a = draw();
    const int b = draw();
    pairs.emplace_back(a, b);
  }
  return pairs;
}

Genome crossover(const Genome& a, const Genome& b, Rng& rng, double rate,
                 bool strategy_granular) {
  if (a.agents != b.agents || a.strategies != b.strategies || a.memory != b.memory)
    throw GameError("crossover: hyperparameter mismatch");
  if (!rng.bernoulli(rate)) return a;

  Genome child = a;
  if (strategy_granular) {
    for (std::size_t i = 0; i < child.tables.size(); ++i)
      if (rng.bernoulli(0.5)) child.tables[i] = b.tables[i];
  } else {
    for (int agent = 0; agent < a.agents; ++agent) {
      if (rng.bernoulli(0.5)) {
        const std::size_t base = static_cast<std::size_t>(agent) * a.strategies;
        for (int s = 0; s < a.strategies; ++s)
          child.tables[base + s] = b.tables[base + s];
      }
    }
  }
  return child;
}

Genome mutate(Genome genome, Rng& rng, double rate_per_bit) {
  const std::uint32_t entries = 1u << genome.memory;
  for (auto& table : genome.tables)
    for (std::uint32_t bit = 0; bit < entries; ++bit)
      if (rng.bernoulli(rate_per_bit)) table ^= std::uint64_t{1} << bit;
  return genome;
}

GARunResult run_ga(const GAConfig& cfg, const ReturnView& window,
                   std::span<const std::int8_t> warm_history) {
  validate(cfg);
  if (window.size() == 0) throw ConfigError("run_ga: empty in-sample window");

  Rng init_rng(derive_seed(cfg.seed, {tag("init")}));
  std::vector<Genome> population = init_population(cfg, init_rng);

  GARunResult result;
  result.seed = cfg.seed;

  std::vector<double> fitness(population.size());
  std::vector<FitnessValue> values(population.size());

  bool have_best = false;
  int stall = 0;

  for (int gen = 0; gen < cfg.max_generations; ++gen) {
    parallel_for(population.size(), cfg.workers, [&](std::size_t i) {
      values[i] = evaluate(population[i], window, warm_history, cfg);
      fitness[i] = values[i].fitness;
    });

    GenerationStats stats;
    std::size_t gen_best = 0;
    double mean = 0;
    for (std::size_t i = 0; i < fitness.size(); ++i) {
      mean += fitness[i];
      if (fitness[i] > fitness[gen_best]) gen_best = i;
    }
    stats.best = fitness[gen_best];
    stats.mean = mean / static_cast<double>(fitness.size());
    result.fitness_trace.push_back(stats);
    result.generations_run = gen + 1;

    const double improvement = have_best ? stats.best - result.best_fitness.fitness
                                         : std::numeric_limits<double>::infinity();
    if (!have_best || stats.best > result.best_fitness.fitness) {
      result.best_fitness = values[gen_best];
      result.best_genome = population[gen_best];
      have_best = true;
    }
    if (improvement <= cfg.min_improvement)
      ++stall;
    else
      stall = 0;
    if (stall >= cfg.stall_generations) break;
    if (gen + 1 == cfg.max_generations) break;

    // Next generation: elites carried unchanged, the rest bred from
    // rank-selected parent pairs.
    std::vector<int> order(population.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return fitness[a] > fitness[b]; });

    std::vector<Genome> next;
    next.reserve(population.size());
    for (int e = 0; e < cfg.elite_count; ++e) next.push_back(population[order[e]]);

    const int n_children = cfg.population_size - cfg.elite_count;
    Rng select_rng(derive_seed(cfg.seed, {tag("select"), static_cast<std::uint64_t>(gen)}));
    const auto pairs = select_pairs(fitness, n_children, select_rng);

    for (int c = 0; c < n_children; ++c) {
      Rng child_rng(derive_seed(cfg.seed, {tag("child"), static_cast<std::uint64_t>(gen),
                                           static_cast<std::uint64_t>(c)}));
      Genome child = crossover(population[pairs[c].first], population[pairs[c].second],
                               child_rng, cfg.crossover_rate, cfg.strategy_granular_crossover);
      next.push_back(mutate(std::move(child), child_rng, cfg.mutation_rate_per_bit));
    }
    population = std::move(next);
  }

  return result;
}

namespace {

nlohmann::json genome_to_json_obj(const Genome& g) {
  nlohmann::json j;
  j["agents"] = g.agents;
  j["strategies"] = g.strategies;
  j["memory"] = g.memory;
  j["tables"] = g.tables;
  return j;
}

Genome genome_from_json_obj(const nlohmann::json& j) {
  Genome g;
  g.agents = j.at("agents").get<int>();
  g.strategies = j.at("strategies").get<int>();
  g.memory = j.at("memory").get<int>();
  g.tables = j.at("tables").get<std::vector<std::uint64_t>>();
  if (g.tables.size() != static_cast<std::size_t>(g.agents) * g.strategies)
    throw DataError("genome JSON: table count does not match dimensions");
  return g;
}

}  // namespace

std::string to_json(const Genome& genome) { return genome_to_json_obj(genome).dump(); }

Genome genome_from_json(std::string_view text) {
  nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded()) throw DataError("bad genome JSON");
  try {
    return genome_from_json_obj(j);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("bad genome JSON: ") + e.what());
  }
}

std::string to_json(const GARunResult& result) {
  nlohmann::json j;
  j["best_genome"] = genome_to_json_obj(result.best_genome);
  j["best_fitness"] = {{"distance", result.best_fitness.distance},
                       {"fitness", result.best_fitness.fitness}};
  nlohmann::json trace = nlohmann::json::array();
  for (const auto& g : result.fitness_trace)
    trace.push_back({{"best", g.best}, {"mean", g.mean}});
  j["fitness_trace"] = trace;
  j["generations_run"] = result.generations_run;
  j["seed"] = result.seed;
  return j.dump();
}

}  // namespace mgfit
