#include "mgfit/blackbox.hpp"

#include <algorithm>
#include <bit>

#include <nlohmann/json.hpp>

#include "mgfit/errors.hpp"
#include "mgfit/parallel.hpp"

namespace mgfit {

void validate(const BlackboxSpec& spec, const WindowSpec& window) {
  try {
    validate(spec.hyper);
  } catch (const GameError& e) {
    throw ConfigError(std::string("blackbox hyper: ") + e.what());
  }
  if (spec.holdout_days < 1) throw ConfigError("holdout_days must be >= 1");
  if (spec.random_baseline < 1) throw ConfigError("random_baseline must be >= 1");
  const std::size_t need = static_cast<std::size_t>(spec.hyper.memory) +
                           static_cast<std::size_t>(window.in_sample_days) +
                           static_cast<std::size_t>(spec.holdout_days);
  if (spec.series_length < need)
    throw ConfigError("series_length must be >= memory + in_sample_days + holdout_days (" +
                      std::to_string(need) + ")");
}

namespace {

double bit_agreement(const Genome& a, std::span<const std::uint64_t> planted, int memory) {
  if (a.tables.size() != planted.size()) return 0.0;
  const std::uint32_t entries = 1u << memory;
  const std::uint64_t mask =
      entries == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << entries) - 1;
  std::size_t same = 0;
  for (std::size_t i = 0; i < planted.size(); ++i)
    same += static_cast<std::size_t>(
        std::popcount(~(a.tables[i] ^ planted[i]) & mask));
  return static_cast<double>(same) /
         static_cast<double>(planted.size() * static_cast<std::size_t>(entries));
}

}  // namespace

BlackBoxExperiment run_blackbox(const BlackboxSpec& spec, const GAConfig& ga,
                                const WindowSpec& window, std::uint64_t master_seed,
                                int workers) {
  validate(spec, window);
  GAConfig cfg = ga;
  cfg.variant = spec.variant;
  cfg.hyper = spec.hyper;
  validate(cfg);
  validate(window, cfg.hyper);

  // Plant and generate. The planted game never reaches the search path;
  // everything downstream sees only `generated.series`.
  Rng genome_rng(derive_seed(spec.planted_seed, {tag("planted-genome")}));
  const Genome planted_genome = random_genome(spec.hyper, genome_rng);
  ThirdPartyGame planted = make_game(spec.variant, spec.hyper, planted_genome);
  BlackboxSeries generated =
      blackbox_generate(planted, spec.series_length,
                        derive_seed(spec.planted_seed, {tag("series")}));
  const ReturnSeries& series = generated.series;

  const std::size_t holdout_start = series.size() - static_cast<std::size_t>(spec.holdout_days);
  const std::size_t w = static_cast<std::size_t>(window.in_sample_days);
  const std::size_t m = static_cast<std::size_t>(spec.hyper.memory);

  BlackBoxExperiment experiment{std::move(planted), std::move(generated), {}, {}, {}};

  // Recovery: the GA ensemble on the window right before the holdout.
  const ReturnView fit_window = view(series, holdout_start - w, holdout_start);
  const auto warm = std::span(series.binary).subspan(holdout_start - w - m, m);
  const std::uint64_t recovery_base = derive_seed(master_seed, {tag("recovery")});

  experiment.recovery.resize(static_cast<std::size_t>(window.ensemble_runs));
  parallel_for(experiment.recovery.size(), workers, [&](std::size_t i) {
    GAConfig run_cfg = cfg;
    run_cfg.seed = recovery_base ^ (static_cast<std::uint64_t>(i) + 1);
    run_cfg.workers = 1;
    experiment.recovery[i] = run_ga(run_cfg, fit_window, warm);
  });

  const auto best = std::max_element(
      experiment.recovery.begin(), experiment.recovery.end(),
      [](const GARunResult& a, const GARunResult& b) {
        return a.best_fitness.fitness < b.best_fitness.fitness;
      });
  experiment.scorecard.fitness_achieved = best->best_fitness;

  // Percentile of the achieved fitness against random genomes on the same
  // window and metric.
  std::vector<double> baseline(static_cast<std::size_t>(spec.random_baseline));
  parallel_for(baseline.size(), workers, [&](std::size_t i) {
    Rng rng(derive_seed(master_seed, {tag("baseline"), i}));
    const Genome g = random_genome(spec.hyper, rng);
    baseline[i] = evaluate(g, fit_window, warm, cfg).fitness;
  });
  std::size_t worse = 0;
  for (double f : baseline) worse += f < experiment.scorecard.fitness_achieved.fitness;
  experiment.scorecard.baseline_percentile =
      static_cast<double>(worse) / static_cast<double>(baseline.size());

  // Holdout: one-step predictions over the final segment, each day solved
  // from scratch by the standard pipeline.
  std::vector<std::size_t> days(static_cast<std::size_t>(spec.holdout_days));
  for (std::size_t i = 0; i < days.size(); ++i) days[i] = holdout_start + i;
  const auto holdout = run_experiment(series, days, window, cfg, master_seed,
                                      "blackbox", {}, Combiner::MeanDemand, workers);
  experiment.holdout_records = holdout.records;

  int hits = 0;
  for (const auto& r : experiment.holdout_records)
    hits += r.predicted_sign == r.realized_sign;
  experiment.scorecard.holdout_days = spec.holdout_days;
  experiment.scorecard.holdout_successes = hits;
  experiment.scorecard.holdout_accuracy =
      static_cast<double>(hits) / static_cast<double>(spec.holdout_days);
  experiment.scorecard.binomial_p = binomial_tail_geq(spec.holdout_days, hits);
  experiment.scorecard.genome_bit_agreement =
      bit_agreement(best->best_genome, experiment.planted.tables(), spec.hyper.memory);

  return experiment;
}

std::string to_json(const BlackBoxExperiment& experiment) {
  nlohmann::json j;
  j["planted"] = nlohmann::json::parse(to_json(experiment.planted));
  j["series_length"] = experiment.generated.series.size();
  j["coin_flip_days"] = experiment.generated.coin_flip_days;
  j["planted_ever_acted"] = experiment.generated.planted_ever_acted;

  const auto& sc = experiment.scorecard;
  j["scorecard"] = {
      {"fitness_achieved",
       {{"distance", sc.fitness_achieved.distance}, {"fitness", sc.fitness_achieved.fitness}}},
      {"baseline_percentile", sc.baseline_percentile},
      {"holdout_accuracy", sc.holdout_accuracy},
      {"holdout_days", sc.holdout_days},
      {"holdout_successes", sc.holdout_successes},
      {"binomial_p", sc.binomial_p},
      {"genome_bit_agreement", sc.genome_bit_agreement},
  };

  nlohmann::json recovery = nlohmann::json::array();
  for (const auto& run : experiment.recovery)
    recovery.push_back(nlohmann::json::parse(to_json(run)));
  j["recovery"] = recovery;
  return j.dump(2);
}

}  // namespace mgfit
