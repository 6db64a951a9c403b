#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mgfit/ga.hpp"
#include "mgfit/pipeline.hpp"

namespace mgfit {

// A hidden ensemble to plant, generate from, and recover blind. The search
// path only ever sees the generated series; the planted game is opened for
// scoring after the search completes.
struct BlackboxSpec {
  GameVariant variant = GameVariant::GCMjG;
  GameHyper hyper;
  std::size_t series_length = 100;  // includes the memory warm symbols
  int holdout_days = 50;
  std::uint64_t planted_seed = 0;
  int random_baseline = 10000;  // random genomes behind the fitness percentile
};

void validate(const BlackboxSpec& spec, const WindowSpec& window);

struct BlackboxScorecard {
  FitnessValue fitness_achieved;   // best recovered in-sample fitness
  double baseline_percentile = 0;  // fraction of random genomes strictly worse
  double holdout_accuracy = 0;
  int holdout_days = 0;
  int holdout_successes = 0;
  double binomial_p = 1.0;  // one-sided exact tail vs a fair coin
  double genome_bit_agreement = 0;  // informational only; behavior is what counts
};

struct BlackBoxExperiment {
  ThirdPartyGame planted;
  BlackboxSeries generated;
  std::vector<GARunResult> recovery;
  std::vector<PredictionRecord> holdout_records;
  BlackboxScorecard scorecard;
};

// Plants a random ensemble from planted_seed, generates its closed-loop
// series, reverse-engineers the series with the GA ensemble, predicts the
// holdout segment day by day, and scores recovery on behavior: in-sample
// fitness (with its percentile against random genomes) and holdout
// directional accuracy.
BlackBoxExperiment run_blackbox(const BlackboxSpec& spec, const GAConfig& ga,
                                const WindowSpec& window, std::uint64_t master_seed,
                                int workers = 1);

std::string to_json(const BlackBoxExperiment& experiment);

}  // namespace mgfit
