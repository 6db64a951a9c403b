#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "mgfit/ga.hpp"
#include "mgfit/market_data.hpp"

namespace mgfit {

struct WindowSpec {
  int in_sample_days = 25;
  int ensemble_runs = 10;
};

void validate(const WindowSpec& spec, const GameHyper& hyper);  // throws ConfigError

// How the ensemble's demands become one directional call.
enum class Combiner { MeanDemand, MajorityVote };

std::string to_string(Combiner c);
std::optional<Combiner> combiner_from_string(std::string_view name);

struct PredictionRecord {
  std::size_t t = 0;  // index of the predicted day in the return series
  Date date;
  GameVariant variant = GameVariant::GCMjG;
  std::string config_id;
  std::uint64_t ga_seed_base = 0;
  std::vector<int> per_run_demand;  // raw A per ensemble run
  double mean_demand = 0.0;         // mean of per-run demands normalized by N
  double dispersion = 0.0;          // population stddev of the normalized demands
  std::int8_t predicted_sign = 0;   // +1 / -1
  bool tie = false;                 // mean demand was exactly zero
  std::int8_t realized_sign = 0;    // 0 until recorded post hoc
  bool realized_zero = false;       // realized return was exactly zero

  bool operator==(const PredictionRecord&) const = default;
};

std::string to_json_line(const PredictionRecord& record);
PredictionRecord record_from_json_line(std::string_view line, int line_no = 0);

// One-day experiment: train ensemble_runs GA instances on the in-sample
// window [t - in_sample_days, t) (run k seeded with ga_seed_base xor k), have
// each best game emit its next-day demand, and combine. Everything the
// optimizer touches is a view clipped at t, so indices >= t are unreachable;
// realized_sign stays unset here and is recorded post hoc by run_experiment.
PredictionRecord predict_day(const ReturnSeries& series, std::size_t t,
                             const WindowSpec& spec, const GAConfig& cfg,
                             std::uint64_t ga_seed_base,
                             Combiner combiner = Combiner::MeanDemand, int workers = 1);

// Derivation of the per-day GA seed base from the experiment master seed.
std::uint64_t day_seed_base(std::uint64_t master_seed, GameVariant variant, std::size_t t);

// Runs predict_day over every target index (each day independent, from
// scratch), records realized signs, and checkpoints one JSON line per record
// so an interrupted experiment resumes without recomputation. Records come
// back (and are written) in ascending day order regardless of worker count.
struct ExperimentResult {
  std::vector<PredictionRecord> records;
  std::size_t newly_computed = 0;
  std::size_t resumed = 0;
};

ExperimentResult run_experiment(
    const ReturnSeries& series, std::span<const std::size_t> target_days,
    const WindowSpec& spec, const GAConfig& cfg, std::uint64_t master_seed,
    const std::string& config_id, const std::filesystem::path& checkpoint_path,
    Combiner combiner = Combiner::MeanDemand, int workers = 1,
    const std::function<void(std::size_t, std::size_t)>& on_progress = {});

std::vector<PredictionRecord> read_records(const std::filesystem::path& path);

// Closed-loop generation from a planted game: the series starts with m random
// warm symbols, then each day's symbol is the sign of the game's own demand
// (fair coin when the demand is zero), fed back both as the realized sign for
// scoring and as the next history bit. Returns are +/-1 units.
struct BlackboxSeries {
  ReturnSeries series;
  std::size_t coin_flip_days = 0;   // days decided by the zero-demand coin
  bool planted_ever_acted = false;  // false flags an all-abstain planted game
};

BlackboxSeries blackbox_generate(ThirdPartyGame game, std::size_t length,
                                 std::uint64_t seed);

}  // namespace mgfit
