#include "mgfit/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "mgfit/errors.hpp"
#include "mgfit/parallel.hpp"

namespace mgfit {

void validate(const WindowSpec& spec, const GameHyper& hyper) {
  if (spec.ensemble_runs < 1) throw ConfigError("ensemble_runs must be >= 1");
  if (spec.in_sample_days < hyper.memory + 1)
    throw ConfigError("in_sample_days must be >= memory + 1 (" +
                      std::to_string(hyper.memory + 1) + ")");
}

std::string to_string(Combiner c) {
  return c == Combiner::MeanDemand ? "mean_demand" : "majority_vote";
}

std::optional<Combiner> combiner_from_string(std::string_view name) {
  if (name == "mean_demand") return Combiner::MeanDemand;
  if (name == "majority_vote") return Combiner::MajorityVote;
  return std::nullopt;
}

std::string to_json_line(const PredictionRecord& r) {
  nlohmann::json j;
  j["t"] = r.t;
  j["date"] = r.date.to_string();
  j["variant"] = to_string(r.variant);
  j["config_id"] = r.config_id;
  j["ga_seed_base"] = r.ga_seed_base;
  j["per_run_demand"] = r.per_run_demand;
  j["mean_demand"] = r.mean_demand;
  j["dispersion"] = r.dispersion;
  j["predicted_sign"] = static_cast<int>(r.predicted_sign);
  j["tie"] = r.tie;
  j["realized_sign"] = static_cast<int>(r.realized_sign);
  j["realized_zero"] = r.realized_zero;
  return j.dump();
}

PredictionRecord record_from_json_line(std::string_view line, int line_no) {
  nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
  const std::string where = "record line " + std::to_string(line_no);
  if (j.is_discarded()) throw DataError(where + ": bad JSON");
  try {
    PredictionRecord r;
    r.t = j.at("t").get<std::size_t>();
    auto date = Date::parse(j.at("date").get<std::string>());
    if (!date) throw DataError(where + ": bad date");
    r.date = *date;
    auto variant = variant_from_string(j.at("variant").get<std::string>());
    if (!variant) throw DataError(where + ": unknown variant");
    r.variant = *variant;
    r.config_id = j.at("config_id").get<std::string>();
    r.ga_seed_base = j.at("ga_seed_base").get<std::uint64_t>();
    r.per_run_demand = j.at("per_run_demand").get<std::vector<int>>();
    r.mean_demand = j.at("mean_demand").get<double>();
    r.dispersion = j.at("dispersion").get<double>();
    r.predicted_sign = static_cast<std::int8_t>(j.at("predicted_sign").get<int>());
    r.tie = j.at("tie").get<bool>();
    r.realized_sign = static_cast<std::int8_t>(j.at("realized_sign").get<int>());
    r.realized_zero = j.at("realized_zero").get<bool>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(where + ": " + e.what());
  }
}

namespace {

// One GA run for one day: train on the in-sample window (clipped view), then
// emit the next-day demand of the best genome.
int ensemble_run_demand(const ReturnSeries& series, std::size_t t, const WindowSpec& spec,
                        const GAConfig& cfg, std::uint64_t ga_seed_base, int k) {
  const std::size_t w = static_cast<std::size_t>(spec.in_sample_days);
  const std::size_t m = static_cast<std::size_t>(cfg.hyper.memory);

  const ReturnView past = view(series, 0, t);  // nothing at or beyond t is reachable
  const ReturnView window = past.sub(t - w, t);
  const auto warm = past.binary.subspan(t - w - m, m);

  GAConfig run_cfg = cfg;
  run_cfg.seed = ga_seed_base ^ static_cast<std::uint64_t>(k);
  run_cfg.workers = 1;  // parallelism lives at the run/day level
  const GARunResult res = run_ga(run_cfg, window, warm);

  ThirdPartyGame game = make_game(cfg.variant, cfg.hyper, res.best_genome);
  run_window(game, warm, window);
  return game.predict_next(past.binary.subspan(t - m, m));
}

PredictionRecord assemble_record(const ReturnSeries& series, std::size_t t,
                                 const GAConfig& cfg, std::uint64_t ga_seed_base,
                                 Combiner combiner, std::vector<int> demands,
                                 const std::string& config_id) {
  PredictionRecord r;
  r.t = t;
  r.date = series.dates[t];
  r.variant = cfg.variant;
  r.config_id = config_id;
  r.ga_seed_base = ga_seed_base;
  r.per_run_demand = std::move(demands);

  const double n_agents = static_cast<double>(cfg.hyper.agents);
  const std::size_t k = r.per_run_demand.size();
  const bool all_equal =
      std::all_of(r.per_run_demand.begin(), r.per_run_demand.end(),
                  [&](int d) { return d == r.per_run_demand.front(); });
  if (all_equal) {
    r.mean_demand = static_cast<double>(r.per_run_demand.front()) / n_agents;
    r.dispersion = 0.0;
  } else {
    double sum = 0;
    for (int d : r.per_run_demand) sum += static_cast<double>(d) / n_agents;
    r.mean_demand = sum / static_cast<double>(k);
    double var = 0;
    for (int d : r.per_run_demand) {
      const double x = static_cast<double>(d) / n_agents - r.mean_demand;
      var += x * x;
    }
    r.dispersion = std::sqrt(var / static_cast<double>(k));
  }

  double signal = r.mean_demand;
  if (combiner == Combiner::MajorityVote) {
    int votes = 0;
    for (int d : r.per_run_demand) votes += sign2(d);
    signal = static_cast<double>(votes);
  }
  if (signal > 0) {
    r.predicted_sign = 1;
  } else if (signal < 0) {
    r.predicted_sign = -1;
  } else {
    r.predicted_sign = -1;  // tie rule, consistent with sign2(0)
    r.tie = true;
  }
  return r;
}

void record_realized(PredictionRecord& r, const ReturnSeries& series) {
  r.realized_sign = series.binary[r.t];
  r.realized_zero = series.r[r.t] == 0.0;
}

}  // namespace

std::uint64_t day_seed_base(std::uint64_t master_seed, GameVariant variant, std::size_t t) {
  return derive_seed(master_seed, {tag("day"), tag(to_string(variant)), t});
}

PredictionRecord predict_day(const ReturnSeries& series, std::size_t t,
                             const WindowSpec& spec, const GAConfig& cfg,
                             std::uint64_t ga_seed_base, Combiner combiner, int workers) {
  validate(spec, cfg.hyper);
  const std::size_t need =
      static_cast<std::size_t>(spec.in_sample_days) + static_cast<std::size_t>(cfg.hyper.memory);
  if (t < need || t > series.size())
    throw ConfigError("predict_day: day index " + std::to_string(t) +
                      " needs at least " + std::to_string(need) + " days of history");

  std::vector<int> demands(static_cast<std::size_t>(spec.ensemble_runs));
  parallel_for(demands.size(), workers, [&](std::size_t i) {
    demands[i] = ensemble_run_demand(series, t, spec, cfg, ga_seed_base,
                                     static_cast<int>(i) + 1);
  });
  return assemble_record(series, t, cfg, ga_seed_base, combiner, std::move(demands),
                         "");
}

std::vector<PredictionRecord> read_records(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::vector<PredictionRecord> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    out.push_back(record_from_json_line(line, line_no));
  }
  return out;
}

ExperimentResult run_experiment(
    const ReturnSeries& series, std::span<const std::size_t> target_days,
    const WindowSpec& spec, const GAConfig& cfg, std::uint64_t master_seed,
    const std::string& config_id, const std::filesystem::path& checkpoint_path,
    Combiner combiner, int workers,
    const std::function<void(std::size_t, std::size_t)>& on_progress) {
  validate(spec, cfg.hyper);
  const std::size_t need =
      static_cast<std::size_t>(spec.in_sample_days) + static_cast<std::size_t>(cfg.hyper.memory);
  for (std::size_t t : target_days)
    if (t < need || t >= series.size())
      throw ConfigError("target day " + std::to_string(t) + " out of range [" +
                        std::to_string(need) + ", " + std::to_string(series.size()) + ")");

  std::vector<std::size_t> days(target_days.begin(), target_days.end());
  std::sort(days.begin(), days.end());
  days.erase(std::unique(days.begin(), days.end()), days.end());

  ExperimentResult result;

  // Resume: records already checkpointed for this variant + parameter set are
  // reused verbatim.
  std::set<std::size_t> done;
  if (!checkpoint_path.empty() && std::filesystem::exists(checkpoint_path)) {
    for (auto& r : read_records(checkpoint_path)) {
      if (r.variant == cfg.variant && r.config_id == config_id) done.insert(r.t);
      result.records.push_back(std::move(r));
    }
  }

  std::vector<std::size_t> todo;
  for (std::size_t t : days)
    if (!done.contains(t)) todo.push_back(t);
  result.resumed = days.size() - todo.size();

  std::ofstream out;
  if (!checkpoint_path.empty()) {
    if (checkpoint_path.has_parent_path())
      std::filesystem::create_directories(checkpoint_path.parent_path());
    out.open(checkpoint_path, std::ios::app);
    if (!out) throw DataError("cannot write " + checkpoint_path.string());
  }

  const int runs = spec.ensemble_runs;
  const std::size_t block_days = static_cast<std::size_t>(std::max(1, resolve_workers(workers)));
  std::size_t progress_done = result.resumed;
  if (on_progress) on_progress(progress_done, days.size());

  for (std::size_t block = 0; block < todo.size(); block += block_days) {
    const std::size_t block_end = std::min(block + block_days, todo.size());
    const std::size_t b = block_end - block;

    // All (day, run) tasks of the block run in parallel; outcomes land in
    // per-index slots so worker count never changes the result.
    std::vector<std::vector<int>> demands(b, std::vector<int>(static_cast<std::size_t>(runs)));
    std::vector<std::uint64_t> seeds(b);
    for (std::size_t i = 0; i < b; ++i)
      seeds[i] = day_seed_base(master_seed, cfg.variant, todo[block + i]);

    parallel_for(b * static_cast<std::size_t>(runs), workers, [&](std::size_t task) {
      const std::size_t i = task / static_cast<std::size_t>(runs);
      const int k = static_cast<int>(task % static_cast<std::size_t>(runs)) + 1;
      demands[i][static_cast<std::size_t>(k - 1)] =
          ensemble_run_demand(series, todo[block + i], spec, cfg, seeds[i], k);
    });

    for (std::size_t i = 0; i < b; ++i) {
      PredictionRecord r = assemble_record(series, todo[block + i], cfg, seeds[i], combiner,
                                           std::move(demands[i]), config_id);
      record_realized(r, series);
      if (out.is_open()) out << to_json_line(r) << '\n';
      result.records.push_back(std::move(r));
      ++result.newly_computed;
      ++progress_done;
      if (on_progress) on_progress(progress_done, days.size());
    }
    if (out.is_open()) out.flush();
  }

  std::sort(result.records.begin(), result.records.end(),
            [](const PredictionRecord& a, const PredictionRecord& b) { return a.t < b.t; });
  return result;
}

BlackboxSeries blackbox_generate(ThirdPartyGame game, std::size_t length,
                                 std::uint64_t seed) {
  const int m = game.hyper().memory;
  if (length < static_cast<std::size_t>(m) + 1)
    throw ConfigError("blackbox series length must be >= memory + 1");

  Rng rng(derive_seed(seed, {tag("blackbox")}));
  BlackboxSeries out;
  std::vector<std::int8_t> symbols;
  symbols.reserve(length);
  for (int i = 0; i < m; ++i) symbols.push_back(rng.sign());

  std::uint32_t idx = history_index(symbols);
  for (std::size_t t = static_cast<std::size_t>(m); t < length; ++t) {
    const int demand = game.decide(idx).excess_demand;
    std::int8_t symbol;
    if (demand == 0) {
      symbol = rng.sign();
      ++out.coin_flip_days;
    } else {
      symbol = demand > 0 ? std::int8_t{1} : std::int8_t{-1};
      out.planted_ever_acted = true;
    }
    game.score_update(idx, symbol);
    idx = push_history(idx, symbol, m);
    symbols.push_back(symbol);
  }

  ReturnSeries& s = out.series;
  s.kind = ReturnKind::Log;
  const Date start = Date::from_ymd(2000, 1, 3);
  for (std::size_t t = 0; t < symbols.size(); ++t) {
    s.dates.push_back(start + static_cast<int>(t));
    s.r.push_back(static_cast<double>(symbols[t]));
    s.binary.push_back(symbols[t]);
    s.ternary.push_back(symbols[t]);
  }
  return out;
}

}  // namespace mgfit
