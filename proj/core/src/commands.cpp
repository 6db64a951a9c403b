#include "mgfit/commands.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>

#include "mgfit/errors.hpp"

namespace mgfit {
namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << content;
}

void prepare_output_dir(const RunConfig& cfg) {
  if (cfg.output_dir.empty()) throw ConfigError("config: output_dir is required");
  std::filesystem::create_directories(cfg.output_dir);
  // Exact resolved config + master seed, for provenance and bit-identical reruns.
  write_file(cfg.output_dir / "resolved_config.json", to_json(cfg) + "\n");
}

std::vector<std::size_t> select_days(const RunConfig& cfg, const ReturnSeries& returns) {
  const std::size_t first_eligible = static_cast<std::size_t>(cfg.window.in_sample_days) +
                                     static_cast<std::size_t>(cfg.ga.hyper.memory);
  if (first_eligible >= returns.size())
    throw ConfigError("series too short: " + std::to_string(returns.size()) +
                      " returns, need > " + std::to_string(first_eligible));
  std::vector<std::size_t> days;
  for (std::size_t t = first_eligible; t < returns.size(); ++t) {
    if (cfg.days.start && returns.dates[t] < *cfg.days.start) continue;
    days.push_back(t);
    if (cfg.days.count && days.size() == static_cast<std::size_t>(*cfg.days.count)) break;
  }
  if (days.empty()) throw ConfigError("day selection matches no eligible days");
  return days;
}

std::vector<PredictionRecord> read_all_records(const std::filesystem::path& dir) {
  std::vector<PredictionRecord> records;
  if (!std::filesystem::is_directory(dir)) return records;
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    const auto name = entry.path().filename().string();
    if (name.starts_with("records_") && name.ends_with(".jsonl"))
      files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& file : files) {
    auto part = read_records(file);
    records.insert(records.end(), part.begin(), part.end());
  }
  return records;
}

void write_report(const RunConfig& cfg, std::span<const PredictionRecord> records,
                  std::ostream& log) {
  const auto report = build_report(records, cfg.regimes, cfg.null_strategies,
                                   derive_seed(cfg.master_seed, {tag("report")}));
  const auto text = render_text(report);
  write_file(cfg.output_dir / "report.json", render_json(report) + "\n");
  write_file(cfg.output_dir / "report.txt", text);
  log << text;
}

}  // namespace

void cmd_predict(const RunConfig& cfg, std::ostream& log) {
  if (cfg.data_csv.empty()) throw ConfigError("config: data_csv is required for predict");
  const PriceSeries prices = load_prices(cfg.data_csv);
  const ReturnSeries returns = to_returns(prices, cfg.return_kind);
  if (const auto zeros = returns.zero_days(); zeros > 0)
    log << "note: " << zeros << " zero-return day(s) code to +1 in the binary series\n";

  const auto days = select_days(cfg, returns);
  prepare_output_dir(cfg);

  std::vector<PredictionRecord> all_records;
  for (const GameVariant variant : cfg.variants) {
    GAConfig ga = cfg.ga;
    ga.variant = variant;
    const auto checkpoint = cfg.output_dir / ("records_" + to_string(variant) + ".jsonl");
    if (!cfg.resume) std::filesystem::remove(checkpoint);

    const auto name = to_string(variant);
    auto progress = [&](std::size_t done, std::size_t total) {
      if (done == total || done % 10 == 0)
        log << name << ": " << done << "/" << total << " days\n";
    };
    const auto result =
        run_experiment(returns, days, cfg.window, ga, cfg.master_seed, cfg.config_id,
                       checkpoint, cfg.combiner, cfg.workers, progress);
    log << name << ": " << result.newly_computed << " computed, " << result.resumed
        << " resumed from checkpoint\n";
    all_records.insert(all_records.end(), result.records.begin(), result.records.end());
  }
  write_report(cfg, all_records, log);
}

void cmd_blackbox(const RunConfig& cfg, std::ostream& log) {
  if (!cfg.blackbox) throw ConfigError("config: blackbox section is required");
  prepare_output_dir(cfg);

  const auto experiment =
      run_blackbox(*cfg.blackbox, cfg.ga, cfg.window, cfg.master_seed, cfg.workers);
  write_file(cfg.output_dir / "blackbox.json", to_json(experiment) + "\n");

  std::ofstream holdout(cfg.output_dir / "holdout_records.jsonl");
  for (const auto& r : experiment.holdout_records) holdout << to_json_line(r) << '\n';

  const auto& sc = experiment.scorecard;
  if (!experiment.generated.planted_ever_acted)
    log << "warning: planted game never traded; series is all coin flips\n";
  log << "blackbox: fitness " << sc.fitness_achieved.fitness << " (distance "
      << sc.fitness_achieved.distance << "), baseline percentile "
      << sc.baseline_percentile << "\n"
      << "blackbox: holdout accuracy " << sc.holdout_accuracy << " ("
      << sc.holdout_successes << "/" << sc.holdout_days << "), binomial p "
      << sc.binomial_p << "\n"
      << "blackbox: genome bit agreement " << sc.genome_bit_agreement
      << " (informational)\n";
}

void cmd_report(const RunConfig& cfg, std::ostream& log) {
  if (cfg.output_dir.empty()) throw ConfigError("config: output_dir is required");
  const auto records = read_all_records(cfg.output_dir);
  if (records.empty())
    throw ConfigError("no records found under " + cfg.output_dir.string());
  write_report(cfg, records, log);
}

}  // namespace mgfit
