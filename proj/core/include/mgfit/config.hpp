#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mgfit/blackbox.hpp"
#include "mgfit/evaluation.hpp"
#include "mgfit/pipeline.hpp"

namespace mgfit {

// Which prediction days to run: the first eligible day on/after `start`
// (default: the earliest with enough history), capped at `count` days
// (default: all remaining).
struct DaySelection {
  std::optional<Date> start;
  std::optional<int> count;
};

// One run configuration; every field has a default and can be overridden in
// the JSON config file. The resolved form is copied into the output
// directory so a run can be reproduced bit for bit.
struct RunConfig {
  std::filesystem::path data_csv;
  ReturnKind return_kind = ReturnKind::Log;
  std::vector<GameVariant> variants = {GameVariant::GCMjG};
  WindowSpec window;
  GAConfig ga;
  DaySelection days;
  std::vector<RegimeRange> regimes;
  std::filesystem::path output_dir;
  std::uint64_t master_seed = 0;
  int workers = 0;  // 0 -> hardware concurrency
  bool resume = true;
  std::string config_id;  // parameter-set label; defaults to a GA fingerprint
  int null_strategies = 1000;
  Combiner combiner = Combiner::MeanDemand;
  std::optional<BlackboxSpec> blackbox;
};

RunConfig load_config(const std::filesystem::path& json_path);  // throws ConfigError
RunConfig config_from_json(std::string_view text);

// Fills derived defaults (config_id) and checks invariants common to all
// commands; each command re-checks what it additionally needs.
void finalize(RunConfig& cfg);

std::string to_json(const RunConfig& cfg);

// Generated reference for the config file: every key, type, and default.
std::string config_reference();

}  // namespace mgfit
