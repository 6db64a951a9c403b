#include "mgfit/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "mgfit/errors.hpp"
#include "mgfit/rng.hpp"

namespace mgfit {
namespace {

using nlohmann::json;

void expect_keys(const json& j, const std::string& where,
                 const std::set<std::string>& allowed) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, value] : j.items())
    if (!allowed.contains(key))
      throw ConfigError(where + ": unknown key '" + key + "'");
}

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("config: bad value for '") + key + "'");
  }
}

Date read_date(const json& j, const char* key, const std::string& where) {
  const auto text = j.at(key).get<std::string>();
  const auto date = Date::parse(text);
  if (!date) throw ConfigError(where + ": bad date '" + text + "'");
  return *date;
}

GameHyper parse_hyper(const json& j, const std::string& where) {
  expect_keys(j, where, {"agents", "strategies", "memory", "threshold"});
  GameHyper h;
  read(j, "agents", h.agents);
  read(j, "strategies", h.strategies);
  read(j, "memory", h.memory);
  read(j, "threshold", h.threshold);
  return h;
}

GAConfig parse_ga(const json& j) {
  expect_keys(j, "ga",
              {"population_size", "max_generations", "elite_count", "crossover_rate",
               "mutation_rate_per_bit", "stall_generations", "min_improvement", "metric",
               "zero_demand_up", "strategy_granular_crossover", "hyper"});
  GAConfig ga;
  read(j, "population_size", ga.population_size);
  read(j, "max_generations", ga.max_generations);
  read(j, "elite_count", ga.elite_count);
  read(j, "crossover_rate", ga.crossover_rate);
  read(j, "mutation_rate_per_bit", ga.mutation_rate_per_bit);
  read(j, "stall_generations", ga.stall_generations);
  read(j, "min_improvement", ga.min_improvement);
  read(j, "zero_demand_up", ga.metric_options.zero_demand_up);
  read(j, "strategy_granular_crossover", ga.strategy_granular_crossover);
  if (j.contains("metric")) {
    const auto name = j.at("metric").get<std::string>();
    const auto metric = metric_from_string(name);
    if (!metric) throw ConfigError("ga: unknown metric '" + name + "'");
    ga.metric = *metric;
  }
  if (j.contains("hyper")) ga.hyper = parse_hyper(j.at("hyper"), "ga.hyper");
  return ga;
}

BlackboxSpec parse_blackbox(const json& j) {
  expect_keys(j, "blackbox",
              {"variant", "hyper", "series_length", "holdout_days", "planted_seed",
               "random_baseline"});
  BlackboxSpec spec;
  if (j.contains("variant")) {
    const auto name = j.at("variant").get<std::string>();
    const auto v = variant_from_string(name);
    if (!v) throw ConfigError("blackbox: unknown variant '" + name + "'");
    spec.variant = *v;
  }
  if (j.contains("hyper")) spec.hyper = parse_hyper(j.at("hyper"), "blackbox.hyper");
  read(j, "series_length", spec.series_length);
  read(j, "holdout_days", spec.holdout_days);
  read(j, "planted_seed", spec.planted_seed);
  read(j, "random_baseline", spec.random_baseline);
  return spec;
}

json hyper_json(const GameHyper& h) {
  return {{"agents", h.agents},
          {"strategies", h.strategies},
          {"memory", h.memory},
          {"threshold", h.threshold}};
}

}  // namespace

RunConfig config_from_json(std::string_view text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw ConfigError("config: not valid JSON");
  expect_keys(j, "config",
              {"data_csv", "return_kind", "variants", "window", "ga", "days", "regimes",
               "output_dir", "seed", "workers", "resume", "config_id", "null_strategies",
               "combiner", "blackbox"});

  RunConfig cfg;
  if (j.contains("data_csv")) cfg.data_csv = j.at("data_csv").get<std::string>();
  if (j.contains("return_kind")) {
    const auto kind = j.at("return_kind").get<std::string>();
    if (kind == "log")
      cfg.return_kind = ReturnKind::Log;
    else if (kind == "simple")
      cfg.return_kind = ReturnKind::Simple;
    else
      throw ConfigError("config: return_kind must be 'log' or 'simple'");
  }
  if (j.contains("variants")) {
    cfg.variants.clear();
    for (const auto& name : j.at("variants")) {
      const auto v = variant_from_string(name.get<std::string>());
      if (!v) throw ConfigError("config: unknown variant '" + name.get<std::string>() + "'");
      cfg.variants.push_back(*v);
    }
  }
  if (j.contains("window")) {
    const auto& w = j.at("window");
    expect_keys(w, "window", {"in_sample_days", "ensemble_runs"});
    read(w, "in_sample_days", cfg.window.in_sample_days);
    read(w, "ensemble_runs", cfg.window.ensemble_runs);
  }
  if (j.contains("ga")) cfg.ga = parse_ga(j.at("ga"));
  if (j.contains("days")) {
    const auto& d = j.at("days");
    expect_keys(d, "days", {"start", "count"});
    if (d.contains("start")) cfg.days.start = read_date(d, "start", "days");
    if (d.contains("count")) cfg.days.count = d.at("count").get<int>();
  }
  if (j.contains("regimes")) {
    for (const auto& r : j.at("regimes")) {
      expect_keys(r, "regimes[]", {"from", "to", "label"});
      RegimeRange range;
      range.from = read_date(r, "from", "regimes[]");
      range.to = read_date(r, "to", "regimes[]");
      const auto name = r.at("label").get<std::string>();
      const auto label = regime_from_string(name);
      if (!label) throw ConfigError("regimes[]: unknown label '" + name + "'");
      range.label = *label;
      if (range.to < range.from) throw ConfigError("regimes[]: to earlier than from");
      cfg.regimes.push_back(range);
    }
  }
  if (j.contains("output_dir")) cfg.output_dir = j.at("output_dir").get<std::string>();
  read(j, "seed", cfg.master_seed);
  read(j, "workers", cfg.workers);
  read(j, "resume", cfg.resume);
  read(j, "config_id", cfg.config_id);
  read(j, "null_strategies", cfg.null_strategies);
  if (j.contains("combiner")) {
    const auto name = j.at("combiner").get<std::string>();
    const auto c = combiner_from_string(name);
    if (!c) throw ConfigError("config: unknown combiner '" + name + "'");
    cfg.combiner = *c;
  }
  if (j.contains("blackbox")) cfg.blackbox = parse_blackbox(j.at("blackbox"));
  return cfg;
}

RunConfig load_config(const std::filesystem::path& json_path) {
  std::ifstream in(json_path);
  if (!in) throw ConfigError("cannot open config " + json_path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return config_from_json(buf.str());
}

void finalize(RunConfig& cfg) {
  validate(cfg.ga);
  validate(cfg.window, cfg.ga.hyper);
  if (cfg.variants.empty()) throw ConfigError("config: no variants requested");
  if (cfg.null_strategies < 1) throw ConfigError("config: null_strategies must be >= 1");
  if (cfg.blackbox) validate(*cfg.blackbox, cfg.window);
  if (cfg.config_id.empty()) {
    // Fingerprint of the GA parameter set, so records from different
    // parameter sets can be told apart in one report.
    const std::uint64_t h = derive_seed(
        0, {static_cast<std::uint64_t>(cfg.ga.population_size),
            static_cast<std::uint64_t>(cfg.ga.max_generations),
            static_cast<std::uint64_t>(cfg.ga.elite_count),
            static_cast<std::uint64_t>(cfg.ga.crossover_rate * 1e9),
            static_cast<std::uint64_t>(cfg.ga.mutation_rate_per_bit * 1e9),
            static_cast<std::uint64_t>(cfg.ga.stall_generations),
            tag(to_string(cfg.ga.metric)),
            static_cast<std::uint64_t>(cfg.ga.hyper.agents),
            static_cast<std::uint64_t>(cfg.ga.hyper.strategies),
            static_cast<std::uint64_t>(cfg.ga.hyper.memory),
            static_cast<std::uint64_t>(cfg.ga.hyper.threshold * 1e9),
            static_cast<std::uint64_t>(cfg.window.in_sample_days),
            static_cast<std::uint64_t>(cfg.window.ensemble_runs)});
    char buf[24];
    std::snprintf(buf, sizeof(buf), "ga-%016llx", static_cast<unsigned long long>(h));
    cfg.config_id = buf;
  }
}

std::string to_json(const RunConfig& cfg) {
  json j;
  j["data_csv"] = cfg.data_csv.string();
  j["return_kind"] = cfg.return_kind == ReturnKind::Log ? "log" : "simple";
  std::vector<std::string> variants;
  for (auto v : cfg.variants) variants.push_back(to_string(v));
  j["variants"] = variants;
  j["window"] = {{"in_sample_days", cfg.window.in_sample_days},
                 {"ensemble_runs", cfg.window.ensemble_runs}};
  j["ga"] = {{"population_size", cfg.ga.population_size},
             {"max_generations", cfg.ga.max_generations},
             {"elite_count", cfg.ga.elite_count},
             {"crossover_rate", cfg.ga.crossover_rate},
             {"mutation_rate_per_bit", cfg.ga.mutation_rate_per_bit},
             {"stall_generations", cfg.ga.stall_generations},
             {"min_improvement", cfg.ga.min_improvement},
             {"metric", to_string(cfg.ga.metric)},
             {"zero_demand_up", cfg.ga.metric_options.zero_demand_up},
             {"strategy_granular_crossover", cfg.ga.strategy_granular_crossover},
             {"hyper", hyper_json(cfg.ga.hyper)}};
  json days = json::object();
  if (cfg.days.start) days["start"] = cfg.days.start->to_string();
  if (cfg.days.count) days["count"] = *cfg.days.count;
  j["days"] = days;
  json regimes = json::array();
  for (const auto& r : cfg.regimes)
    regimes.push_back({{"from", r.from.to_string()},
                       {"to", r.to.to_string()},
                       {"label", to_string(r.label)}});
  j["regimes"] = regimes;
  j["output_dir"] = cfg.output_dir.string();
  j["seed"] = cfg.master_seed;
  j["workers"] = cfg.workers;
  j["resume"] = cfg.resume;
  j["config_id"] = cfg.config_id;
  j["null_strategies"] = cfg.null_strategies;
  j["combiner"] = to_string(cfg.combiner);
  if (cfg.blackbox) {
    const auto& b = *cfg.blackbox;
    j["blackbox"] = {{"variant", to_string(b.variant)},
                     {"hyper", hyper_json(b.hyper)},
                     {"series_length", b.series_length},
                     {"holdout_days", b.holdout_days},
                     {"planted_seed", b.planted_seed},
                     {"random_baseline", b.random_baseline}};
  }
  return j.dump(2);
}

std::string config_reference() {
  RunConfig defaults;
  finalize(defaults);
  std::ostringstream out;
  out << "Config file reference (JSON). Every key is optional unless the\n"
         "subcommand needs it; values below are the defaults.\n\n"
      << to_json(defaults) << "\n\n"
      << "data_csv        predict: daily price CSV with 'date' and 'close' columns\n"
         "return_kind     'log' or 'simple'\n"
         "variants        any subset of GCMG, GCMjG, delGCMjG, delGCMG, MixG\n"
         "window          in_sample_days (>= memory+1), ensemble_runs per day\n"
         "ga              SGA parameters; hyper = {agents, strategies, memory (<=6),\n"
         "                threshold}; metric one of l1, l2, hamming2, hamming3, xcorr\n"
         "days            start (ISO date) and count limit prediction days\n"
         "regimes         date ranges labeled trending_up / trending_down /\n"
         "                non_trending for the report buckets\n"
         "output_dir      run artifacts: records_<variant>.jsonl, report.json/.txt,\n"
         "                resolved_config.json\n"
         "seed            master seed; every stream derives from it\n"
         "workers         thread budget, 0 = all cores (never changes results)\n"
         "resume          reuse checkpointed records when rerunning\n"
         "config_id       parameter-set label used in records; default: fingerprint\n"
         "null_strategies random strategies behind each p-value\n"
         "combiner        'mean_demand' or 'majority_vote'\n"
         "blackbox        planted-ensemble experiment; see the blackbox subcommand\n";
  return out.str();
}

}  // namespace mgfit
