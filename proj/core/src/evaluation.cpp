#include "mgfit/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "mgfit/errors.hpp"
#include "mgfit/rng.hpp"

namespace mgfit {

double success_rate(std::span<const PredictionRecord> records) {
  if (records.empty()) throw ConfigError("success_rate: no records");
  std::size_t hits = 0;
  for (const auto& r : records) hits += r.predicted_sign == r.realized_sign;
  return static_cast<double>(hits) / static_cast<double>(records.size());
}

NullDistribution null_distribution(std::span<const std::int8_t> realized,
                                   int n_strategies, std::uint64_t seed) {
  if (realized.empty()) throw ConfigError("null_distribution: no realized signs");
  NullDistribution null;
  null.n_days = static_cast<int>(realized.size());
  null.seed = seed;
  null.success_counts.resize(static_cast<std::size_t>(n_strategies));
  for (int s = 0; s < n_strategies; ++s) {
    Rng rng(derive_seed(seed, {tag("null"), static_cast<std::uint64_t>(s)}));
    int hits = 0;
    for (std::int8_t real : realized) hits += rng.sign() == real;
    null.success_counts[static_cast<std::size_t>(s)] = hits;
  }
  return null;
}

double p_value(double observed_successes, const NullDistribution& null) {
  if (null.success_counts.empty()) return 1.0;
  std::size_t better = 0;
  for (int c : null.success_counts)
    better += static_cast<double>(c) > observed_successes;
  return static_cast<double>(better) / static_cast<double>(null.success_counts.size());
}

double binomial_tail_geq(int n, int k) {
  if (k <= 0) return 1.0;
  if (k > n) return 0.0;
  long double sum = 0.0L;
  const long double log2n = static_cast<long double>(n) * std::log(2.0L);
  for (int j = k; j <= n; ++j) {
    const long double log_c = std::lgammal(n + 1.0L) - std::lgammal(j + 1.0L) -
                              std::lgammal(n - j + 1.0L);
    sum += std::expl(log_c - log2n);
  }
  return static_cast<double>(std::min(sum, 1.0L));
}

RegimeLabel label_for_date(std::span<const RegimeRange> ranges, Date date) {
  for (const auto& range : ranges)
    if (range.from <= date && date <= range.to) return range.label;
  return RegimeLabel::Unclassified;
}

namespace {

enum class Bucket { All, Trending, NonTrending, Unclassified };

Bucket bucket_of(RegimeLabel label) {
  switch (label) {
    case RegimeLabel::TrendingUp:
    case RegimeLabel::TrendingDown:
      return Bucket::Trending;
    case RegimeLabel::NonTrending:
      return Bucket::NonTrending;
    case RegimeLabel::Unclassified:
      return Bucket::Unclassified;
  }
  return Bucket::Unclassified;
}

bool in_bucket(Bucket bucket, RegimeLabel label) {
  return bucket == Bucket::All || bucket_of(label) == bucket;
}

BucketStats compute_bucket(std::span<const PredictionRecord*> records, Bucket bucket,
                           std::span<const RegimeRange> regimes, int n_strategies,
                           std::uint64_t null_seed, std::uint64_t bucket_id) {
  BucketStats stats;

  // Distinct days drive n_days and the hold benchmarks; parameter sets
  // (config_id groups) drive the rate spread.
  std::set<std::size_t> day_set;
  int up = 0, down = 0;
  std::map<std::string, std::pair<int, int>> per_set;  // config_id -> (hits, n)
  for (const auto* r : records) {
    if (!in_bucket(bucket, label_for_date(regimes, r->date))) continue;
    if (day_set.insert(r->t).second) {
      up += r->realized_sign > 0;
      down += r->realized_sign < 0;
    }
    auto& [hits, n] = per_set[r->config_id];
    hits += r->predicted_sign == r->realized_sign;
    n += 1;
  }
  stats.n_days = static_cast<int>(day_set.size());
  if (stats.n_days == 0) return stats;

  stats.buy_hold = static_cast<double>(up) / static_cast<double>(stats.n_days);
  stats.sell_hold = static_cast<double>(down) / static_cast<double>(stats.n_days);

  stats.n_param_sets = static_cast<int>(per_set.size());
  double rate_sum = 0, succ_sum = 0;
  stats.rate_min = 1.0;
  stats.rate_max = 0.0;
  for (const auto& [id, hn] : per_set) {
    const double rate = static_cast<double>(hn.first) / static_cast<double>(hn.second);
    rate_sum += rate;
    succ_sum += static_cast<double>(hn.first);
    stats.rate_min = std::min(stats.rate_min, rate);
    stats.rate_max = std::max(stats.rate_max, rate);
  }
  stats.rate_avg = rate_sum / static_cast<double>(per_set.size());
  stats.successes_avg = succ_sum / static_cast<double>(per_set.size());

  // Monte-Carlo null sized to the bucket, shared across parameter sets.
  std::vector<std::int8_t> realized;
  realized.reserve(day_set.size());
  std::set<std::size_t> seen;
  for (const auto* r : records) {
    if (!in_bucket(bucket, label_for_date(regimes, r->date))) continue;
    if (seen.insert(r->t).second) realized.push_back(r->realized_sign);
  }
  const auto null = null_distribution(
      realized, n_strategies, derive_seed(null_seed, {tag("bucket"), bucket_id}));
  stats.p = p_value(stats.successes_avg, null);
  return stats;
}

struct BucketNames {
  Bucket bucket;
  const char* key;
  const char* heading;
};

constexpr BucketNames kBuckets[] = {
    {Bucket::All, "all", "All periods"},
    {Bucket::Trending, "trending", "Trending periods"},
    {Bucket::NonTrending, "non_trending", "Non-trending periods"},
};

}  // namespace

SuccessReport build_report(std::span<const PredictionRecord> records,
                           std::span<const RegimeRange> regimes, int n_strategies,
                           std::uint64_t null_seed) {
  if (records.empty()) throw ConfigError("build_report: no records");

  SuccessReport report;
  report.n_strategies = n_strategies;
  report.null_seed = null_seed;

  std::set<std::size_t> zero_days, tie_days;
  for (const auto& r : records) {
    if (r.realized_zero) zero_days.insert(r.t);
    if (r.tie) tie_days.insert(r.t);
  }
  report.zero_return_days = static_cast<int>(zero_days.size());
  report.tie_days = static_cast<int>(tie_days.size());

  for (GameVariant variant : all_variants()) {
    std::vector<const PredictionRecord*> of_variant;
    for (const auto& r : records)
      if (r.variant == variant) of_variant.push_back(&r);
    if (of_variant.empty()) continue;

    SuccessReport::Row row;
    row.variant = variant;
    const std::uint64_t vtag = tag(to_string(variant));
    row.all = compute_bucket(of_variant, Bucket::All, regimes, n_strategies, null_seed,
                             derive_seed(vtag, {0}));
    row.trending = compute_bucket(of_variant, Bucket::Trending, regimes, n_strategies,
                                  null_seed, derive_seed(vtag, {1}));
    row.non_trending = compute_bucket(of_variant, Bucket::NonTrending, regimes,
                                      n_strategies, null_seed, derive_seed(vtag, {2}));
    row.unclassified = compute_bucket(of_variant, Bucket::Unclassified, regimes,
                                      n_strategies, null_seed, derive_seed(vtag, {3}));
    report.rows.push_back(std::move(row));
  }
  return report;
}

namespace {

const BucketStats& stats_for(const SuccessReport::Row& row, Bucket bucket) {
  switch (bucket) {
    case Bucket::All: return row.all;
    case Bucket::Trending: return row.trending;
    case Bucket::NonTrending: return row.non_trending;
    case Bucket::Unclassified: return row.unclassified;
  }
  return row.all;
}

std::string format_row(const BucketStats& s) {
  char buf[96];
  if (s.n_days == 0) {
    std::snprintf(buf, sizeof(buf), "n=0");
    return buf;
  }
  std::snprintf(buf, sizeof(buf), "(%.2f) %.2f | %.2f | %.2f", s.p, s.rate_avg,
                s.rate_min, s.rate_max);
  return buf;
}

nlohmann::json bucket_json(const BucketStats& s) {
  return {{"n_days", s.n_days},
          {"successes_avg", s.successes_avg},
          {"rate_avg", s.rate_avg},
          {"rate_min", s.rate_min},
          {"rate_max", s.rate_max},
          {"p_value", s.p},
          {"n_param_sets", s.n_param_sets},
          {"buy_hold", s.buy_hold},
          {"sell_hold", s.sell_hold}};
}

}  // namespace

std::string render_text(const SuccessReport& report) {
  std::ostringstream out;
  out << "agent type   (p-val) avg |  min |  max\n";
  for (const auto& names : kBuckets) {
    out << "---- " << names.heading << " ----\n";
    for (const auto& row : report.rows) {
      char line[128];
      std::snprintf(line, sizeof(line), "%-10s %s\n", to_string(row.variant).c_str(),
                    format_row(stats_for(row, names.bucket)).c_str());
      out << line;
    }
  }
  out << "---- Benchmarks (buy-and-hold / sell-and-hold) ----\n";
  for (const auto& names : kBuckets) {
    if (report.rows.empty()) break;
    const auto& s = stats_for(report.rows.front(), names.bucket);
    char line[128];
    if (s.n_days == 0)
      std::snprintf(line, sizeof(line), "%-22s n=0\n", names.heading);
    else
      std::snprintf(line, sizeof(line), "%-22s n=%-5d buy %.2f  sell %.2f\n",
                    names.heading, s.n_days, s.buy_hold, s.sell_hold);
    out << line;
  }
  out << "unclassified days: "
      << (report.rows.empty() ? 0 : report.rows.front().unclassified.n_days)
      << "  tie days: " << report.tie_days
      << "  zero-return days: " << report.zero_return_days
      << "  random strategies: " << report.n_strategies << "\n";
  return out.str();
}

std::string render_json(const SuccessReport& report) {
  nlohmann::json j;
  j["n_strategies"] = report.n_strategies;
  j["null_seed"] = report.null_seed;
  j["zero_return_days"] = report.zero_return_days;
  j["tie_days"] = report.tie_days;
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : report.rows) {
    nlohmann::json r;
    r["variant"] = to_string(row.variant);
    r["all"] = bucket_json(row.all);
    r["trending"] = bucket_json(row.trending);
    r["non_trending"] = bucket_json(row.non_trending);
    r["unclassified"] = bucket_json(row.unclassified);
    rows.push_back(std::move(r));
  }
  j["rows"] = rows;
  return j.dump(2);
}

}  // namespace mgfit
