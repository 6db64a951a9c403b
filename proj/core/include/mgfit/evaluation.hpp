#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mgfit/market_data.hpp"
#include "mgfit/pipeline.hpp"

namespace mgfit {

// Fraction of records whose predicted and realized signs agree.
double success_rate(std::span<const PredictionRecord> records);

// Success counts of fair-coin guessing strategies scored against the fixed
// realized sequence; each count is Binomial(n_days, 1/2).
struct NullDistribution {
  int n_days = 0;
  std::vector<int> success_counts;
  std::uint64_t seed = 0;
};

NullDistribution null_distribution(std::span<const std::int8_t> realized,
                                   int n_strategies, std::uint64_t seed);

// Fraction of random strategies that perform strictly better than observed.
double p_value(double observed_successes, const NullDistribution& null);

// Exact P(X >= k) for X ~ Binomial(n, 1/2); the analytic cross-check for the
// Monte-Carlo null.
double binomial_tail_geq(int n, int k);

// Inclusive date range carrying a regime label, as configured for reporting.
struct RegimeRange {
  Date from;
  Date to;
  RegimeLabel label = RegimeLabel::Unclassified;
};

RegimeLabel label_for_date(std::span<const RegimeRange> ranges, Date date);

struct BucketStats {
  int n_days = 0;
  double successes_avg = 0.0;  // averaged over parameter sets
  double rate_avg = 0.0;
  double rate_min = 0.0;
  double rate_max = 0.0;
  double p = 1.0;
  int n_param_sets = 0;
  double buy_hold = 0.0;   // fraction of up days in the bucket
  double sell_hold = 0.0;  // fraction of down days
};

// Success rates per variant and regime bucket, with min/avg/max across the
// GA parameter sets present in the records (grouped by config_id).
struct SuccessReport {
  struct Row {
    GameVariant variant = GameVariant::GCMjG;
    BucketStats all;
    BucketStats trending;      // TrendingUp plus TrendingDown days
    BucketStats non_trending;
    BucketStats unclassified;  // days outside every configured range
  };
  std::vector<Row> rows;
  int n_strategies = 0;
  std::uint64_t null_seed = 0;
  int zero_return_days = 0;
  int tie_days = 0;
};

SuccessReport build_report(std::span<const PredictionRecord> records,
                           std::span<const RegimeRange> regimes, int n_strategies,
                           std::uint64_t null_seed);

// Fixed-width table, one "(p) rate | min | max" row per variant per bucket.
std::string render_text(const SuccessReport& report);
std::string render_json(const SuccessReport& report);

}  // namespace mgfit
