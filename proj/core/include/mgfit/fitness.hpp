#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mgfit/game.hpp"
#include "mgfit/market_data.hpp"

namespace mgfit {

// The similarity measures between a game's excess-demand series and the
// external return series. CrossCorrelation is the optional fifth measure
// (1 - Pearson correlation); it is not a metric and is excluded from the
// metric-axiom guarantees of the other four.
enum class Metric { L1, L2, HammingBinary, HammingTernary, CrossCorrelation };

std::string to_string(Metric m);
std::optional<Metric> metric_from_string(std::string_view name);  // "l1" "l2" "hamming2" "hamming3" "xcorr"

struct MetricOptions {
  // sign2(0): false -> -1 (an abstaining market disagrees with an up day),
  // true -> +1.
  bool zero_demand_up = false;
};

struct FitnessValue {
  double distance = 0.0;  // >= 0, 0 iff the coded series coincide
  double fitness = 0.0;   // -distance; the GA maximizes this

  static FitnessValue from_distance(double d) { return {d, -d}; }
};

std::int8_t sign2(int demand, bool zero_up = false);
std::int8_t sign3(int demand);

// Rescales integer demand to the return scale by matching in-sample standard
// deviations: r_hat(t) = A(t) * sigma_ext / sigma_A. A flat demand series
// maps to all zeros; a flat external window is an error.
std::vector<double> normalize_demand(std::span<const int> demand,
                                     std::span<const double> external);

// Metric cores on already-coded sequences; the metric axioms (nonnegativity,
// identity, symmetry, triangle inequality) hold at this layer.
double l1_distance(std::span<const double> x, std::span<const double> y);
double l2_distance(std::span<const double> x, std::span<const double> y);
int hamming_distance(std::span<const std::int8_t> x, std::span<const std::int8_t> y);
double xcorr_distance(std::span<const double> x, std::span<const double> y);

// Codes both series per the metric and measures their distance.
FitnessValue distance(Metric metric, std::span<const MarketStep> steps,
                      const ReturnView& external, const MetricOptions& opt = {});
FitnessValue distance(Metric metric, std::span<const int> demand,
                      const ReturnView& external, const MetricOptions& opt = {});

}  // namespace mgfit
