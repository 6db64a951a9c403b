#include "mgfit/fitness.hpp"

#include <cmath>

#include "mgfit/errors.hpp"

namespace mgfit {
namespace {

void check_lengths(std::size_t a, std::size_t b) {
  if (a == 0) throw GameError("empty series");
  if (a != b)
    throw GameError("length mismatch: " + std::to_string(a) + " vs " + std::to_string(b));
}

double mean_of(std::span<const double> x) {
  double s = 0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

double stddev_of(std::span<const double> x) {
  const double m = mean_of(x);
  double s = 0;
  for (double v : x) s += (v - m) * (v - m);
  return std::sqrt(s / static_cast<double>(x.size()));
}

}  // namespace

std::string to_string(Metric m) {
  switch (m) {
    case Metric::L1: return "l1";
    case Metric::L2: return "l2";
    case Metric::HammingBinary: return "hamming2";
    case Metric::HammingTernary: return "hamming3";
    case Metric::CrossCorrelation: return "xcorr";
  }
  return "l2";
}

std::optional<Metric> metric_from_string(std::string_view name) {
  if (name == "l1") return Metric::L1;
  if (name == "l2") return Metric::L2;
  if (name == "hamming2") return Metric::HammingBinary;
  if (name == "hamming3") return Metric::HammingTernary;
  if (name == "xcorr") return Metric::CrossCorrelation;
  return std::nullopt;
}

std::int8_t sign2(int demand, bool zero_up) {
  if (demand > 0) return 1;
  if (demand < 0) return -1;
  return zero_up ? std::int8_t{1} : std::int8_t{-1};
}

std::int8_t sign3(int demand) {
  return demand > 0 ? std::int8_t{1} : demand < 0 ? std::int8_t{-1} : std::int8_t{0};
}

std::vector<double> normalize_demand(std::span<const int> demand,
                                     std::span<const double> external) {
  check_lengths(demand.size(), external.size());
  const double sigma_ext = stddev_of(external);
  if (sigma_ext == 0.0) throw GameError("flat external window: sigma is zero");

  std::vector<double> as_double(demand.begin(), demand.end());
  const double sigma_a = stddev_of(as_double);
  std::vector<double> out(demand.size(), 0.0);
  if (sigma_a == 0.0) return out;

  const double ratio = sigma_ext / sigma_a;
  for (std::size_t t = 0; t < demand.size(); ++t)
    out[t] = static_cast<double>(demand[t]) * ratio;
  return out;
}

double l1_distance(std::span<const double> x, std::span<const double> y) {
  check_lengths(x.size(), y.size());
  double s = 0;
  for (std::size_t i = 0; i < x.size(); ++i) s += std::abs(x[i] - y[i]);
  return s;
}

double l2_distance(std::span<const double> x, std::span<const double> y) {
  check_lengths(x.size(), y.size());
  double s = 0;
  for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - y[i]) * (x[i] - y[i]);
  return std::sqrt(s);
}

int hamming_distance(std::span<const std::int8_t> x, std::span<const std::int8_t> y) {
  check_lengths(x.size(), y.size());
  int d = 0;
  for (std::size_t i = 0; i < x.size(); ++i) d += x[i] != y[i];
  return d;
}

double xcorr_distance(std::span<const double> x, std::span<const double> y) {
  check_lengths(x.size(), y.size());
  const double mx = mean_of(x), my = mean_of(y);
  double sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 1.0;  // degenerate: no correlation signal
  return 1.0 - sxy / std::sqrt(sxx * syy);
}

FitnessValue distance(Metric metric, std::span<const MarketStep> steps,
                      const ReturnView& external, const MetricOptions& opt) {
  const auto d = demands(steps);
  return distance(metric, d, external, opt);
}

FitnessValue distance(Metric metric, std::span<const int> demand,
                      const ReturnView& external, const MetricOptions& opt) {
  check_lengths(demand.size(), external.size());
  switch (metric) {
    case Metric::L1:
      return FitnessValue::from_distance(l1_distance(normalize_demand(demand, external.r),
                                                     external.r));
    case Metric::L2:
      return FitnessValue::from_distance(l2_distance(normalize_demand(demand, external.r),
                                                     external.r));
    case Metric::HammingBinary: {
      std::vector<std::int8_t> coded(demand.size());
      for (std::size_t t = 0; t < demand.size(); ++t)
        coded[t] = sign2(demand[t], opt.zero_demand_up);
      return FitnessValue::from_distance(hamming_distance(coded, external.binary));
    }
    case Metric::HammingTernary: {
      std::vector<std::int8_t> coded(demand.size());
      for (std::size_t t = 0; t < demand.size(); ++t) coded[t] = sign3(demand[t]);
      return FitnessValue::from_distance(hamming_distance(coded, external.ternary));
    }
    case Metric::CrossCorrelation: {
      std::vector<double> as_double(demand.begin(), demand.end());
      return FitnessValue::from_distance(xcorr_distance(as_double, external.r));
    }
  }
  throw GameError("unknown metric");
}

}  // namespace mgfit
