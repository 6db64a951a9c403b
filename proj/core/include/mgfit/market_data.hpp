#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mgfit/dates.hpp"

namespace mgfit {

struct PricePoint {
  Date date;
  double close = 0.0;
};

// Daily closes: strictly increasing dates, strictly positive prices, >= 2 rows.
class PriceSeries {
 public:
  // Sorts by date and validates; throws DataError on duplicates or bad prices.
  static PriceSeries from_points(std::vector<PricePoint> points);

  const std::vector<PricePoint>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

 private:
  std::vector<PricePoint> entries_;
};

// CSV with a header row naming "date" (ISO-8601) and "close" columns;
// extra columns are ignored. Errors report the offending line number.
PriceSeries load_prices(const std::filesystem::path& csv_path);

enum class ReturnKind { Log, Simple };

// Returns derived from consecutive closes, with the discrete codings the
// games consume. Zero returns code to +1 in binary and 0 in ternary.
struct ReturnSeries {
  std::vector<Date> dates;  // day each return realizes (the later close)
  std::vector<double> r;
  std::vector<std::int8_t> binary;   // {+1, -1}
  std::vector<std::int8_t> ternary;  // {+1, 0, -1}
  ReturnKind kind = ReturnKind::Log;

  std::size_t size() const { return r.size(); }
  std::size_t zero_days() const;
};

ReturnSeries to_returns(const PriceSeries& prices, ReturnKind kind = ReturnKind::Log);

// Read-only window over a ReturnSeries. The prediction pipeline hands the
// optimizer views clipped at the prediction day, so future data is out of
// reach by construction.
struct ReturnView {
  std::span<const double> r;
  std::span<const std::int8_t> binary;
  std::span<const std::int8_t> ternary;

  std::size_t size() const { return r.size(); }
  ReturnView sub(std::size_t begin, std::size_t end) const {
    return {r.subspan(begin, end - begin), binary.subspan(begin, end - begin),
            ternary.subspan(begin, end - begin)};
  }
};

ReturnView view(const ReturnSeries& s);
ReturnView view(const ReturnSeries& s, std::size_t begin, std::size_t end);

enum class RegimeLabel { TrendingUp, TrendingDown, NonTrending, Unclassified };

std::string to_string(RegimeLabel label);
std::optional<RegimeLabel> regime_from_string(std::string_view name);

// Classifies a window by its up/down-day counts: trending needs at least a
// 2:1 ratio, non-trending needs equal counts, anything else is Unclassified.
RegimeLabel classify_regime(std::span<const double> returns);

}  // namespace mgfit
