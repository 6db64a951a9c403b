#include "mgfit/market_data.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "mgfit/errors.hpp"

namespace mgfit {
namespace {

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

PriceSeries PriceSeries::from_points(std::vector<PricePoint> points) {
  if (points.size() < 2) throw DataError("price series needs at least 2 rows");
  std::sort(points.begin(), points.end(),
            [](const PricePoint& a, const PricePoint& b) { return a.date < b.date; });
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!(points[i].close > 0.0) || !std::isfinite(points[i].close))
      throw DataError("non-positive price at " + points[i].date.to_string());
    if (i > 0 && points[i].date == points[i - 1].date)
      throw DataError("duplicate date " + points[i].date.to_string());
  }
  PriceSeries s;
  s.entries_ = std::move(points);
  return s;
}

PriceSeries load_prices(const std::filesystem::path& csv_path) {
  std::ifstream in(csv_path);
  if (!in) throw DataError("cannot open " + csv_path.string());

  std::string line;
  if (!std::getline(in, line)) throw DataError("empty file " + csv_path.string());

  const auto header = split_csv(line);
  int date_col = -1, close_col = -1;
  for (std::size_t i = 0; i < header.size(); ++i) {
    const auto name = lower(header[i]);
    if (name == "date") date_col = static_cast<int>(i);
    if (name == "close") close_col = static_cast<int>(i);
  }
  if (date_col < 0 || close_col < 0)
    throw DataError(csv_path.string() + ": header must name 'date' and 'close' columns");

  std::vector<PricePoint> points;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_csv(line);
    auto fail = [&](const std::string& what) {
      throw DataError(csv_path.string() + ":" + std::to_string(line_no) + ": " + what);
    };
    if (static_cast<int>(cells.size()) <= std::max(date_col, close_col))
      fail("too few columns");
    auto date = Date::parse(cells[date_col]);
    if (!date) fail("bad date '" + cells[date_col] + "'");
    double close = 0.0;
    try {
      std::size_t used = 0;
      close = std::stod(cells[close_col], &used);
      if (used != cells[close_col].size()) fail("bad close '" + cells[close_col] + "'");
    } catch (const std::exception&) {
      fail("bad close '" + cells[close_col] + "'");
    }
    if (!(close > 0.0)) fail("non-positive price '" + cells[close_col] + "'");
    points.push_back({*date, close});
  }
  return PriceSeries::from_points(std::move(points));
}

std::size_t ReturnSeries::zero_days() const {
  return static_cast<std::size_t>(std::count(r.begin(), r.end(), 0.0));
}

ReturnSeries to_returns(const PriceSeries& prices, ReturnKind kind) {
  const auto& p = prices.entries();
  if (p.size() < 2) throw DataError("need at least 2 prices to form returns");

  ReturnSeries out;
  out.kind = kind;
  const std::size_t n = p.size() - 1;
  out.dates.reserve(n);
  out.r.reserve(n);
  out.binary.reserve(n);
  out.ternary.reserve(n);
  for (std::size_t t = 0; t < n; ++t) {
    const double ratio = p[t + 1].close / p[t].close;
    const double rt = kind == ReturnKind::Log ? std::log(ratio) : ratio - 1.0;
    out.dates.push_back(p[t + 1].date);
    out.r.push_back(rt);
    out.ternary.push_back(rt > 0 ? std::int8_t{1} : rt < 0 ? std::int8_t{-1} : std::int8_t{0});
    out.binary.push_back(rt < 0 ? std::int8_t{-1} : std::int8_t{1});  // zero-rule: 0 -> +1
  }
  return out;
}

ReturnView view(const ReturnSeries& s) { return view(s, 0, s.size()); }

ReturnView view(const ReturnSeries& s, std::size_t begin, std::size_t end) {
  if (begin > end || end > s.size()) throw ConfigError("return view out of range");
  return {std::span(s.r).subspan(begin, end - begin),
          std::span(s.binary).subspan(begin, end - begin),
          std::span(s.ternary).subspan(begin, end - begin)};
}

std::string to_string(RegimeLabel label) {
  switch (label) {
    case RegimeLabel::TrendingUp: return "trending_up";
    case RegimeLabel::TrendingDown: return "trending_down";
    case RegimeLabel::NonTrending: return "non_trending";
    case RegimeLabel::Unclassified: return "unclassified";
  }
  return "unclassified";
}

std::optional<RegimeLabel> regime_from_string(std::string_view name) {
  if (name == "trending_up") return RegimeLabel::TrendingUp;
  if (name == "trending_down") return RegimeLabel::TrendingDown;
  if (name == "non_trending") return RegimeLabel::NonTrending;
  if (name == "unclassified") return RegimeLabel::Unclassified;
  return std::nullopt;
}

RegimeLabel classify_regime(std::span<const double> returns) {
  if (returns.empty()) throw ConfigError("classify_regime: empty window");
  long long up = 0, down = 0;
  for (double x : returns) {
    if (x > 0) ++up;
    if (x < 0) ++down;
  }
  if (up == down) return RegimeLabel::NonTrending;
  if ((down > 0 && up >= 2 * down) || (down == 0 && up > 0)) return RegimeLabel::TrendingUp;
  if ((up > 0 && down >= 2 * up) || (up == 0 && down > 0)) return RegimeLabel::TrendingDown;
  return RegimeLabel::Unclassified;
}

}  // namespace mgfit
