#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace mgfit {

// Calendar day, stored as days since 1970-01-01 (proleptic Gregorian).
class Date {
 public:
  Date() = default;

  static Date from_days(std::int32_t days) { return Date(days); }
  static Date from_ymd(int year, int month, int day);
  // Parses strict ISO-8601 "YYYY-MM-DD"; nullopt on anything else.
  static std::optional<Date> parse(std::string_view iso);

  std::int32_t days() const { return days_; }
  std::string to_string() const;

  Date operator+(int n) const { return Date(days_ + n); }
  auto operator<=>(const Date&) const = default;

 private:
  explicit Date(std::int32_t d) : days_(d) {}
  std::int32_t days_ = 0;
};

}  // namespace mgfit
