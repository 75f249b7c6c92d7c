#pragma once

#include <chrono>
#include <compare>
#include <optional>
#include <string>
#include <string_view>

namespace btca {

/// A UTC calendar day. Arithmetic is in whole days.
class Date {
 public:
  constexpr Date() = default;
  constexpr explicit Date(std::chrono::sys_days days) : days_(days) {}
  constexpr Date(int year, unsigned month, unsigned day)
      : days_(std::chrono::year_month_day{std::chrono::year{year}, std::chrono::month{month},
                                          std::chrono::day{day}}) {}

  /// Strict `YYYY-MM-DD`; rejects impossible days such as 2021-02-30.
  static std::optional<Date> parse(std::string_view text);

  std::string iso() const;
  constexpr std::chrono::sys_days days() const { return days_; }

  constexpr Date operator+(int n) const { return Date{days_ + std::chrono::days{n}}; }
  constexpr Date operator-(int n) const { return Date{days_ - std::chrono::days{n}}; }
  constexpr int operator-(Date other) const { return static_cast<int>((days_ - other.days_).count()); }

  constexpr auto operator<=>(const Date&) const = default;

 private:
  std::chrono::sys_days days_{};
};

}  // namespace btca
