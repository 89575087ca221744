#pragma once

#include <chrono>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace facmon {

using Clock = std::chrono::system_clock;
using Timestamp = std::chrono::time_point<Clock, std::chrono::milliseconds>;

/// Calendar date without time of day, proleptic Gregorian.
class Date {
 public:
  constexpr Date() = default;
  constexpr explicit Date(std::chrono::sys_days days) : days_(days) {}
  Date(int year, unsigned month, unsigned day);

  /// Strict `YYYY-MM-DD`; throws INVALID_ARGUMENT otherwise.
  static Date parse(std::string_view iso);
  static std::optional<Date> try_parse(std::string_view iso) noexcept;
  static Date from(Timestamp ts) noexcept;

  [[nodiscard]] std::string to_string() const;
  [[nodiscard]] constexpr std::chrono::sys_days sys_days() const { return days_; }
  [[nodiscard]] std::chrono::year_month_day ymd() const { return {days_}; }

  [[nodiscard]] constexpr Date plus_days(std::int64_t n) const {
    return Date{days_ + std::chrono::days{n}};
  }

  /// Signed number of calendar days from `*this` to `later`.
  [[nodiscard]] constexpr std::int64_t days_until(Date later) const {
    return (later.days_ - days_).count();
  }

  constexpr auto operator<=>(const Date&) const = default;

 private:
  std::chrono::sys_days days_{};
};

std::string format_timestamp(Timestamp ts);
std::optional<Timestamp> parse_timestamp(std::string_view iso) noexcept;

inline Timestamp now_ms() {
  return std::chrono::time_point_cast<std::chrono::milliseconds>(Clock::now());
}

}  // namespace facmon
