#include "facmon/date.hpp"

#include <cstdio>

#include "facmon/error.hpp"

namespace facmon {

namespace {

bool parse_fixed(std::string_view s, std::size_t pos, std::size_t len, int& out) {
  int v = 0;
  for (std::size_t i = pos; i < pos + len; ++i) {
    char c = s[i];
    if (c < '0' || c > '9') return false;
    v = v * 10 + (c - '0');
  }
  out = v;
  return true;
}

}  // namespace

Date::Date(int year, unsigned month, unsigned day) {
  std::chrono::year_month_day ymd{std::chrono::year{year}, std::chrono::month{month},
                                  std::chrono::day{day}};
  if (!ymd.ok()) fail(ErrorCode::INVALID_ARGUMENT, "invalid calendar date");
  days_ = std::chrono::sys_days{ymd};
}

std::optional<Date> Date::try_parse(std::string_view iso) noexcept {
  if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-') return std::nullopt;
  int y = 0, m = 0, d = 0;
  if (!parse_fixed(iso, 0, 4, y) || !parse_fixed(iso, 5, 2, m) || !parse_fixed(iso, 8, 2, d)) {
    return std::nullopt;
  }
  std::chrono::year_month_day ymd{std::chrono::year{y},
                                  std::chrono::month{static_cast<unsigned>(m)},
                                  std::chrono::day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) return std::nullopt;
  return Date{std::chrono::sys_days{ymd}};
}

Date Date::parse(std::string_view iso) {
  auto d = try_parse(iso);
  if (!d) fail(ErrorCode::INVALID_ARGUMENT, "invalid date '" + std::string(iso) + "', expected YYYY-MM-DD");
  return *d;
}

Date Date::from(Timestamp ts) noexcept {
  return Date{std::chrono::floor<std::chrono::days>(ts)};
}

std::string Date::to_string() const {
  auto ymd = this->ymd();
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

std::string format_timestamp(Timestamp ts) {
  auto day = std::chrono::floor<std::chrono::days>(ts);
  std::chrono::hh_mm_ss tod{ts - day};
  auto date = Date{day}.to_string();
  char buf[48];
  std::snprintf(buf, sizeof buf, "%sT%02d:%02d:%02d.%03dZ", date.c_str(),
                static_cast<int>(tod.hours().count()), static_cast<int>(tod.minutes().count()),
                static_cast<int>(tod.seconds().count()),
                static_cast<int>(tod.subseconds().count()));
  return buf;
}

std::optional<Timestamp> parse_timestamp(std::string_view iso) noexcept {
  // YYYY-MM-DDTHH:MM:SS.mmmZ
  if (iso.size() != 24 || iso[10] != 'T' || iso[13] != ':' || iso[16] != ':' || iso[19] != '.' ||
      iso[23] != 'Z') {
    return std::nullopt;
  }
  auto date = Date::try_parse(iso.substr(0, 10));
  int h = 0, m = 0, s = 0, ms = 0;
  if (!date || !parse_fixed(iso, 11, 2, h) || !parse_fixed(iso, 14, 2, m) ||
      !parse_fixed(iso, 17, 2, s) || !parse_fixed(iso, 20, 3, ms)) {
    return std::nullopt;
  }
  if (h > 23 || m > 59 || s > 59) return std::nullopt;
  using namespace std::chrono;
  return Timestamp{date->sys_days() + hours{h} + minutes{m} + seconds{s} + milliseconds{ms}};
}

}  // namespace facmon
