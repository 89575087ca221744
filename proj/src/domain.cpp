#include "facmon/domain.hpp"

#include <cctype>
#include <cstdio>

#include "facmon/error.hpp"

namespace facmon {

namespace {

template <typename Enum, std::size_t N>
Enum parse_enum(std::string_view s, const std::array<std::string_view, N>& names,
                std::string_view what) {
  for (std::size_t i = 0; i < N; ++i) {
    if (names[i] == s) return static_cast<Enum>(i);
  }
  fail(ErrorCode::INVALID_ARGUMENT, "unknown " + std::string(what) + " '" + std::string(s) + "'");
}

template <typename Enum, std::size_t N>
std::string_view enum_name(Enum e, const std::array<std::string_view, N>& names) noexcept {
  auto idx = static_cast<std::size_t>(e);
  return idx < N ? names[idx] : std::string_view{"?"};
}

constexpr std::array<std::string_view, 5> kConditionNames = {
    "GOOD", "LIGHT_DAMAGE", "HEAVY_DAMAGE", "LOST", "DONATED"};
constexpr std::array<std::string_view, 6> kEventNames = {
    "REPORT_LIGHT_DAMAGE", "REPORT_HEAVY_DAMAGE", "REPORT_LOST", "DONATE", "REPAIR_COMPLETE",
    "RECOVER"};
constexpr std::array<std::string_view, 3> kRoleNames = {"FACILITIES_ADMIN", "WORK_UNIT",
                                                        "LEADERSHIP"};
constexpr std::array<std::string_view, 4> kViewNames = {"FRONT", "SIDE", "BACK", "SERIAL"};
constexpr std::array<std::string_view, 6> kReferenceKindNames = {
    "CAMPUS", "LOCATION", "CATEGORY", "TYPE", "BRAND", "SOURCE"};
constexpr std::array<std::string_view, 4> kTaxonomyKindNames = {"CATEGORY", "TYPE", "BRAND",
                                                                "SOURCE"};

}  // namespace

std::string_view to_string(Condition c) noexcept { return enum_name(c, kConditionNames); }
std::string_view to_string(LifecycleEvent e) noexcept { return enum_name(e, kEventNames); }
std::string_view to_string(Role r) noexcept { return enum_name(r, kRoleNames); }
std::string_view to_string(PhotoView v) noexcept { return enum_name(v, kViewNames); }
std::string_view to_string(ReferenceKind k) noexcept { return enum_name(k, kReferenceKindNames); }
std::string_view to_string(TaxonomyKind k) noexcept { return enum_name(k, kTaxonomyKindNames); }

Condition parse_condition(std::string_view s) {
  return parse_enum<Condition>(s, kConditionNames, "condition");
}
LifecycleEvent parse_event(std::string_view s) {
  return parse_enum<LifecycleEvent>(s, kEventNames, "lifecycle event");
}
Role parse_role(std::string_view s) { return parse_enum<Role>(s, kRoleNames, "role"); }
PhotoView parse_photo_view(std::string_view s) {
  return parse_enum<PhotoView>(s, kViewNames, "photo view");
}
ReferenceKind parse_reference_kind(std::string_view s) {
  return parse_enum<ReferenceKind>(s, kReferenceKindNames, "reference kind");
}
TaxonomyKind parse_taxonomy_kind(std::string_view s) {
  return parse_enum<TaxonomyKind>(s, kTaxonomyKindNames, "taxonomy kind");
}

std::string trim(std::string_view s) {
  auto is_space = [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return std::string(s);
}

std::string normalize_barcode(std::string_view raw) {
  std::string out = trim(raw);
  if (out.empty()) fail(ErrorCode::EMPTY_BARCODE, "barcode is empty");
  for (char& c : out) {
    auto uc = static_cast<unsigned char>(c);
    c = static_cast<char>(std::toupper(uc));
    bool ok = (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' || c == '.';
    if (!ok) fail(ErrorCode::INVALID_CHARS, "barcode may contain only letters, digits, '-' and '.'");
  }
  if (out.size() > kMaxBarcodeLength) {
    fail(ErrorCode::TOO_LONG, "barcode longer than 64 characters");
  }
  return out;
}

std::optional<Condition> try_next_condition(Condition current, LifecycleEvent event) noexcept {
  using C = Condition;
  using E = LifecycleEvent;
  switch (current) {
    case C::GOOD:
      switch (event) {
        case E::REPORT_LIGHT_DAMAGE: return C::LIGHT_DAMAGE;
        case E::REPORT_HEAVY_DAMAGE: return C::HEAVY_DAMAGE;
        case E::REPORT_LOST: return C::LOST;
        case E::DONATE: return C::DONATED;
        default: return std::nullopt;
      }
    case C::LIGHT_DAMAGE:
      switch (event) {
        case E::REPAIR_COMPLETE: return C::GOOD;
        case E::REPORT_HEAVY_DAMAGE: return C::HEAVY_DAMAGE;
        case E::REPORT_LOST: return C::LOST;
        default: return std::nullopt;
      }
    case C::HEAVY_DAMAGE:
      switch (event) {
        case E::REPAIR_COMPLETE: return C::GOOD;
        case E::REPORT_LOST: return C::LOST;
        case E::DONATE: return C::DONATED;
        default: return std::nullopt;
      }
    case C::LOST:
      if (event == E::RECOVER) return C::GOOD;
      return std::nullopt;
    case C::DONATED:
      return std::nullopt;
  }
  return std::nullopt;
}

Condition next_condition(Condition current, LifecycleEvent event) {
  auto next = try_next_condition(current, event);
  if (!next) {
    fail(ErrorCode::ILLEGAL_TRANSITION, std::string(to_string(event)) + " is not allowed from " +
                                            std::string(to_string(current)));
  }
  return *next;
}

WarrantyStatus warranty_status(std::optional<Date> warranty_end, Date as_of) noexcept {
  if (!warranty_end) return NoWarranty{};
  auto remaining = as_of.days_until(*warranty_end);
  if (remaining >= 0) return InWarranty{remaining};
  return WarrantyExpired{-remaining};
}

Money Money::parse(std::string_view text) {
  auto bad = [&] {
    fail(ErrorCode::INVALID_ARGUMENT,
         "invalid amount '" + std::string(text) + "', expected a non-negative decimal");
  };
  if (text.empty()) bad();
  std::int64_t whole = 0;
  std::size_t i = 0;
  for (; i < text.size() && text[i] != '.'; ++i) {
    if (text[i] < '0' || text[i] > '9') bad();
    if (whole > (INT64_MAX / 100 - 9) / 10) bad();
    whole = whole * 10 + (text[i] - '0');
  }
  if (i == 0) bad();
  std::int64_t frac = 0;
  if (i < text.size()) {
    auto digits = text.substr(i + 1);
    if (digits.empty() || digits.size() > 2) bad();
    for (char c : digits) {
      if (c < '0' || c > '9') bad();
      frac = frac * 10 + (c - '0');
    }
    if (digits.size() == 1) frac *= 10;
  }
  return Money{whole * 100 + frac};
}

std::string Money::to_string() const {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%lld.%02lld", static_cast<long long>(hundredths / 100),
                static_cast<long long>(hundredths % 100));
  return buf;
}

}  // namespace facmon
