#pragma once

// Value types shared by every module. Nothing here touches storage or I/O.

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "facmon/date.hpp"

namespace facmon {

enum class Condition { GOOD, LIGHT_DAMAGE, HEAVY_DAMAGE, LOST, DONATED };

enum class LifecycleEvent {
  REPORT_LIGHT_DAMAGE,
  REPORT_HEAVY_DAMAGE,
  REPORT_LOST,
  DONATE,
  REPAIR_COMPLETE,
  RECOVER,
};

enum class Role { FACILITIES_ADMIN, WORK_UNIT, LEADERSHIP };

enum class PhotoView { FRONT, SIDE, BACK, SERIAL };

enum class ReferenceKind { CAMPUS, LOCATION, CATEGORY, TYPE, BRAND, SOURCE };

enum class TaxonomyKind { CATEGORY, TYPE, BRAND, SOURCE };

inline constexpr std::array kAllConditions = {Condition::GOOD, Condition::LIGHT_DAMAGE,
                                              Condition::HEAVY_DAMAGE, Condition::LOST,
                                              Condition::DONATED};
inline constexpr std::array kAllEvents = {
    LifecycleEvent::REPORT_LIGHT_DAMAGE, LifecycleEvent::REPORT_HEAVY_DAMAGE,
    LifecycleEvent::REPORT_LOST,         LifecycleEvent::DONATE,
    LifecycleEvent::REPAIR_COMPLETE,     LifecycleEvent::RECOVER};
inline constexpr std::array kAllRoles = {Role::FACILITIES_ADMIN, Role::WORK_UNIT,
                                         Role::LEADERSHIP};
inline constexpr std::array kAllPhotoViews = {PhotoView::FRONT, PhotoView::SIDE, PhotoView::BACK,
                                              PhotoView::SERIAL};
inline constexpr std::array kAllTaxonomyKinds = {TaxonomyKind::CATEGORY, TaxonomyKind::TYPE,
                                                 TaxonomyKind::BRAND, TaxonomyKind::SOURCE};

std::string_view to_string(Condition c) noexcept;
std::string_view to_string(LifecycleEvent e) noexcept;
std::string_view to_string(Role r) noexcept;
std::string_view to_string(PhotoView v) noexcept;
std::string_view to_string(ReferenceKind k) noexcept;
std::string_view to_string(TaxonomyKind k) noexcept;

// Parsers throw INVALID_ARGUMENT on unknown names.
Condition parse_condition(std::string_view s);
LifecycleEvent parse_event(std::string_view s);
Role parse_role(std::string_view s);
PhotoView parse_photo_view(std::string_view s);
ReferenceKind parse_reference_kind(std::string_view s);
TaxonomyKind parse_taxonomy_kind(std::string_view s);

/// Terminal items (lost, donated) are no longer operable assets.
constexpr bool is_terminal(Condition c) noexcept {
  return c == Condition::LOST || c == Condition::DONATED;
}

constexpr bool is_damaged(Condition c) noexcept {
  return c == Condition::LIGHT_DAMAGE || c == Condition::HEAVY_DAMAGE;
}

struct CampusRef {
  std::string id;
  std::string code;
  std::string name;
  std::string address;
  bool active = true;

  bool operator==(const CampusRef&) const = default;
};

struct LocationRef {
  std::string id;
  std::string code;
  std::string name;
  int floor = 1;
  std::string campus_id;
  bool active = true;

  bool operator==(const LocationRef&) const = default;
};

struct TaxonomyRef {
  std::string id;
  TaxonomyKind kind = TaxonomyKind::CATEGORY;
  std::string code;
  std::string name;
  bool active = true;

  bool operator==(const TaxonomyRef&) const = default;
};

/// A location named by codes, the way operators and CSV files refer to it.
struct LocationAddress {
  std::string campus_code;
  std::string location_code;

  bool operator==(const LocationAddress&) const = default;
};

struct PhotoRef {
  std::string id;  // hex SHA-256 of the stored bytes
  PhotoView view = PhotoView::FRONT;
  std::string media_type;
  std::uint64_t byte_length = 0;

  bool operator==(const PhotoRef&) const = default;
};

struct Item {
  std::string id;
  std::string barcode;
  std::string name;
  std::string specification;
  std::string category_id;
  std::string type_id;
  std::string brand_id;
  std::string source_id;
  Date purchase_date;
  std::optional<Date> warranty_end_date;
  std::optional<int> maintenance_interval_days;
  Condition condition = Condition::GOOD;
  std::string location_id;
  std::string custodian;
  std::map<PhotoView, PhotoRef> photos;
  std::optional<std::string> open_repair_id;
  std::optional<Date> registered_on;

  bool operator==(const Item&) const = default;
};

struct NoWarranty {
  bool operator==(const NoWarranty&) const = default;
};
struct InWarranty {
  std::int64_t days_remaining = 0;
  bool operator==(const InWarranty&) const = default;
};
struct WarrantyExpired {
  std::int64_t days_since = 0;
  bool operator==(const WarrantyExpired&) const = default;
};
using WarrantyStatus = std::variant<NoWarranty, InWarranty, WarrantyExpired>;

/// Who is performing an operation; used for permission checks and audit attribution.
struct Actor {
  std::string user_id;
  std::string username;
  Role role = Role::FACILITIES_ADMIN;
  std::vector<std::string> assigned_locations;  // LocationRef ids, WORK_UNIT scope

  static Actor system() { return Actor{"system", "system", Role::FACILITIES_ADMIN, {}}; }
};

/// Decimal amount in local currency, held as hundredths.
struct Money {
  std::int64_t hundredths = 0;

  /// Accepts `123`, `123.4`, `123.45`; rejects negatives and more than two decimals.
  static Money parse(std::string_view text);
  [[nodiscard]] std::string to_string() const;
  auto operator<=>(const Money&) const = default;
};

inline constexpr std::size_t kMaxBarcodeLength = 64;

/// Trim, uppercase, and validate against [A-Z0-9.-]{1,64}.
/// Throws EMPTY_BARCODE, INVALID_CHARS or TOO_LONG.
std::string normalize_barcode(std::string_view raw);

/// Condition transition table. Throws ILLEGAL_TRANSITION for pairs outside it.
Condition next_condition(Condition current, LifecycleEvent event);

/// Non-throwing form of next_condition.
std::optional<Condition> try_next_condition(Condition current, LifecycleEvent event) noexcept;

/// The warranty end date itself still counts as covered.
WarrantyStatus warranty_status(std::optional<Date> warranty_end, Date as_of) noexcept;

std::string trim(std::string_view s);

}  // namespace facmon
