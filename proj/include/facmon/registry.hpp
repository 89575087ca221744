#pragma once

// Reference data (campuses, locations, taxonomy) and goods receipt.

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "facmon/catalog.hpp"
#include "facmon/domain.hpp"
#include "facmon/storage.hpp"

namespace facmon {

/// Fields for any reference kind; each kind reads only the ones it needs.
/// CAMPUS: code, name, address. LOCATION: campus_code, code, name, floor.
/// Taxonomy kinds: code, name.
struct ReferenceInput {
  std::string code;
  std::string name;
  std::string address;
  int floor = 1;
  std::string campus_code;
};

enum class UpsertMode { CreateOnly, CreateOrUpdate };

struct ItemReceipt {
  std::string barcode;
  std::string name;
  std::string specification;
  std::string category_code;
  std::string type_code;
  std::string brand_code;
  std::string source_code;
  Date purchase_date;
  std::optional<Date> warranty_end_date;
  std::optional<int> maintenance_interval_days;
  std::string campus_code;
  std::string location_code;
  std::string custodian;

  bool operator==(const ItemReceipt&) const = default;
};

/// Conjunctive item filter; unset fields match everything.
struct ItemFilter {
  std::optional<std::string> campus_code;
  std::optional<std::string> location_code;
  std::optional<std::string> category_code;
  std::optional<Condition> condition;
  std::optional<std::string> text;  // case-insensitive substring of barcode/name/spec/custodian
  std::optional<std::vector<std::string>> location_ids;  // WORK_UNIT scope
};

struct DefaultCategory {
  std::string_view code;
  std::string_view name;
};

/// The twenty standard facility categories, C01..C20 in order.
const std::array<DefaultCategory, 20>& default_categories() noexcept;

inline constexpr std::array<std::string_view, 2> kPhotoMediaTypes = {"image/jpeg", "image/png"};

class Registry {
 public:
  explicit Registry(Store& store) : store_(store) {}

  /// Creates a reference, or with CreateOrUpdate updates the one matching (kind, code).
  /// Errors: DUPLICATE_CODE, UNKNOWN_PARENT, INVALID_ARGUMENT.
  std::string upsert_reference(ReferenceKind kind, const ReferenceInput& input, const Actor& actor,
                               UpsertMode mode = UpsertMode::CreateOnly);

  /// References are never deleted, only deactivated, so historical records keep resolving.
  /// `campus_code` is only used for LOCATION. Errors: UNKNOWN_REFERENCE.
  void deactivate_reference(ReferenceKind kind, std::string_view code, const Actor& actor,
                            std::string_view campus_code = {});

  /// Errors: ALREADY_SEEDED if any of C01..C20 exists.
  std::vector<TaxonomyRef> seed_default_categories(const Actor& actor);

  /// Errors: barcode errors, DUPLICATE_BARCODE, INVALID_WARRANTY_RANGE, UNKNOWN_REFERENCE,
  /// INVALID_ARGUMENT.
  Item register_item(const ItemReceipt& receipt, const Actor& actor, Date date);

  /// All-or-nothing bulk registration in a single commit. Row errors keep their
  /// code and carry "row N:" in the message (N is 1-based over data rows).
  std::vector<Item> import_items(const std::vector<ItemReceipt>& receipts, const Actor& actor,
                                 Date date);

  /// Errors: UNKNOWN_ITEM, EMPTY_PAYLOAD, UNSUPPORTED_MEDIA_TYPE.
  PhotoRef attach_photo(std::string_view barcode, PhotoView view, std::string_view bytes,
                        std::string_view media_type, const Actor& actor);

  [[nodiscard]] Item get_item(std::string_view barcode) const;
  [[nodiscard]] std::vector<Item> list_items(const ItemFilter& filter = {}) const;

  /// `{campus}-{category}-{5-digit sequence}`, one past the highest in use.
  [[nodiscard]] std::string generate_barcode(std::string_view campus_code,
                                             std::string_view category_code) const;

  [[nodiscard]] std::vector<CampusRef> campuses() const;
  [[nodiscard]] std::vector<LocationRef> locations() const;
  [[nodiscard]] std::vector<TaxonomyRef> taxonomy(TaxonomyKind kind) const;

 private:
  Store& store_;
};

/// Pure filter predicate shared by list_items and the reports.
bool matches(const ItemFilter& filter, const Item& item, const Catalog& catalog);

}  // namespace facmon
